use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentError;
use crate::model::CompetitionModel;
use crate::pde::{run_to_steady, Grid1D, InitialCondition, SteadyOptions, SteadyState};
use crate::wave::{locate_boundary, BoundaryLocation, WaveSettings};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub steady: SteadyOptions,
    pub wave: WaveSettings,
    /// Bisection tolerance for the wave-predicted boundary.
    pub tol_x: f64,
    /// Initial condition for every run; the default ramp is centred on the
    /// middle of the bistable interval, not on the predicted boundary.
    pub init: InitialCondition,
    /// Run the entries on the rayon pool.
    pub parallel: bool,
    /// Keep the steady states in the report.
    pub keep_states: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            steady: SteadyOptions::default(),
            wave: WaveSettings::default(),
            tol_x: 1e-6,
            init: InitialCondition::MonotoneRamp { center: None },
            parallel: true,
            keep_states: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub eps: f64,
    pub n: usize,
    pub x_star_eps: Option<f64>,
    pub width: Option<f64>,
    pub max_slope_a: Option<f64>,
    pub residual: Option<f64>,
    pub iterations: Option<usize>,
    pub wall_time_s: f64,
    /// `|x*_eps - x*|` when both are known.
    pub gap: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Sorted by decreasing `eps`.
    pub entries: Vec<SweepEntry>,
    pub x_star_wave: Option<BoundaryLocation>,
    pub wave_error: Option<String>,
    /// Least-squares slope of `log(width)` against `log(eps)`.
    pub width_exponent: Option<f64>,
    pub states: Vec<Option<SteadyState>>,
}

impl SweepReport {
    pub fn convergence_gap(&self) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| e.gap).collect()
    }

    /// Whether the gaps never grow by more than `slack` along the sweep.
    pub fn gap_non_increasing(&self, slack: f64) -> bool {
        let gaps: Vec<f64> = self.entries.iter().filter_map(|e| e.gap).collect();
        gaps.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    pub fn all_succeeded(&self) -> bool {
        self.entries.iter().all(|e| e.error.is_none())
    }
}

fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn run_entry(
    model: &CompetitionModel,
    eps: f64,
    options: &SweepOptions,
    x_star: Option<f64>,
) -> (SweepEntry, Option<SteadyState>) {
    let start = Instant::now();
    let result = Grid1D::auto(eps).and_then(|g| run_to_steady(model, eps, g, options.init.clone(), &options.steady));
    let wall_time_s = start.elapsed().as_secs_f64();
    let n = Grid1D::required_nodes(eps);
    match result {
        Ok(s) => {
            let x_star_eps = s.front.map(|f| f.x_star_eps);
            let entry = SweepEntry {
                eps,
                n,
                x_star_eps,
                width: s.front.map(|f| f.width),
                max_slope_a: Some(s.state.max_slope_a()),
                residual: Some(s.residual),
                iterations: Some(s.iterations),
                wall_time_s,
                gap: x_star_eps.zip(x_star).map(|(a, b)| (a - b).abs()),
                error: None,
            };
            (entry, Some(s))
        }
        Err(e) => {
            warn!("sweep entry eps={eps:e} failed: {e}");
            let entry = SweepEntry {
                eps,
                n,
                x_star_eps: None,
                width: None,
                max_slope_a: None,
                residual: None,
                iterations: None,
                wall_time_s,
                gap: None,
                error: Some(e.to_string()),
            };
            (entry, None)
        }
    }
}

/// Steady states for each `eps` (strictly decreasing, positive), compared
/// with the wave-predicted boundary. Per-entry failures are recorded and the
/// sweep continues.
pub fn epsilon_sweep(
    model: &CompetitionModel,
    eps_list: &[f64],
    tol: f64,
    options: &SweepOptions,
) -> Result<SweepReport, ExperimentError> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0)) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(ExperimentError::Setting(format!("eps list must be positive and strictly decreasing, got {eps_list:?}")));
    }
    let mut options = options.clone();
    options.steady.tol = tol;
    let (x_star_wave, wave_error) = match locate_boundary(model, options.tol_x, &options.wave) {
        Ok(b) => (Some(b), None),
        Err(e) => {
            warn!("wave boundary unavailable: {e}");
            (None, Some(e.to_string()))
        }
    };
    let x_star = x_star_wave.as_ref().map(|b| b.x_star);
    let results: Vec<(SweepEntry, Option<SteadyState>)> = if options.parallel {
        eps_list.par_iter().map(|&eps| run_entry(model, eps, &options, x_star)).collect()
    } else {
        eps_list.iter().map(|&eps| run_entry(model, eps, &options, x_star)).collect()
    };
    let (entries, states): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let widths: Vec<(f64, f64)> = entries.iter().filter_map(|e| e.width.map(|w| (e.eps, w))).collect();
    let width_exponent = loglog_slope(&widths);
    info!("sweep: {} entries, width exponent {:?}", entries.len(), width_exponent);
    Ok(SweepReport {
        entries,
        x_star_wave,
        wave_error,
        width_exponent,
        states: if options.keep_states { states } else { Vec::new() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4].iter().map(|&e: &f64| (e, 3.0 * e.sqrt())).collect();
        assert!((loglog_slope(&pts).unwrap() - 0.5).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
    }

    #[test]
    fn rejects_unsorted_eps() {
        let m = CompetitionModel::reference_linear();
        let r = epsilon_sweep(&m, &[1e-3, 1e-2], 1e-8, &SweepOptions::default());
        assert!(matches!(r, Err(ExperimentError::Setting(_))));
    }

    #[test]
    fn reference_sweep_pins_midpoint() {
        let m = CompetitionModel::reference_linear();
        let r = epsilon_sweep(&m, &[1e-2, 1e-3], 1e-8, &SweepOptions::default()).unwrap();
        assert!(r.all_succeeded());
        for e in &r.entries {
            let h = 1.0 / (e.n - 1) as f64;
            assert!((e.x_star_eps.unwrap() - 0.5).abs() <= 2.0 * h + e.eps.sqrt());
        }
        assert!((r.x_star_wave.unwrap().x_star - 0.5).abs() < 1e-5);
    }
}
