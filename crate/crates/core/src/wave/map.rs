//! The speed map `c(x)` by continuation in `x`, and the boundary `c(x*) = 0`.

use log::info;
use serde::Serialize;

use super::{solve_wave_bvp, WaveError, WaveProblem, WaveResult, WaveSettings};
use crate::model::{find_bistable_interval, BistableInterval, CompetitionModel};

/// Continuation step as a fraction of the bistable width.
const CONTINUATION_STEP: f64 = 0.02;
/// Offset of the first and last probe from the interval ends, as a fraction
/// of its width.
const END_OFFSET: f64 = 0.02;
const PROBES: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedSample {
    pub x: f64,
    pub c: f64,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub half_length: f64,
}

impl SpeedSample {
    fn from_result(r: &WaveResult) -> Self {
        Self {
            x: r.x_frozen,
            c: r.c,
            converged: r.converged,
            iterations: r.iterations,
            residual: r.residual,
            half_length: r.half_length,
        }
    }
}

fn continued(
    model: &CompetitionModel,
    interval: &BistableInterval,
    xs: &[f64],
    settings: &WaveSettings,
) -> Result<Vec<WaveResult>, WaveError> {
    if let Some(w) = xs.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(WaveError::Setting(format!("sample positions must increase strictly, got {} then {}", w[0], w[1])));
    }
    let max_step = CONTINUATION_STEP * interval.width();
    let mut out = Vec::with_capacity(xs.len());
    let mut prev: Option<WaveResult> = None;
    for &x in xs {
        // Walk towards x in steps no larger than max_step.
        if let Some(p) = prev.take() {
            let gap = x - p.x_frozen;
            let k = (gap / max_step).ceil().max(1.0) as usize;
            let start = p.x_frozen;
            let mut guess = p;
            for j in 1..k {
                let xi = start + gap * j as f64 / k as f64;
                let problem = WaveProblem::new(model, xi).with_settings(*settings);
                guess = solve_wave_bvp(&problem, Some(&guess))?;
            }
            prev = Some(guess);
        }
        let problem = WaveProblem::new(model, x).with_settings(*settings);
        let r = solve_wave_bvp(&problem, prev.as_ref())?;
        prev = Some(r.clone());
        out.push(r);
    }
    Ok(out)
}

/// `c(x)` at strictly increasing `xs` inside the bistable interval, each
/// solve seeded by the previous one.
pub fn speed_map(model: &CompetitionModel, xs: &[f64], settings: &WaveSettings) -> Result<Vec<SpeedSample>, WaveError> {
    let interval = find_bistable_interval(model)?;
    Ok(continued(model, &interval, xs, settings)?.iter().map(SpeedSample::from_result).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryLocation {
    pub x_star: f64,
    /// Final bracket with `c(x_lo) > 0 > c(x_hi)`.
    pub bracket: (f64, f64),
    /// Speeds at the probe points and every bisection midpoint, sorted by `x`.
    pub c_values: Vec<(f64, f64)>,
    /// Bisection steps after the probe map.
    pub iterations: usize,
    pub interval: BistableInterval,
}

/// Bisection on the sign of `c` until the bracket is shorter than `tol_x`.
pub fn locate_boundary(model: &CompetitionModel, tol_x: f64, settings: &WaveSettings) -> Result<BoundaryLocation, WaveError> {
    if !(tol_x > 0.0) {
        return Err(WaveError::Setting(format!("tol_x must be positive, got {tol_x}")));
    }
    let interval = find_bistable_interval(model)?;
    let lo = interval.x_b + END_OFFSET * interval.width();
    let hi = interval.x_a - END_OFFSET * interval.width();
    let xs: Vec<f64> = (0..PROBES).map(|i| lo + (hi - lo) * i as f64 / (PROBES - 1) as f64).collect();
    let probes = continued(model, &interval, &xs, settings)?;
    let mut c_values: Vec<(f64, f64)> = probes.iter().map(|r| (r.x_frozen, r.c)).collect();

    let (first, last) = (&probes[0], &probes[PROBES - 1]);
    if !(first.c > 0.0 && last.c < 0.0) {
        let endpoint = if first.c <= 0.0 && last.c <= 0.0 { "x_b" } else { "x_a" };
        return Err(WaveError::BoundaryAtEndpoint { endpoint, x_lo: lo, x_hi: hi, c_lo: first.c, c_hi: last.c });
    }
    let k = probes.windows(2).position(|w| w[0].c > 0.0 && w[1].c <= 0.0).expect("sign change exists");
    let (mut left, mut right) = (probes[k].clone(), probes[k + 1].clone());
    let mut iterations = 0;
    while right.x_frozen - left.x_frozen > tol_x {
        let mid = 0.5 * (left.x_frozen + right.x_frozen);
        let guess = if left.c.abs() < right.c.abs() { &left } else { &right };
        let r = solve_wave_bvp(&WaveProblem::new(model, mid).with_settings(*settings), Some(guess))?;
        iterations += 1;
        c_values.push((mid, r.c));
        if r.c > 0.0 {
            left = r;
        } else {
            right = r;
        }
    }
    c_values.sort_by(|p, q| p.0.total_cmp(&q.0));
    let x_star = 0.5 * (left.x_frozen + right.x_frozen);
    info!("boundary: x* = {x_star} after {iterations} bisection steps");
    Ok(BoundaryLocation { x_star, bracket: (left.x_frozen, right.x_frozen), c_values, iterations, interval })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_map_decreases_and_is_antisymmetric() {
        let m = CompetitionModel::reference_linear();
        let xs = [0.3, 0.4, 0.5, 0.6, 0.7];
        let map = speed_map(&m, &xs, &WaveSettings::default()).unwrap();
        for w in map.windows(2) {
            assert!(w[1].c < w[0].c);
        }
        assert!((map[1].c + map[3].c).abs() < 2e-5);
    }

    #[test]
    fn reference_boundary_is_midpoint() {
        let m = CompetitionModel::reference_linear();
        let loc = locate_boundary(&m, 1e-4, &WaveSettings::default()).unwrap();
        assert!((loc.x_star - 0.5).abs() <= 1e-4);
        assert!(loc.iterations <= 13);
        assert!(loc.bracket.1 - loc.bracket.0 <= 1e-4);
    }

    #[test]
    fn unsorted_samples_are_rejected() {
        let m = CompetitionModel::reference_linear();
        assert!(matches!(speed_map(&m, &[0.5, 0.4], &WaveSettings::default()), Err(WaveError::Setting(_))));
    }
}
