use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{zero_diffusion_demo, ExperimentError, Outcome, ZeroDiffusionReport};
use crate::model::{find_bistable_interval, CompetitionModel};
use crate::output::{LinePlot, Series};
use crate::pde::{run_to_steady, Grid1D, InitialCondition, PdeError, SteadyOptions, SteadyState, StateField};
use crate::wave::{locate_boundary, BoundaryLocation, WaveSettings};

#[derive(Debug, Clone, PartialEq)]
pub struct Figure2Options {
    pub eps_small: f64,
    pub seeds: [u64; 2],
    /// Positions in the zero-diffusion panel.
    pub n_cells_zero: usize,
    /// Grid for the diffusive runs; `None` picks the smallest resolving grid.
    pub n: Option<usize>,
    pub steady: SteadyOptions,
    pub wave: WaveSettings,
    pub tol_x: f64,
}

impl Default for Figure2Options {
    fn default() -> Self {
        Self {
            eps_small: 1e-5,
            seeds: [1, 2],
            n_cells_zero: 201,
            n: None,
            steady: SteadyOptions::default(),
            wave: WaveSettings::default(),
            tol_x: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure2Report {
    pub zero: Vec<ZeroDiffusionReport>,
    /// The two `eps = 0` patchworks differ inside the bistable interval.
    pub patchworks_differ: bool,
    pub steady: Vec<SteadyState>,
    /// Max-norm distance between the two diffusive steady states.
    pub steady_gap: f64,
    pub boundary: Option<BoundaryLocation>,
    /// Largest `|x*_eps - x*|` over the seeds.
    pub front_error: Option<f64>,
    /// `5 sqrt(eps) + 2h`.
    pub front_tolerance: f64,
    pub svg_zero: String,
    pub svg_steady: String,
}

/// Uniform random values per node, rearranged so that `A` is non-increasing
/// and `B` non-decreasing.
pub fn monotone_random_state(model: &CompetitionModel, grid: Grid1D, seed: u64) -> StateField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.len();
    let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=model.a_max())).collect();
    let mut b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=model.b_max())).collect();
    a.sort_by(|p, q| q.total_cmp(p));
    b.sort_by(|p, q| p.total_cmp(q));
    StateField { grid, a, b, t: 0.0 }
}

const COLORS: [&str; 2] = ["#c0392b", "#2c7fb8"];

fn zero_plot(model: &CompetitionModel, zero: &[ZeroDiffusionReport], x_b: f64, x_a: f64) -> String {
    let mut p = LinePlot::new("eps = 0: pointwise limits from random data", "x", "A (solid) / B (dashed)");
    for (k, r) in zero.iter().enumerate() {
        let a: Vec<(f64, f64)> = r.nodes.iter().map(|n| (n.x, n.a)).collect();
        let b: Vec<(f64, f64)> = r.nodes.iter().map(|n| (n.x, n.b)).collect();
        p.series.push(Series::line(&format!("A, seed {}", r.seed), COLORS[k % 2], a));
        p.series.push(Series::line(&format!("B, seed {}", r.seed), COLORS[k % 2], b).dashed());
    }
    p.x_range = Some((0.0, 1.0));
    p.y_range = Some((0.0, model.a_max().max(model.b_max()) * 1.05));
    p.guides = vec![(x_b, "x_b".into()), (x_a, "x_a".into())];
    p.render()
}

fn steady_plot(model: &CompetitionModel, steady: &[SteadyState], seeds: &[u64], eps: f64, x_star: Option<f64>) -> String {
    let mut p = LinePlot::new(&format!("eps = {eps:e}: steady states from random monotone data"), "x", "A (solid) / B (dashed)");
    for (k, s) in steady.iter().enumerate() {
        let g = s.state.grid;
        let a: Vec<(f64, f64)> = g.nodes().zip(&s.state.a).map(|(x, &v)| (x, v)).collect();
        let b: Vec<(f64, f64)> = g.nodes().zip(&s.state.b).map(|(x, &v)| (x, v)).collect();
        p.series.push(Series::line(&format!("A, seed {}", seeds[k]), COLORS[k % 2], a));
        p.series.push(Series::line(&format!("B, seed {}", seeds[k]), COLORS[k % 2], b).dashed());
    }
    p.x_range = Some((0.0, 1.0));
    p.y_range = Some((0.0, model.a_max().max(model.b_max()) * 1.05));
    if let Some(x) = x_star {
        p.guides.push((x, "c(x*) = 0".into()));
    }
    p.render()
}

/// Contrasts the seed-dependent `eps = 0` patchworks with the unique
/// monotone steady state at small diffusion.
pub fn reproduce_figure2(model: &CompetitionModel, options: &Figure2Options) -> Result<Figure2Report, ExperimentError> {
    let eps = options.eps_small;
    if !(eps > 0.0) {
        return Err(ExperimentError::Setting(format!("eps_small must be positive, got {eps}")));
    }
    let interval = find_bistable_interval(model)?;
    let grid = match options.n {
        Some(n) => Grid1D::new(n)?,
        None => Grid1D::auto(eps)?,
    };
    if options.steady.require_resolution && !grid.resolves(eps) {
        return Err(PdeError::Resolution { n: grid.len(), eps, required: Grid1D::required_nodes(eps) }.into());
    }

    let zero = options
        .seeds
        .iter()
        .map(|&s| zero_diffusion_demo(model, s, options.n_cells_zero))
        .collect::<Result<Vec<_>, _>>()?;
    let patchworks_differ = zero[0].differs_from(&zero[1]);

    let boundary = locate_boundary(model, options.tol_x, &options.wave)?;
    let steady = options
        .seeds
        .iter()
        .map(|&s| {
            let init = monotone_random_state(model, grid, s);
            run_to_steady(model, eps, grid, InitialCondition::Custom(init), &options.steady)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let steady_gap = steady[0].state.max_abs_diff(&steady[1].state);
    let front_error = steady
        .iter()
        .map(|s| s.front.map(|f| (f.x_star_eps - boundary.x_star).abs()))
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().fold(0.0, f64::max));
    let front_tolerance = 5.0 * eps.sqrt() + 2.0 * grid.h();
    info!(
        "figure2: patchworks differ = {patchworks_differ}, steady gap = {steady_gap:.2e}, front error = {front_error:?}"
    );

    let svg_zero = zero_plot(model, &zero, interval.x_b, interval.x_a);
    let svg_steady = steady_plot(model, &steady, &options.seeds, eps, Some(boundary.x_star));
    Ok(Figure2Report {
        zero,
        patchworks_differ,
        steady,
        steady_gap,
        boundary: Some(boundary),
        front_error,
        front_tolerance,
        svg_zero,
        svg_steady,
    })
}

impl Figure2Report {
    /// Per-node outcome labels of the zero-diffusion panels, one column per seed.
    pub fn ambiguity_map(&self) -> Vec<(f64, Vec<Outcome>)> {
        let n = self.zero[0].nodes.len();
        (0..n).map(|i| (self.zero[0].nodes[i].x, self.zero.iter().map(|r| r.nodes[i].outcome).collect())).collect()
    }
}
