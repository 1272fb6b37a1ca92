use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentError;
use crate::model::{equilibria, find_bistable_interval, BistableInterval, CompetitionModel};
use crate::pde::ode::{integrate_node, ODE_DT, ODE_T_MAX};
use crate::pde::{Grid1D, StateField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// `(F_A(x), 0)`
    A,
    /// `(0, F_B(x))`
    B,
    Origin,
    Saddle,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::A => "A",
            Outcome::B => "B",
            Outcome::Origin => "origin",
            Outcome::Saddle => "saddle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeOutcome {
    pub x: f64,
    pub a0: f64,
    pub b0: f64,
    pub a: f64,
    pub b: f64,
    pub outcome: Outcome,
    /// Max-norm distance to that equilibrium.
    pub distance: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroDiffusionReport {
    pub seed: u64,
    pub interval: BistableInterval,
    pub nodes: Vec<NodeOutcome>,
}

impl ZeroDiffusionReport {
    fn inside(&self) -> impl Iterator<Item = &NodeOutcome> {
        self.nodes.iter().filter(|n| self.interval.contains(n.x))
    }

    /// `(to A, to B)` counts among nodes inside the bistable interval.
    pub fn bistable_split(&self) -> (usize, usize) {
        self.inside().fold((0, 0), |(a, b), n| match n.outcome {
            Outcome::A => (a + 1, b),
            Outcome::B => (a, b + 1),
            _ => (a, b),
        })
    }

    /// Both pure states occur inside the bistable interval.
    pub fn is_ambiguous(&self) -> bool {
        let (a, b) = self.bistable_split();
        a > 0 && b > 0
    }

    /// Nodes outside the interval that did not reach the unique stable state.
    pub fn outside_mismatches(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| {
                (n.x < self.interval.x_b && n.outcome != Outcome::A) || (n.x > self.interval.x_a && n.outcome != Outcome::B)
            })
            .count()
    }

    /// Whether the two patchworks differ somewhere inside the interval.
    pub fn differs_from(&self, other: &ZeroDiffusionReport) -> bool {
        self.nodes
            .iter()
            .zip(&other.nodes)
            .any(|(p, q)| self.interval.contains(p.x) && p.outcome != q.outcome)
    }

    pub fn max_distance(&self) -> f64 {
        self.nodes.iter().map(|n| n.distance).fold(0.0, f64::max)
    }

    pub fn to_state(&self, grid: Grid1D) -> StateField {
        let a = self.nodes.iter().map(|n| n.a).collect();
        let b = self.nodes.iter().map(|n| n.b).collect();
        StateField { grid, a, b, t: 0.0 }
    }
}

/// Integrates the pointwise system from uniformly random initial values in
/// `[0, F_A(0)] x [0, F_B(1)]` at `n_cells` evenly spaced positions.
pub fn zero_diffusion_demo(model: &CompetitionModel, seed: u64, n_cells: usize) -> Result<ZeroDiffusionReport, ExperimentError> {
    let grid = Grid1D::new(n_cells).map_err(|e| ExperimentError::Setting(e.to_string()))?;
    let interval = find_bistable_interval(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inits: Vec<(f64, f64)> =
        (0..n_cells).map(|_| (rng.gen_range(0.0..=model.a_max()), rng.gen_range(0.0..=model.b_max()))).collect();
    let nodes = inits
        .par_iter()
        .enumerate()
        .map(|(i, &(a0, b0))| {
            let x = grid.x(i);
            let r = integrate_node(model, x, (a0, b0), ODE_DT, ODE_T_MAX);
            let set = equilibria(model, x)?;
            let (p, distance) = set.nearest(r.a, r.b);
            let outcome = if std::ptr::eq(p, &set.e_a) {
                Outcome::A
            } else if std::ptr::eq(p, &set.e_b) {
                Outcome::B
            } else if std::ptr::eq(p, &set.origin) {
                Outcome::Origin
            } else {
                Outcome::Saddle
            };
            Ok(NodeOutcome { x, a0, b0, a: r.a, b: r.b, outcome, distance, converged: r.converged })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(ZeroDiffusionReport { seed, interval, nodes })
}
