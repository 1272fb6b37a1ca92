//! Frozen-position traveling waves `-c a' - d_A a'' = a H_A(x, a, b)` and the
//! speed map `x -> c(x)` whose zero is the differentiation boundary.
//!
//! Sign convention: `c > 0` means the `A`-dominated state invades towards
//! larger `y`.

mod bvp;
mod map;
mod tracking;

use serde::Serialize;
use thiserror::Error;

use crate::model::{find_bistable_interval, BistableInterval, CompetitionModel, ModelError};

pub use bvp::solve_wave_bvp;
pub use map::{locate_boundary, speed_map, BoundaryLocation, SpeedSample};
pub use tracking::{front_tracking_speed, TrackingOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("x = {x} lies outside the bistable interval ({x_b}, {x_a})")]
    OutsideInterval { x: f64, x_b: f64, x_a: f64 },
    #[error("Newton stalled at x = {x} after {iterations} iterations, residual {residual:e}")]
    NotConverged { x: f64, iterations: usize, residual: f64 },
    #[error("singular wave Jacobian at x = {x}")]
    Singular { x: f64 },
    #[error("far field still off by {mismatch:e} at x = {x} with L = {half_length}")]
    FarField { x: f64, mismatch: f64, half_length: f64 },
    #[error("front left the domain at t = {t} (position {position}, L = {half_length}) at x = {x}")]
    DomainTooSmall { x: f64, t: f64, position: f64, half_length: f64 },
    #[error(
        "c does not change sign on the bistable interval: c({x_lo}) = {c_lo:e}, c({x_hi}) = {c_hi:e}; \
         the boundary sits at the {endpoint} end"
    )]
    BoundaryAtEndpoint { endpoint: &'static str, x_lo: f64, x_hi: f64, c_lo: f64, c_hi: f64 },
    #[error("invalid wave setting: {0}")]
    Setting(String),
}

/// Numerical knobs shared by the BVP and tracking solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSettings {
    /// Half-length `L`; `None` means `50 max(sqrt(d_A), sqrt(d_B))`.
    pub half_length: Option<f64>,
    /// Target node spacing in `y`.
    pub spacing: f64,
    /// Newton tolerance on the max-norm residual.
    pub tol: f64,
    pub max_iterations: usize,
    /// Double `L` until the far-field test passes.
    pub auto_extend: bool,
    /// Allowed deviation from the far-field equilibria at `y = +-L/2`.
    pub far_field_tol: f64,
    pub max_doublings: usize,
}

impl Default for WaveSettings {
    fn default() -> Self {
        Self {
            half_length: None,
            spacing: 0.02,
            tol: 1e-10,
            max_iterations: 60,
            auto_extend: true,
            far_field_tol: 1e-6,
            max_doublings: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveProblem {
    pub model: CompetitionModel,
    pub x_frozen: f64,
    pub settings: WaveSettings,
}

impl WaveProblem {
    pub fn new(model: &CompetitionModel, x_frozen: f64) -> Self {
        Self { model: model.clone(), x_frozen, settings: WaveSettings::default() }
    }

    pub fn with_settings(mut self, settings: WaveSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn half_length(&self) -> f64 {
        self.settings
            .half_length
            .unwrap_or_else(|| 50.0 * self.model.d_a().sqrt().max(self.model.d_b().sqrt()))
    }

    /// Odd node count so that `y = 0` is a node.
    pub fn nodes_for(&self, half_length: f64) -> usize {
        2 * (half_length / self.settings.spacing).ceil() as usize + 1
    }

    /// Far-field states `(F_A(x), F_B(x))`.
    pub fn far_field(&self) -> (f64, f64) {
        (self.model.f_a().value(self.x_frozen), self.model.f_b().value(self.x_frozen))
    }

    /// Checks the settings and that `x_frozen` is strictly bistable.
    pub fn validate(&self) -> Result<BistableInterval, WaveError> {
        let s = &self.settings;
        if !(s.spacing > 0.0) || !(s.tol > 0.0) || s.half_length.is_some_and(|l| !(l > 0.0)) {
            return Err(WaveError::Setting(format!("{s:?}")));
        }
        let interval = find_bistable_interval(&self.model)?;
        if !interval.contains(self.x_frozen) {
            return Err(WaveError::OutsideInterval { x: self.x_frozen, x_b: interval.x_b, x_a: interval.x_a });
        }
        Ok(interval)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveSolver {
    BvpNewton,
    FrontTracking,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveResult {
    pub x_frozen: f64,
    pub c: f64,
    pub half_length: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `|a(0) - b(0)|` for the BVP; distance of the tracked crossing from
    /// its fitted line for tracking.
    pub phase_error: f64,
    pub solver: WaveSolver,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    /// Largest deviation from the far-field equilibria at `y = +-L/2`.
    pub far_field_mismatch: f64,
    /// Max deviation of the tracked position from its linear fit.
    pub fit_residual: Option<f64>,
    pub warnings: Vec<String>,
}

impl WaveResult {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / (self.a.len() - 1) as f64
    }

    pub fn y(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.spacing()
    }

    /// Largest increase of `a` or decrease of `b` per unit `y`.
    pub fn monotonicity_violation(&self) -> f64 {
        let h = self.spacing();
        let up = self.a.windows(2).map(|w| (w[1] - w[0]) / h).fold(0.0, f64::max);
        let down = self.b.windows(2).map(|w| (w[0] - w[1]) / h).fold(0.0, f64::max);
        up.max(down)
    }

    /// `min(max a, max b)`.
    pub fn amplitude(&self) -> f64 {
        let ma = self.a.iter().cloned().fold(0.0, f64::max);
        let mb = self.b.iter().cloned().fold(0.0, f64::max);
        ma.min(mb)
    }

    /// Linear interpolation of the profiles at `y`, constant beyond `+-L`.
    pub fn sample(&self, y: f64) -> (f64, f64) {
        let n = self.a.len();
        let s = ((y + self.half_length) / self.spacing()).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        (
            self.a[i] + t * (self.a[i + 1] - self.a[i]),
            self.b[i] + t * (self.b[i + 1] - self.b[i]),
        )
    }
}

/// Largest deviation from the far-field equilibria at the nodes nearest
/// `y = -L/2` and `y = L/2`.
pub(crate) fn far_field_mismatch(a: &[f64], b: &[f64], fa: f64, fb: f64) -> f64 {
    let m = a.len();
    let left = (m - 1) / 4;
    let right = m - 1 - left;
    let l = (a[left] - fa).abs().max(b[left].abs());
    let r = a[right].abs().max((b[right] - fb).abs());
    l.max(r)
}

/// Warning text when `x` is close enough to an end of the bistable interval
/// that one far-field state is nearly marginal.
pub(crate) fn conditioning_warning(interval: &BistableInterval, x: f64) -> Option<String> {
    let rel = ((x - interval.x_b).min(interval.x_a - x)) / interval.width();
    (rel < 0.05).then(|| {
        format!(
            "x = {x} is within {:.1}% of the bistable interval end; the far field is nearly marginal and the \
             wave problem is ill-conditioned",
            100.0 * rel
        )
    })
}
