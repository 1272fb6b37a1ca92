//! Discretization of `[0, 1]`, time integration of the parabolic system with
//! Robin boundaries, and diagnostics on the resulting states.

mod front;
mod grid;
pub mod ode;
mod robin;
mod steady;
mod stepper;
mod subsolution;
mod wkb;

use thiserror::Error;

pub use front::{front_position, front_position_scaled, FrontEstimate};
pub use grid::{Grid1D, StateField};
pub use robin::{assemble_robin_operator, RobinOperator};
pub use steady::{run_to_steady, InitialCondition, MonitorSummary, SteadyOptions, SteadyState};
pub use stepper::{reaction_update, step_parabolic, ParabolicStepper};
pub use subsolution::{subsolution_profile, Subsolution, SubsolutionProfile};
pub use wkb::{wkb_transform, WkbField, WKB_FLOOR};

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("grid error: {0}")]
    Grid(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(&'static str),
    #[error("state structure: {0}")]
    Structure(String),
    #[error("hypotheses fail:\n{0}")]
    Hypothesis(String),
    #[error("grid of {n} nodes does not resolve eps = {eps}; need at least {required}")]
    Resolution { n: usize, eps: f64, required: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no steady state after {steps} steps (t = {t}), residual {residual:e}")]
    NotConverged { steps: usize, t: f64, residual: f64, trace: Vec<(f64, f64)> },
}
