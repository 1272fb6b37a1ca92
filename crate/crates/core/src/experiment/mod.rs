//! Vanishing-diffusion sweeps, classification of the limit, the
//! zero-diffusion ambiguity and the two-panel gradient figure.

mod classify;
mod figure;
mod sweep;
mod zero;

use thiserror::Error;

use crate::model::ModelError;
use crate::pde::PdeError;
use crate::wave::WaveError;

pub use classify::{classify_limit, ScenarioClassification, Verdict, DEFAULT_SUPPORT_THRESHOLD};
pub use figure::{monotone_random_state, reproduce_figure2, Figure2Options, Figure2Report};
pub use sweep::{epsilon_sweep, SweepEntry, SweepOptions, SweepReport};
pub use zero::{zero_diffusion_demo, NodeOutcome, Outcome, ZeroDiffusionReport};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error("invalid experiment setting: {0}")]
    Setting(String),
}
