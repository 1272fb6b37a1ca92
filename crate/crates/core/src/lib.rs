//! Simulation and analysis of heterogeneous two-species competition
//! reaction-diffusion systems in the vanishing-diffusion limit.
//!
//! * [`model`] defines gradients, reactions, equilibria and hypotheses.
//! * [`pde`] integrates the parabolic system with Robin boundaries.
//! * [`wave`] computes frozen-position traveling-wave speeds.
//! * [`experiment`] runs diffusion sweeps and the zero-diffusion demo.
//! * [`config`] and [`output`] read run configurations and write CSV/SVG.
//! * [`cli`] is the command-line front end.

pub mod linalg;
pub mod pde;
pub mod model;
pub mod roots;
pub mod wave;
pub mod output;
pub mod experiment;
pub mod config;
pub mod cli;
