//! Time marching to the stationary solution with the invariant monitors of
//! the parabolic problem.

use log::{debug, info};
use serde::Serialize;

use super::ode::{integrate_node, ODE_DT, ODE_T_MAX};
use super::{front_position_scaled, FrontEstimate, Grid1D, ParabolicStepper, PdeError, StateField};
use crate::model::{find_bistable_interval, verify_hypotheses, CompetitionModel, DEFAULT_SAMPLES};

/// Monitor tolerance for bounds and time monotonicity.
pub const MONITOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `A = 0`, `B = F_B(1)`.
    Corner,
    /// `A = F_A s`, `B = F_B (1 - s)` with `s` a decreasing tanh step of
    /// width `2 sqrt(eps)` centred at `center` (default: middle of the
    /// bistable interval).
    MonotoneRamp { center: Option<f64> },
    Custom(StateField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyOptions {
    pub tol: f64,
    /// Refuse to run unless every hypothesis holds.
    pub strict: bool,
    /// Refuse grids with `h > sqrt(eps) / 10`.
    pub require_resolution: bool,
    pub max_steps: usize,
    /// Time-step cap; `None` uses `0.1 / sup|H|`.
    pub dt_max: Option<f64>,
    /// Keep every `k`-th accepted state.
    pub snapshot_every: Option<usize>,
    /// Record `(t, residual)` every this many accepted steps.
    pub trace_every: usize,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            strict: true,
            require_resolution: true,
            max_steps: 5_000_000,
            dt_max: None,
            snapshot_every: None,
            trace_every: 1000,
        }
    }
}

impl SteadyOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Worst monitor readings over all accepted steps.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MonitorSummary {
    pub accepted: usize,
    pub rejected: usize,
    pub monotone_mode: bool,
    pub time_monitor: bool,
    pub max_bound_violation: f64,
    pub max_space_violation: f64,
    /// Largest decrease of `A` or increase of `B` between accepted steps.
    pub max_time_violation: f64,
    pub final_dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub state: StateField,
    pub eps: f64,
    pub residual: f64,
    pub iterations: usize,
    /// `None` when `A - B` has no unique crossing (possible only for
    /// non-monotone data or `eps = 0`).
    pub front: Option<FrontEstimate>,
    pub monitors: MonitorSummary,
    pub residual_trace: Vec<(f64, f64)>,
    pub snapshots: Vec<StateField>,
}

fn initial_state(model: &CompetitionModel, eps: f64, grid: Grid1D, init: &InitialCondition) -> Result<StateField, PdeError> {
    Ok(match init {
        InitialCondition::Corner => StateField::from_fn(grid, |_| (0.0, model.b_max())),
        InitialCondition::MonotoneRamp { center } => {
            let c = match center {
                Some(c) => *c,
                None => find_bistable_interval(model).map(|i| i.midpoint()).unwrap_or(0.5),
            };
            let w = (2.0 * eps.sqrt()).max(grid.h());
            StateField::from_fn(grid, |x| {
                let s = 0.5 * (1.0 - ((x - c) / w).tanh());
                (model.f_a().value(x) * s, model.f_b().value(x) * (1.0 - s))
            })
        }
        InitialCondition::Custom(s) => {
            if s.grid != grid {
                return Err(PdeError::Grid("custom initial state lives on a different grid".into()));
            }
            let mut s = s.clone();
            s.t = 0.0;
            s
        }
    })
}

fn time_violation(old: &StateField, new: &StateField) -> f64 {
    let a = old.a.iter().zip(&new.a).map(|(o, n)| o - n).fold(0.0, f64::max);
    let b = old.b.iter().zip(&new.b).map(|(o, n)| n - o).fold(0.0, f64::max);
    a.max(b)
}

/// Integrates from `init` until the stationary residual is below
/// `options.tol`. `eps = 0` integrates each node independently.
pub fn run_to_steady(
    model: &CompetitionModel,
    eps: f64,
    grid: Grid1D,
    init: InitialCondition,
    options: &SteadyOptions,
) -> Result<SteadyState, PdeError> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(PdeError::Domain(format!("diffusion scale must be >= 0, got {eps}")));
    }
    if options.strict {
        let report = verify_hypotheses(model, DEFAULT_SAMPLES);
        if !report.all_passed() {
            return Err(PdeError::Hypothesis(report.to_string()));
        }
    }
    if options.require_resolution && !grid.resolves(eps) {
        return Err(PdeError::Resolution { n: grid.len(), eps, required: Grid1D::required_nodes(eps) });
    }
    let is_corner = matches!(init, InitialCondition::Corner);
    let state = initial_state(model, eps, grid, &init)?;
    if eps == 0.0 {
        return zero_diffusion(model, state, options);
    }

    let a_max = model.a_max();
    let space_tol = MONITOR_TOL * a_max;
    let monotone_mode = state.is_monotone(space_tol);
    let mut monitors = MonitorSummary { monotone_mode, time_monitor: is_corner, ..Default::default() };
    let bound0 = state.bound_violation(model);
    if bound0 > MONITOR_TOL {
        return Err(PdeError::Invariant(format!("initial state leaves the invariant box by {bound0:e}")));
    }

    let dt_max = options.dt_max.unwrap_or(0.1 / model.reaction_sup());
    let dt_min = dt_max * 2f64.powi(-30);
    let mut dt = dt_max / 16.0;
    let mut stepper = ParabolicStepper::new(model, eps, grid)?;
    let mut state = state;
    let mut residual = stepper.residual(&state);
    let mut trace = vec![(0.0, residual)];
    let mut snapshots = Vec::new();
    info!("steady: eps={eps:e} n={} dt_max={dt_max:.3e} monotone={monotone_mode}", grid.len());

    while residual > options.tol {
        if monitors.accepted >= options.max_steps {
            trace.push((state.t, residual));
            return Err(PdeError::NotConverged { steps: monitors.accepted, t: state.t, residual, trace });
        }
        let next = stepper.step(&state, dt)?;
        let bound = next.bound_violation(model);
        let space = if monotone_mode { next.monotonicity_violation() } else { 0.0 };
        let time = if is_corner { time_violation(&state, &next) } else { 0.0 };
        if bound > MONITOR_TOL || space > space_tol || time > MONITOR_TOL {
            monitors.rejected += 1;
            dt *= 0.5;
            debug!("rejected step at t={}: bound={bound:e} space={space:e} time={time:e}", state.t);
            if dt < dt_min {
                return Err(PdeError::Invariant(format!(
                    "monitors still fail at dt={dt:e} (bound {bound:e}, space {space:e}, time {time:e})"
                )));
            }
            continue;
        }
        monitors.accepted += 1;
        monitors.max_bound_violation = monitors.max_bound_violation.max(bound);
        monitors.max_space_violation = monitors.max_space_violation.max(space);
        monitors.max_time_violation = monitors.max_time_violation.max(time);
        monitors.final_dt = dt;
        state = next;
        residual = stepper.residual(&state);
        if monitors.accepted % options.trace_every.max(1) == 0 {
            trace.push((state.t, residual));
        }
        if let Some(k) = options.snapshot_every {
            if k > 0 && monitors.accepted % k == 0 {
                snapshots.push(state.clone());
            }
        }
        dt = (2.0 * dt).min(dt_max);
    }
    trace.push((state.t, residual));
    info!("steady: converged after {} steps, t={:.1}, residual={residual:.2e}", monitors.accepted, state.t);
    let front = front_position_scaled(&state, a_max).ok();
    Ok(SteadyState {
        state,
        eps,
        residual,
        iterations: monitors.accepted,
        front,
        monitors,
        residual_trace: trace,
        snapshots,
    })
}

fn zero_diffusion(model: &CompetitionModel, init: StateField, options: &SteadyOptions) -> Result<SteadyState, PdeError> {
    let grid = init.grid;
    let mut state = init.clone();
    let mut t_end: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for (i, x) in grid.nodes().enumerate() {
        let r = integrate_node(model, x, (init.a[i], init.b[i]), ODE_DT, ODE_T_MAX);
        state.a[i] = r.a;
        state.b[i] = r.b;
        t_end = t_end.max(r.t);
        let (fa, fb) = (model.f_a().value(x), model.f_b().value(x));
        let f = (r.a * model.h_a(fa, r.a, r.b)).abs() + (r.b * model.h_b(fb, r.a, r.b)).abs();
        residual = residual.max(f);
    }
    state.t = t_end;
    let steps = (t_end / ODE_DT).round() as usize;
    if residual > options.tol {
        return Err(PdeError::NotConverged { steps, t: t_end, residual, trace: vec![(t_end, residual)] });
    }
    let front = front_position_scaled(&state, model.a_max()).ok();
    Ok(SteadyState {
        state,
        eps: 0.0,
        residual,
        iterations: steps,
        front,
        monitors: MonitorSummary { accepted: steps, final_dt: ODE_DT, ..Default::default() },
        residual_trace: vec![(t_end, residual)],
        snapshots: Vec::new(),
    })
}
