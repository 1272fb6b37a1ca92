//! Speed oracle by direct simulation of the homogeneous parabolic system at
//! frozen `x` on `[-L, L]`, tracking where `a = b`.
//!
//! Strang splitting: half a reaction step (RK4 per node), a Crank-Nicolson
//! diffusion step, half a reaction step.

use serde::Serialize;

use super::{far_field_mismatch, WaveError, WaveProblem, WaveResult, WaveSolver};
use crate::linalg::TridiagonalLu;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackingOptions {
    pub t_horizon: f64,
    pub dt: f64,
    /// The run fails once the front comes this close to `+-L`.
    pub edge_margin: f64,
    /// Shift the window by whole nodes whenever the front drifts past
    /// `L/4`, so fast fronts never reach the edge.
    pub recenter: bool,
}

impl Default for TrackingOptions {
    fn default() -> Self {
        Self { t_horizon: 60.0, dt: 0.01, edge_margin: 10.0, recenter: true }
    }
}

impl TrackingOptions {
    pub fn with_horizon(t_horizon: f64) -> Self {
        Self { t_horizon, ..Self::default() }
    }
}

fn crank_nicolson(m: usize, r: f64) -> Option<TridiagonalLu> {
    let mut lower = vec![-r; m];
    let mut diag = vec![1.0 + 2.0 * r; m];
    let mut upper = vec![-r; m];
    lower[0] = 0.0;
    upper[0] = 0.0;
    diag[0] = 1.0;
    lower[m - 1] = 0.0;
    upper[m - 1] = 0.0;
    diag[m - 1] = 1.0;
    TridiagonalLu::factor(&lower, &diag, &upper)
}

fn diffuse(u: &mut [f64], scratch: &mut Vec<f64>, r: f64, lu: &TridiagonalLu) {
    let m = u.len();
    scratch.clear();
    scratch.push(u[0]);
    for i in 1..m - 1 {
        scratch.push(r * u[i - 1] + (1.0 - 2.0 * r) * u[i] + r * u[i + 1]);
    }
    scratch.push(u[m - 1]);
    lu.solve(scratch);
    u.copy_from_slice(scratch);
}

/// Moves the profiles `k` nodes to the left (`k > 0`) or right, filling
/// with the far-field states.
fn shift(u: &mut [f64], k: isize) {
    let m = u.len();
    if k > 0 {
        let k = k as usize;
        u.copy_within(k.., 0);
        let edge = u[m - 1 - k];
        u[m - k..].fill(edge);
    } else if k < 0 {
        let k = (-k) as usize;
        u.copy_within(..m - k, k);
        let edge = u[k];
        u[..k].fill(edge);
    }
}

/// Position of the `a - b` sign change, linearly interpolated.
fn crossing(a: &[f64], b: &[f64], y0: f64, dy: f64) -> Option<f64> {
    (0..a.len() - 1).find_map(|i| {
        let (g0, g1) = (a[i] - b[i], a[i + 1] - b[i + 1]);
        (g0 > 0.0 && g1 <= 0.0).then(|| y0 + (i as f64 + g0 / (g0 - g1)) * dy)
    })
}

/// Least-squares slope and intercept of `p(t)` and the max deviation from the line.
fn fit_line(samples: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let (st, sp) = samples.iter().fold((0.0, 0.0), |(a, b), (t, p)| (a + t, b + p));
    let (mt, mp) = (st / n, sp / n);
    let (mut stt, mut stp) = (0.0, 0.0);
    for (t, p) in samples {
        stt += (t - mt) * (t - mt);
        stp += (t - mt) * (p - mp);
    }
    let slope = stp / stt;
    let intercept = mp - slope * mt;
    let dev = samples.iter().map(|(t, p)| (p - intercept - slope * t).abs()).fold(0.0, f64::max);
    (slope, intercept, dev)
}

/// Estimates `c(x)` from the long-time drift of the `a = b` crossing.
pub fn front_tracking_speed(problem: &WaveProblem, options: &TrackingOptions) -> Result<WaveResult, WaveError> {
    problem.validate()?;
    if !(options.dt > 0.0) || !(options.t_horizon > 3.0 * options.dt) {
        return Err(WaveError::Setting(format!("{options:?}")));
    }
    let x = problem.x_frozen;
    let model = &problem.model;
    let (fa, fb) = problem.far_field();
    let half_length = problem.half_length();
    let m = problem.nodes_for(half_length);
    let dy = 2.0 * half_length / (m - 1) as f64;
    let width = model.d_a().sqrt().max(model.d_b().sqrt());

    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for i in 0..m {
        let s = 0.5 * (1.0 - ((-half_length + i as f64 * dy) / width).tanh());
        a.push(fa * s);
        b.push(fb * (1.0 - s));
    }
    a[0] = fa;
    b[0] = 0.0;
    a[m - 1] = 0.0;
    b[m - 1] = fb;

    let dt = options.dt;
    let steps = (options.t_horizon / dt).round() as usize;
    let (ra, rb) = (0.5 * dt * model.d_a() / (dy * dy), 0.5 * dt * model.d_b() / (dy * dy));
    let lu_a = crank_nicolson(m, ra).ok_or(WaveError::Singular { x })?;
    let lu_b = crank_nicolson(m, rb).ok_or(WaveError::Singular { x })?;
    let (sa, sb) = (model.s_a(), model.s_b());
    let field = |a: f64, b: f64| (a * (fa - a - sa * b), b * (fb - b - sb * a));
    let react = |a: &mut [f64], b: &mut [f64], h: f64| {
        for i in 1..a.len() - 1 {
            let (u, v) = (a[i], b[i]);
            let k1 = field(u, v);
            let k2 = field(u + 0.5 * h * k1.0, v + 0.5 * h * k1.1);
            let k3 = field(u + 0.5 * h * k2.0, v + 0.5 * h * k2.1);
            let k4 = field(u + h * k3.0, v + h * k3.1);
            a[i] = u + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            b[i] = v + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
    };

    let fit_from = steps - steps / 3;
    let mut samples = Vec::with_capacity(steps / 3 + 1);
    let mut scratch = Vec::with_capacity(m);
    let limit = half_length - options.edge_margin;
    let mut offset = 0.0;
    for k in 1..=steps {
        react(&mut a, &mut b, 0.5 * dt);
        diffuse(&mut a, &mut scratch, ra, &lu_a);
        diffuse(&mut b, &mut scratch, rb, &lu_b);
        react(&mut a, &mut b, 0.5 * dt);
        let t = k as f64 * dt;
        let mut p = crossing(&a, &b, -half_length, dy)
            .ok_or(WaveError::DomainTooSmall { x, t, position: f64::NAN, half_length })?;
        if options.recenter && p.abs() > 0.25 * half_length {
            let n = (p / dy).round() as isize;
            shift(&mut a, n);
            shift(&mut b, n);
            offset += n as f64 * dy;
            p -= n as f64 * dy;
        }
        if p.abs() > limit {
            return Err(WaveError::DomainTooSmall { x, t, position: p + offset, half_length });
        }
        if k >= fit_from {
            samples.push((t, p + offset));
        }
    }
    let (c, _, dev) = fit_line(&samples);
    Ok(WaveResult {
        x_frozen: x,
        c,
        half_length,
        far_field_mismatch: far_field_mismatch(&a, &b, fa, fb),
        a,
        b,
        phase_error: 0.0,
        solver: WaveSolver::FrontTracking,
        converged: true,
        iterations: steps,
        residual: dev,
        fit_residual: Some(dev),
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CompetitionModel;

    #[test]
    fn line_fit_recovers_slope() {
        let s: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.3 * i as f64 - 1.0)).collect();
        let (c, b, dev) = fit_line(&s);
        assert!((c - 0.3).abs() < 1e-14 && (b + 1.0).abs() < 1e-13 && dev < 1e-13);
    }

    #[test]
    fn crossing_interpolates() {
        let a = [1.0, 0.6, 0.2];
        let b = [0.0, 0.4, 0.8];
        let p = crossing(&a, &b, -1.0, 1.0).unwrap();
        // g = 1, 0.2, -0.6: crossing at 1 + 0.2 / 0.8 = 1.25 nodes from y0.
        assert!((p - 0.25).abs() < 1e-14);
    }

    #[test]
    fn shift_fills_with_far_field() {
        let mut u = vec![2.0, 2.0, 1.0, 0.0, 0.0];
        shift(&mut u, 1);
        assert_eq!(u, vec![2.0, 1.0, 0.0, 0.0, 0.0]);
        shift(&mut u, -2);
        assert_eq!(u, vec![2.0, 2.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn fixed_window_reports_escape() {
        let m = CompetitionModel::reference_linear();
        let opts = TrackingOptions { recenter: false, t_horizon: 80.0, ..TrackingOptions::default() };
        let r = front_tracking_speed(&WaveProblem::new(&m, 0.3), &opts);
        assert!(matches!(r, Err(WaveError::DomainTooSmall { .. })));
    }

    #[test]
    fn symmetric_point_stays_put() {
        let m = CompetitionModel::reference_linear();
        let r = front_tracking_speed(&WaveProblem::new(&m, 0.5), &TrackingOptions::with_horizon(30.0)).unwrap();
        assert!(r.c.abs() <= 1e-3, "{}", r.c);
    }
}
