//! Newton solver for the pinned traveling-wave boundary value problem.
//!
//! Unknowns are interleaved per node as `(a_i, b_i, c_i)`; the speed is
//! carried as a grid function with `c' = 0`, and the one missing equation is
//! the pinning `a(0) = b(0)` at the centre node. This keeps the system
//! banded, and partial pivoting copes with the near-singular translation
//! mode of the unbordered Jacobian.

use log::{debug, warn};

use super::{conditioning_warning, far_field_mismatch, WaveError, WaveProblem, WaveResult, WaveSolver};
use crate::linalg::BandedMatrix;

const MAX_HALVINGS: usize = 20;

struct Ctx {
    fa: f64,
    fb: f64,
    sa: f64,
    sb: f64,
    da: f64,
    db: f64,
    dy: f64,
    m: usize,
    center: usize,
}

impl Ctx {
    fn residual(&self, u: &[f64], out: &mut [f64]) {
        let (m, dy) = (self.m, self.dy);
        let a = |i: usize| u[3 * i];
        let b = |i: usize| u[3 * i + 1];
        let c = |i: usize| u[3 * i + 2];
        for i in 0..m {
            let (ra, rb) = if i == 0 {
                (a(0) - self.fa, b(0))
            } else if i == m - 1 {
                (a(i), b(i) - self.fb)
            } else {
                let (ai, bi, ci) = (a(i), b(i), c(i));
                let ha = self.fa - ai - self.sa * bi;
                let hb = self.fb - bi - self.sb * ai;
                let da1 = (a(i + 1) - a(i - 1)) / (2.0 * dy);
                let db1 = (b(i + 1) - b(i - 1)) / (2.0 * dy);
                let da2 = (a(i + 1) - 2.0 * ai + a(i - 1)) / (dy * dy);
                let db2 = (b(i + 1) - 2.0 * bi + b(i - 1)) / (dy * dy);
                (-ci * da1 - self.da * da2 - ai * ha, -ci * db1 - self.db * db2 - bi * hb)
            };
            out[3 * i] = ra;
            out[3 * i + 1] = rb;
            out[3 * i + 2] = match i.cmp(&self.center) {
                std::cmp::Ordering::Less => c(i + 1) - c(i),
                std::cmp::Ordering::Greater => c(i) - c(i - 1),
                std::cmp::Ordering::Equal => a(i) - b(i),
            };
        }
    }

    fn jacobian(&self, u: &[f64]) -> BandedMatrix {
        let (m, dy) = (self.m, self.dy);
        let mut j = BandedMatrix::zeros(3 * m, 3, 3);
        for i in 0..m {
            let (ra, rb, rc) = (3 * i, 3 * i + 1, 3 * i + 2);
            if i == 0 || i == m - 1 {
                j.set(ra, ra, 1.0);
                j.set(rb, rb, 1.0);
            } else {
                let (ai, bi, ci) = (u[3 * i], u[3 * i + 1], u[3 * i + 2]);
                let ha = self.fa - ai - self.sa * bi;
                let hb = self.fb - bi - self.sb * ai;
                let conv = ci / (2.0 * dy);
                let (ka, kb) = (self.da / (dy * dy), self.db / (dy * dy));
                j.set(ra, ra - 3, conv - ka);
                j.set(ra, ra + 3, -conv - ka);
                j.set(ra, ra, 2.0 * ka - ha + ai);
                j.set(ra, ra + 1, self.sa * ai);
                j.set(ra, ra + 2, -(u[3 * (i + 1)] - u[3 * (i - 1)]) / (2.0 * dy));
                j.set(rb, rb - 3, conv - kb);
                j.set(rb, rb + 3, -conv - kb);
                j.set(rb, rb, 2.0 * kb - hb + bi);
                j.set(rb, rb - 1, self.sb * bi);
                j.set(rb, rb + 1, -(u[3 * (i + 1) + 1] - u[3 * (i - 1) + 1]) / (2.0 * dy));
            }
            match i.cmp(&self.center) {
                std::cmp::Ordering::Less => {
                    j.set(rc, rc, -1.0);
                    j.set(rc, rc + 3, 1.0);
                }
                std::cmp::Ordering::Greater => {
                    j.set(rc, rc, 1.0);
                    j.set(rc, rc - 3, -1.0);
                }
                std::cmp::Ordering::Equal => {
                    j.set(rc, ra, 1.0);
                    j.set(rc, rb, -1.0);
                }
            }
        }
        j
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn newton(problem: &WaveProblem, half_length: f64, guess: Option<&WaveResult>) -> Result<WaveResult, WaveError> {
    let x = problem.x_frozen;
    let model = &problem.model;
    let (fa, fb) = problem.far_field();
    let m = problem.nodes_for(half_length);
    let dy = 2.0 * half_length / (m - 1) as f64;
    let ctx = Ctx { fa, fb, sa: model.s_a(), sb: model.s_b(), da: model.d_a(), db: model.d_b(), dy, m, center: (m - 1) / 2 };

    let mut u = vec![0.0; 3 * m];
    let c0 = guess.map_or(0.0, |g| g.c);
    let width = model.d_a().sqrt().max(model.d_b().sqrt());
    for i in 0..m {
        let y = -half_length + i as f64 * dy;
        let (a, b) = match guess {
            Some(g) => g.sample(y),
            None => {
                let s = 0.5 * (1.0 - (y / width).tanh());
                (fa * s, fb * (1.0 - s))
            }
        };
        u[3 * i] = a;
        u[3 * i + 1] = b;
        u[3 * i + 2] = c0;
    }
    // Exact far-field values even when the guess came from another x.
    u[0] = fa;
    u[1] = 0.0;
    u[3 * (m - 1)] = 0.0;
    u[3 * (m - 1) + 1] = fb;

    let mut f = vec![0.0; 3 * m];
    let mut trial_f = vec![0.0; 3 * m];
    ctx.residual(&u, &mut f);
    let mut res = max_norm(&f);
    let mut iterations = 0;
    while res > problem.settings.tol {
        if iterations >= problem.settings.max_iterations {
            return Err(WaveError::NotConverged { x, iterations, residual: res });
        }
        iterations += 1;
        let lu = ctx.jacobian(&u).factor().ok_or(WaveError::Singular { x })?;
        let mut step: Vec<f64> = f.iter().map(|v| -v).collect();
        lu.solve(&mut step);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(v, s)| v + lambda * s).collect();
            ctx.residual(&trial, &mut trial_f);
            let r = max_norm(&trial_f);
            if r < res {
                u = trial;
                std::mem::swap(&mut f, &mut trial_f);
                res = r;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        debug!("wave x={x}: iteration {iterations}, lambda={lambda}, residual={res:.3e}");
        if !accepted {
            return Err(WaveError::NotConverged { x, iterations, residual: res });
        }
    }

    let a: Vec<f64> = (0..m).map(|i| u[3 * i]).collect();
    let b: Vec<f64> = (0..m).map(|i| u[3 * i + 1]).collect();
    let center = ctx.center;
    Ok(WaveResult {
        x_frozen: x,
        c: u[3 * center + 2],
        half_length,
        phase_error: (a[center] - b[center]).abs(),
        far_field_mismatch: far_field_mismatch(&a, &b, fa, fb),
        a,
        b,
        solver: WaveSolver::BvpNewton,
        converged: true,
        iterations,
        residual: res,
        fit_residual: None,
        warnings: Vec::new(),
    })
}

/// Solves for the profiles and speed at `problem.x_frozen`, doubling `L`
/// while the far field is not yet reached.
pub fn solve_wave_bvp(problem: &WaveProblem, initial_guess: Option<&WaveResult>) -> Result<WaveResult, WaveError> {
    let interval = problem.validate()?;
    let settings = &problem.settings;
    let mut half_length = problem.half_length();
    let mut guess = initial_guess.cloned();
    for _ in 0..=settings.max_doublings {
        let mut r = newton(problem, half_length, guess.as_ref())?;
        if let Some(w) = conditioning_warning(&interval, problem.x_frozen) {
            warn!("{w}");
            r.warnings.push(w);
        }
        if r.far_field_mismatch <= settings.far_field_tol {
            return Ok(r);
        }
        if !settings.auto_extend {
            r.warnings.push(format!("far-field mismatch {:.2e} exceeds tolerance", r.far_field_mismatch));
            return Ok(r);
        }
        debug!("wave x={}: L={half_length} leaves far-field mismatch {:.2e}, doubling", problem.x_frozen, r.far_field_mismatch);
        guess = Some(r);
        half_length *= 2.0;
    }
    let r = guess.expect("at least one solve");
    Err(WaveError::FarField { x: problem.x_frozen, mismatch: r.far_field_mismatch, half_length: r.half_length })
}
