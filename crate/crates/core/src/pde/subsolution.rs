//! Explicit lower barrier for `A_eps` near `x = 0`.
//!
//! Freezing the worst-case reaction rate turns the `A` equation into
//! `-eps d_A phi'' = -d_A mu phi` with the same Robin data, whose solution
//! `phi = alpha e^{kx} + beta e^{-kx}`, `k = sqrt(mu/eps)`, lies below `A_eps`.

use serde::Serialize;

use crate::model::CompetitionModel;

const MIN_SAMPLES: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsolutionProfile {
    pub eps: f64,
    /// `-min_{0<=s<=F_A(0)} H_A(1, s, F_B(1)) / d_A`
    pub mu: f64,
    pub alpha_eps: f64,
    pub beta_eps: f64,
    /// `F_A(0) / (sqrt(mu) + 1)`, the `eps -> 0` limit of `beta_eps`.
    pub beta_limit: f64,
    /// `phi(0) = alpha_eps + beta_eps`.
    pub delta_a: f64,
    /// Largest `eps` (capped at 1) below which the profile stays in `(0, F_A(0)]`.
    pub eps0: f64,
    a_max: f64,
}

/// Outcome of the barrier construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Subsolution {
    Profile(SubsolutionProfile),
    /// `mu <= 0`: the reaction never pulls `A` down at `x = 1`, no barrier
    /// is needed.
    NotNeeded { mu: f64 },
}

fn worst_rate(model: &CompetitionModel) -> f64 {
    let fa1 = model.f_a().value(1.0);
    let b1 = model.b_max();
    let a_max = model.a_max();
    (0..MIN_SAMPLES)
        .map(|i| a_max * i as f64 / (MIN_SAMPLES - 1) as f64)
        .map(|s| model.h_a(fa1, s, b1))
        .fold(f64::INFINITY, f64::min)
}

/// `(alpha_eps, beta_eps)` for given `mu`, `eps`.
fn amplitudes(mu: f64, eps: f64, a_max: f64) -> (f64, f64) {
    let r = mu.sqrt();
    let q = (r - 1.0) / (r + 1.0);
    let decay = (-2.0 * (mu / eps).sqrt()).exp();
    let beta = a_max / (r + 1.0) / (1.0 - q * q * decay);
    (beta * q * decay, beta)
}

/// `|alpha| e^{k} + beta <= F_A(0)`, the bound that places the profile below
/// the invariant box.
fn within_box(mu: f64, eps: f64, a_max: f64) -> bool {
    let (alpha, beta) = amplitudes(mu, eps, a_max);
    let k = (mu / eps).sqrt();
    alpha.abs() * k.exp() + beta <= a_max
}

pub fn subsolution_profile(model: &CompetitionModel, eps: f64) -> Subsolution {
    let mu = -worst_rate(model) / model.d_a();
    if !(mu > 0.0) {
        return Subsolution::NotNeeded { mu };
    }
    let a_max = model.a_max();
    let (alpha_eps, beta_eps) = amplitudes(mu, eps, a_max);
    let eps0 = if within_box(mu, 1.0, a_max) {
        1.0
    } else {
        // The bound holds as eps -> 0; bisect in log(eps) for the threshold.
        let (mut lo, mut hi) = (-40.0f64, 0.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if within_box(mu, mid.exp(), a_max) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo.exp()
    };
    Subsolution::Profile(SubsolutionProfile {
        eps,
        mu,
        alpha_eps,
        beta_eps,
        beta_limit: a_max / (mu.sqrt() + 1.0),
        delta_a: alpha_eps + beta_eps,
        eps0,
        a_max,
    })
}

impl SubsolutionProfile {
    pub fn value(&self, x: f64) -> f64 {
        let k = (self.mu / self.eps).sqrt();
        // alpha e^{kx} is formed as beta q e^{k(x-2)} to avoid overflow.
        let q = self.alpha_eps / self.beta_eps * (2.0 * k).exp();
        let grow = if q == 0.0 || !q.is_finite() {
            self.alpha_eps * (k * x).exp()
        } else {
            self.beta_eps * q * (k * (x - 2.0)).exp()
        };
        grow + self.beta_eps * (-k * x).exp()
    }

    /// `alpha_eps e^{sqrt(mu/eps)}`, which vanishes as `eps -> 0`.
    pub fn growing_amplitude_at_one(&self) -> f64 {
        let k = (self.mu / self.eps).sqrt();
        let r = self.mu.sqrt();
        self.beta_eps * (r - 1.0) / (r + 1.0) * (-k).exp()
    }

    pub fn upper_bound(&self) -> f64 {
        self.growing_amplitude_at_one().abs() + self.beta_eps
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(eps: f64) -> SubsolutionProfile {
        match subsolution_profile(&CompetitionModel::reference_linear(), eps) {
            Subsolution::Profile(p) => p,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reference_rate_and_limit() {
        // min over s of 0.5 - s - 4 is reached at s = 2.
        let p = profile(1e-4);
        assert!((p.mu - 5.5).abs() < 1e-14);
        assert!((p.beta_limit - 2.0 / (5.5f64.sqrt() + 1.0)).abs() < 1e-15);
        assert!((p.beta_limit - 0.5979).abs() < 1e-4);
    }

    #[test]
    fn limits_as_eps_vanishes() {
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
            let p = profile(eps);
            let g = p.growing_amplitude_at_one().abs();
            assert!(g < prev);
            prev = g;
        }
        let p = profile(1e-6);
        assert!(p.growing_amplitude_at_one() < 1e-300);
        assert!((p.beta_eps - p.beta_limit).abs() < 1e-15);
    }

    #[test]
    fn profile_solves_the_linear_robin_problem() {
        let eps: f64 = 1e-2;
        let p = profile(eps);
        let h = 1e-4;
        let d0 = (p.value(h) - p.value(0.0)) / h;
        let d0 = d0 - 0.5 * h * (p.value(2.0 * h) - 2.0 * p.value(h) + p.value(0.0)) / (h * h);
        assert!((p.value(0.0) - eps.sqrt() * d0 - 2.0).abs() < 1e-5);
        let d1 = (p.value(1.0) - p.value(1.0 - h)) / h;
        let d1 = d1 + 0.5 * h * (p.value(1.0) - 2.0 * p.value(1.0 - h) + p.value(1.0 - 2.0 * h)) / (h * h);
        assert!((p.value(1.0) + eps.sqrt() * d1).abs() < 1e-5);
    }

    #[test]
    fn profile_is_positive_and_bounded_below_eps0() {
        let p = profile(1e-4);
        assert!(p.eps <= p.eps0);
        for i in 0..=1000 {
            let v = p.value(i as f64 / 1000.0);
            assert!(v > 0.0 && v <= 2.0);
        }
        assert!(p.upper_bound() <= 2.0);
    }

    #[test]
    fn not_needed_when_rate_is_positive() {
        // Tiny saturation and huge F_A(1) keep H_A(1, s, F_B(1)) > 0.
        use crate::model::{Direction, GradientSpec};
        let m = CompetitionModel::new(
            GradientSpec::linear(5.0, -0.1, Direction::Decreasing, 0.1).unwrap(),
            GradientSpec::linear(0.1, 0.1, Direction::Increasing, 0.05).unwrap(),
            0.1,
            0.1,
            1.0,
            1.0,
        )
        .unwrap();
        // H_A(1, 5, 0.2) = 4.9 - 5 - 0.02 < 0, so shrink the s-range instead.
        assert!(matches!(subsolution_profile(&m, 1e-3), Subsolution::Profile(_)));
        let m = m.with_saturations(0.0, 0.1).unwrap();
        let m = m
            .with_gradients(
                GradientSpec::linear(5.0, 0.0, Direction::Decreasing, 0.1).unwrap(),
                m.f_b().clone(),
            )
            .unwrap();
        assert!(matches!(subsolution_profile(&m, 1e-3), Subsolution::NotNeeded { .. }));
    }
}
