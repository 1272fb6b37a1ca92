//! The heterogeneous competition model: gradients, reaction terms,
//! zero-diffusion equilibria and the structural hypotheses they must satisfy.
//!
//! The reaction is the saturated competition pair
//!
//! ```text
//! H_A(x, A, B) = F_A(x) - A - s_A B
//! H_B(x, A, B) = F_B(x) - B - s_B A
//! ```
//!
//! with `F_A` decreasing and `F_B` increasing on `[0, 1]`.

mod equilibria;
mod gradient;
mod hypotheses;

use thiserror::Error;

pub use equilibria::{
    equilibria, equilibrium_derivatives, find_bistable_interval, BistableInterval, EquilibriumDerivatives,
    EquilibriumPoint, EquilibriumSet, Stability, STABILITY_TOL,
};
pub use gradient::{Direction, GradientFamily, GradientSpec};
pub use hypotheses::{verify_hypotheses, Check, Hypothesis, HypothesisReport, DEFAULT_SAMPLES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("position {0} outside [0, 1]")]
    Domain(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("saddle equilibrium not admissible at x={0}")]
    SaddleNotAdmissible(f64),
}

/// Values and partial derivatives of `(H_A, H_B)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reaction {
    pub h_a: f64,
    pub h_b: f64,
    pub da_ha: f64,
    pub db_ha: f64,
    pub da_hb: f64,
    pub db_hb: f64,
    pub dx_ha: f64,
    pub dx_hb: f64,
}

/// Two competing species driven by opposing morphogen gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetitionModel {
    f_a: GradientSpec,
    f_b: GradientSpec,
    s_a: f64,
    s_b: f64,
    d_a: f64,
    d_b: f64,
}

impl CompetitionModel {
    /// Structural validation only: gradient roles, non-negative saturations
    /// and positive diffusivities. `s_A s_B > 1` and the gradient hypotheses
    /// are left to [`verify_hypotheses`] so that failing models can be
    /// reported on rather than refused.
    pub fn new(
        f_a: GradientSpec,
        f_b: GradientSpec,
        s_a: f64,
        s_b: f64,
        d_a: f64,
        d_b: f64,
    ) -> Result<Self, ModelError> {
        if f_a.direction() != Direction::Decreasing {
            return Err(ModelError::InvalidParameter("F_A must be declared decreasing".into()));
        }
        if f_b.direction() != Direction::Increasing {
            return Err(ModelError::InvalidParameter("F_B must be declared increasing".into()));
        }
        if !(s_a >= 0.0 && s_b >= 0.0) || !s_a.is_finite() || !s_b.is_finite() {
            return Err(ModelError::InvalidParameter(format!("saturations must be >= 0, got {s_a}, {s_b}")));
        }
        if !(d_a > 0.0 && d_b > 0.0) || !d_a.is_finite() || !d_b.is_finite() {
            return Err(ModelError::InvalidParameter(format!("diffusivities must be > 0, got {d_a}, {d_b}")));
        }
        Ok(Self { f_a, f_b, s_a, s_b, d_a, d_b })
    }

    /// The symmetric linear reference model: `F_A = 2 - 1.5x`,
    /// `F_B = 0.5 + 1.5x`, `s_A = s_B = 2`, unit diffusivities.
    pub fn reference_linear() -> Self {
        Self::new(
            GradientSpec::linear(2.0, -1.5, Direction::Decreasing, 0.1).unwrap(),
            GradientSpec::linear(0.5, 1.5, Direction::Increasing, 0.1).unwrap(),
            2.0,
            2.0,
            1.0,
            1.0,
        )
        .unwrap()
    }

    /// Exponential morphogen gradients `F_A = 2e^{-x}`, `F_B = 2e^{x-1}` with
    /// `s_A = s_B = 2`.
    pub fn exponential_figure() -> Self {
        Self::new(
            GradientSpec::exponential(2.0, -1.0, Direction::Decreasing, 0.1).unwrap(),
            GradientSpec::exponential(2.0 * (-1.0f64).exp(), 1.0, Direction::Increasing, 0.1).unwrap(),
            2.0,
            2.0,
            1.0,
            1.0,
        )
        .unwrap()
    }

    pub fn f_a(&self) -> &GradientSpec {
        &self.f_a
    }

    pub fn f_b(&self) -> &GradientSpec {
        &self.f_b
    }

    pub fn s_a(&self) -> f64 {
        self.s_a
    }

    pub fn s_b(&self) -> f64 {
        self.s_b
    }

    pub fn d_a(&self) -> f64 {
        self.d_a
    }

    pub fn d_b(&self) -> f64 {
        self.d_b
    }

    pub fn with_saturations(&self, s_a: f64, s_b: f64) -> Result<Self, ModelError> {
        Self::new(self.f_a.clone(), self.f_b.clone(), s_a, s_b, self.d_a, self.d_b)
    }

    pub fn with_gradients(&self, f_a: GradientSpec, f_b: GradientSpec) -> Result<Self, ModelError> {
        Self::new(f_a, f_b, self.s_a, self.s_b, self.d_a, self.d_b)
    }

    pub fn with_diffusivities(&self, d_a: f64, d_b: f64) -> Result<Self, ModelError> {
        Self::new(self.f_a.clone(), self.f_b.clone(), self.s_a, self.s_b, d_a, d_b)
    }

    /// Upper bound `F_A(0)` of the invariant box for `A`.
    pub fn a_max(&self) -> f64 {
        self.f_a.value(0.0)
    }

    /// Upper bound `F_B(1)` of the invariant box for `B`.
    pub fn b_max(&self) -> f64 {
        self.f_b.value(1.0)
    }

    #[inline]
    pub fn h_a(&self, fa: f64, a: f64, b: f64) -> f64 {
        fa - a - self.s_a * b
    }

    #[inline]
    pub fn h_b(&self, fb: f64, a: f64, b: f64) -> f64 {
        fb - b - self.s_b * a
    }

    /// `H_A`, `H_B` and their partials at `(x, A, B)`.
    pub fn evaluate_reaction(&self, x: f64, a: f64, b: f64) -> Result<Reaction, ModelError> {
        check_position(x)?;
        let fa = self.f_a.value(x);
        let fb = self.f_b.value(x);
        Ok(Reaction {
            h_a: self.h_a(fa, a, b),
            h_b: self.h_b(fb, a, b),
            da_ha: -1.0,
            db_ha: -self.s_a,
            da_hb: -self.s_b,
            db_hb: -1.0,
            dx_ha: self.f_a.derivative(x),
            dx_hb: self.f_b.derivative(x),
        })
    }

    /// `sup |H|` over `[0,1] x [0, F_A(0)] x [0, F_B(1)]`. The reaction is
    /// affine in `(A, B)` so the extremes sit on box corners.
    pub fn reaction_sup(&self) -> f64 {
        let (a_max, b_max) = (self.a_max(), self.b_max());
        let mut sup: f64 = 0.0;
        for x in [0.0, 1.0] {
            let fa = self.f_a.value(x);
            let fb = self.f_b.value(x);
            for a in [0.0, a_max] {
                for b in [0.0, b_max] {
                    sup = sup.max(self.h_a(fa, a, b).abs()).max(self.h_b(fb, a, b).abs());
                }
            }
        }
        sup
    }

    /// Right-hand side of the zero-diffusion system `(A H_A, B H_B)`.
    #[inline]
    pub fn kinetics(&self, fa: f64, fb: f64, a: f64, b: f64) -> (f64, f64) {
        (a * self.h_a(fa, a, b), b * self.h_b(fb, a, b))
    }
}

pub(crate) fn check_position(x: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(ModelError::Domain(x))
    }
}

/// Dimensionless saturation `beta / (beta - alpha)` from the raw production
/// rate `alpha` and saturation rate `beta`.
pub fn rescale_raw_parameters(alpha: f64, beta: f64) -> Result<f64, ModelError> {
    if !(alpha > 0.0) || !(alpha < beta) {
        return Err(ModelError::InvalidParameter(format!(
            "need 0 < alpha < beta so that saturation dominates self-activation, got alpha={alpha}, beta={beta}"
        )));
    }
    Ok(beta / (beta - alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reaction_at_origin_and_saddle() {
        let m = CompetitionModel::reference_linear();
        let r = m.evaluate_reaction(0.0, 0.0, 0.0).unwrap();
        assert_eq!((r.h_a, r.h_b), (2.0, 0.5));
        assert_eq!((r.da_ha, r.db_ha, r.da_hb, r.db_hb), (-1.0, -2.0, -2.0, -1.0));
        let r = m.evaluate_reaction(0.5, 5.0 / 12.0, 5.0 / 12.0).unwrap();
        assert!(r.h_a.abs() < 1e-15 && r.h_b.abs() < 1e-15);
    }

    #[test]
    fn reaction_vanishes_on_pure_a_state() {
        let m = CompetitionModel::exponential_figure();
        for x in [0.0, 0.37, 1.0] {
            let fa = m.f_a().value(x);
            assert_eq!(m.evaluate_reaction(x, fa, 0.0).unwrap().h_a, 0.0);
        }
    }

    #[test]
    fn reaction_rejects_outside_domain() {
        let m = CompetitionModel::reference_linear();
        assert_eq!(m.evaluate_reaction(1.5, 0.0, 0.0), Err(ModelError::Domain(1.5)));
        assert!(m.evaluate_reaction(-1e-9, 0.0, 0.0).is_err());
    }

    #[test]
    fn rescaling() {
        assert_eq!(rescale_raw_parameters(1.0, 2.0).unwrap(), 2.0);
        assert_eq!(rescale_raw_parameters(3.0, 4.0).unwrap(), 4.0);
        assert!(rescale_raw_parameters(2.0, 2.0).is_err());
        assert!(rescale_raw_parameters(0.0, 2.0).is_err());
    }

    #[test]
    fn constructor_rejects_bad_structure() {
        let m = CompetitionModel::reference_linear();
        assert!(m.with_diffusivities(0.0, 1.0).is_err());
        assert!(m.with_saturations(-1.0, 2.0).is_err());
        assert!(m.with_gradients(m.f_b().clone(), m.f_a().clone()).is_err());
    }

    #[test]
    fn reaction_sup_reference() {
        // Worst corner: x=1, A=2, B=2 gives H_A = 0.5 - 2 - 4.
        assert_eq!(CompetitionModel::reference_linear().reaction_sup(), 5.5);
    }
}
