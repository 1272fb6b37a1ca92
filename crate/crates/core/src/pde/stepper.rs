//! One IMEX step: implicit Robin diffusion, explicit positivity-preserving
//! reaction, both species advanced from the same time level.

use super::robin::{assemble_robin_operator, RobinOperator};
use super::{Grid1D, PdeError, StateField};
use crate::linalg::TridiagonalLu;
use crate::model::CompetitionModel;

/// Explicit reaction update `u + dt u h`, switching to `u exp(dt h)` when
/// the linear update would go negative.
#[inline]
pub fn reaction_update(u: f64, h: f64, dt: f64) -> f64 {
    let linear = u + dt * u * h;
    if linear < 0.0 {
        u * (dt * h).exp()
    } else {
        linear
    }
}

/// Reusable integrator for one `(model, eps, grid)` triple; caches the
/// factored implicit matrices for the most recent `dt`.
#[derive(Debug, Clone)]
pub struct ParabolicStepper<'m> {
    model: &'m CompetitionModel,
    grid: Grid1D,
    op_a: RobinOperator,
    op_b: RobinOperator,
    fa: Vec<f64>,
    fb: Vec<f64>,
    factored: Option<(f64, TridiagonalLu, TridiagonalLu)>,
}

fn implicit_factor(op: &RobinOperator, dt: f64) -> Option<TridiagonalLu> {
    let lower: Vec<f64> = op.lower.iter().map(|v| -dt * v).collect();
    let upper: Vec<f64> = op.upper.iter().map(|v| -dt * v).collect();
    let diag: Vec<f64> = op.diag.iter().map(|v| 1.0 - dt * v).collect();
    TridiagonalLu::factor(&lower, &diag, &upper)
}

impl<'m> ParabolicStepper<'m> {
    pub fn new(model: &'m CompetitionModel, eps: f64, grid: Grid1D) -> Result<Self, PdeError> {
        let op_a = assemble_robin_operator(grid, eps, model.d_a(), (model.a_max(), 0.0))?;
        let op_b = assemble_robin_operator(grid, eps, model.d_b(), (0.0, model.b_max()))?;
        let fa = grid.nodes().map(|x| model.f_a().value(x)).collect();
        let fb = grid.nodes().map(|x| model.f_b().value(x)).collect();
        Ok(Self { model, grid, op_a, op_b, fa, fb, factored: None })
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn operators(&self) -> (&RobinOperator, &RobinOperator) {
        (&self.op_a, &self.op_b)
    }

    fn factors(&mut self, dt: f64) -> Result<(&TridiagonalLu, &TridiagonalLu), PdeError> {
        let stale = !matches!(&self.factored, Some((cached, _, _)) if *cached == dt);
        if stale {
            let la = implicit_factor(&self.op_a, dt).ok_or(PdeError::Numerical("singular diffusion matrix for A"))?;
            let lb = implicit_factor(&self.op_b, dt).ok_or(PdeError::Numerical("singular diffusion matrix for B"))?;
            self.factored = Some((dt, la, lb));
        }
        let (_, la, lb) = self.factored.as_ref().unwrap();
        Ok((la, lb))
    }

    /// Advances `state` by `dt`.
    pub fn step(&mut self, state: &StateField, dt: f64) -> Result<StateField, PdeError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(PdeError::Domain(format!("time step must be positive, got {dt}")));
        }
        if state.grid != self.grid {
            return Err(PdeError::Grid("state grid does not match stepper grid".into()));
        }
        let model = self.model;
        let n = self.grid.len();
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for i in 0..n {
            let (ai, bi) = (state.a[i], state.b[i]);
            let ha = model.h_a(self.fa[i], ai, bi);
            let hb = model.h_b(self.fb[i], ai, bi);
            a.push(reaction_update(ai, ha, dt) + dt * self.op_a.affine[i]);
            b.push(reaction_update(bi, hb, dt) + dt * self.op_b.affine[i]);
        }
        let (la, lb) = self.factors(dt)?;
        la.solve(&mut a);
        lb.solve(&mut b);
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(PdeError::Numerical("non-finite value after step"));
        }
        Ok(StateField { grid: self.grid, a, b, t: state.t + dt })
    }

    /// Pointwise defects of the stationary system
    /// `eps d u'' + u H(x, A, B) = 0` including the Robin rows.
    pub fn residual_fields(&self, state: &StateField) -> (Vec<f64>, Vec<f64>) {
        let mut ra = self.op_a.apply(&state.a);
        let mut rb = self.op_b.apply(&state.b);
        for i in 0..self.grid.len() {
            let (ai, bi) = (state.a[i], state.b[i]);
            ra[i] += ai * self.model.h_a(self.fa[i], ai, bi);
            rb[i] += bi * self.model.h_b(self.fb[i], ai, bi);
        }
        (ra, rb)
    }

    /// Max-norm of [`ParabolicStepper::residual_fields`].
    pub fn residual(&self, state: &StateField) -> f64 {
        let (ra, rb) = self.residual_fields(state);
        ra.iter().chain(&rb).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// One IMEX step of the parabolic system.
pub fn step_parabolic(
    state: &StateField,
    model: &CompetitionModel,
    eps: f64,
    dt: f64,
) -> Result<StateField, PdeError> {
    ParabolicStepper::new(model, eps, state.grid)?.step(state, dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reaction_only_forward_euler() {
        // Node at x = 0 of the reference model: F_A = 2.
        let m = CompetitionModel::reference_linear();
        let h = m.h_a(2.0, 1.0, 0.0);
        assert!((reaction_update(1.0, h, 1e-3) - 1.001).abs() < 1e-15);
    }

    #[test]
    fn exponential_fallback_keeps_positivity() {
        let u = reaction_update(0.5, -50.0, 0.1);
        assert!(u > 0.0);
        assert!((u - 0.5 * (-5.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn robin_data_injects_mass() {
        let m = CompetitionModel::reference_linear();
        let g = Grid1D::new(101).unwrap();
        let s = StateField::from_fn(g, |_| (0.0, m.b_max()));
        let next = step_parabolic(&s, &m, 1e-3, 1e-2).unwrap();
        assert!(next.a[0] > 0.0 && next.a[1] > 0.0);
        assert!(next.a[0] > next.a[5]);
        assert_eq!(next.t, 1e-2);
    }

    #[test]
    fn equilibrium_state_barely_moves() {
        // (F_A, 0) is stationary except through diffusion of F_A and the
        // Robin mismatch; for a linear gradient only the right boundary row
        // sees a defect, so the interior change is O(eps dt |F_A''|) = 0.
        let m = CompetitionModel::reference_linear();
        let g = Grid1D::new(201).unwrap();
        let s = StateField::from_fn(g, |x| (m.f_a().value(x), 0.0));
        let dt = 1e-3;
        let next = step_parabolic(&s, &m, 1e-6, dt).unwrap();
        let interior = (5..190).map(|i| (next.a[i] - s.a[i]).abs()).fold(0.0, f64::max);
        assert!(interior < 1e-12, "{interior}");
    }

    #[test]
    fn rejects_bad_dt() {
        let m = CompetitionModel::reference_linear();
        let g = Grid1D::new(11).unwrap();
        let s = StateField::from_fn(g, |x| (1.0 - x, x));
        assert!(step_parabolic(&s, &m, 1e-3, 0.0).is_err());
        assert!(step_parabolic(&s, &m, 0.0, 1e-3).is_err());
    }
}
