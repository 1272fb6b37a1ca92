//! The `eps = 0` system: an independent planar ODE at every node.

use serde::Serialize;

use crate::model::CompetitionModel;

pub const ODE_DT: f64 = 1e-3;
pub const ODE_T_MAX: f64 = 1e4;
/// Stop once `|A H_A| + |B H_B|` drops below this.
pub const ODE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeLimit {
    pub a: f64,
    pub b: f64,
    pub t: f64,
    pub converged: bool,
}

fn field(model: &CompetitionModel, fa: f64, fb: f64, a: f64, b: f64) -> (f64, f64) {
    (a * model.h_a(fa, a, b), b * model.h_b(fb, a, b))
}

/// Classical RK4 with fixed `dt` from `(a, b)` at position `x` until the
/// vector field is below [`ODE_TOL`] or `t_max` is reached.
pub fn integrate_node(model: &CompetitionModel, x: f64, init: (f64, f64), dt: f64, t_max: f64) -> NodeLimit {
    let fa = model.f_a().value(x);
    let fb = model.f_b().value(x);
    let (mut a, mut b) = init;
    let mut t = 0.0;
    loop {
        let k1 = field(model, fa, fb, a, b);
        if k1.0.abs() + k1.1.abs() <= ODE_TOL {
            return NodeLimit { a, b, t, converged: true };
        }
        if t >= t_max {
            return NodeLimit { a, b, t, converged: false };
        }
        let k2 = field(model, fa, fb, a + 0.5 * dt * k1.0, b + 0.5 * dt * k1.1);
        let k3 = field(model, fa, fb, a + 0.5 * dt * k2.0, b + 0.5 * dt * k2.1);
        let k4 = field(model, fa, fb, a + dt * k3.0, b + dt * k3.1);
        a += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        b += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        t += dt;
    }
}
