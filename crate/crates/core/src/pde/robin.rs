//! Second-order Laplacian with Robin data `u(0) - sqrt(eps) u'(0) = g_0`,
//! `u(1) + sqrt(eps) u'(1) = g_1`, closed by ghost-point elimination.

use super::{Grid1D, PdeError};

/// The affine map `u -> T u + affine` approximating `eps d u''`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobinOperator {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub affine: Vec<f64>,
    sqrt_eps: f64,
    h: f64,
    left_value: f64,
    right_value: f64,
}

pub fn assemble_robin_operator(
    grid: Grid1D,
    eps: f64,
    d: f64,
    boundary_values: (f64, f64),
) -> Result<RobinOperator, PdeError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(PdeError::Domain(format!("diffusion scale must be positive, got {eps}")));
    }
    let n = grid.len();
    let h = grid.h();
    let sqrt_eps = eps.sqrt();
    let k = eps * d / (h * h);
    // Ghost nodes: u_{-1} = u_1 - (2h/sqrt(eps)) (u_0 - g_0) and
    // u_n = u_{n-2} - (2h/sqrt(eps)) (u_{n-1} - g_1).
    let robin = 2.0 * eps * d / (h * sqrt_eps);
    let (g0, g1) = boundary_values;

    let mut lower = vec![k; n];
    let mut diag = vec![-2.0 * k; n];
    let mut upper = vec![k; n];
    let mut affine = vec![0.0; n];
    lower[0] = 0.0;
    upper[n - 1] = 0.0;
    diag[0] = -2.0 * k - robin;
    upper[0] = 2.0 * k;
    affine[0] = robin * g0;
    diag[n - 1] = -2.0 * k - robin;
    lower[n - 1] = 2.0 * k;
    affine[n - 1] = robin * g1;

    Ok(RobinOperator { lower, diag, upper, affine, sqrt_eps, h, left_value: g0, right_value: g1 })
}

impl RobinOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        let n = self.len();
        out[0] = self.diag[0] * u[0] + self.upper[0] * u[1] + self.affine[0];
        for i in 1..n - 1 {
            out[i] = self.lower[i] * u[i - 1] + self.diag[i] * u[i] + self.upper[i] * u[i + 1];
        }
        out[n - 1] = self.lower[n - 1] * u[n - 2] + self.diag[n - 1] * u[n - 1] + self.affine[n - 1];
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.apply_into(u, &mut out);
        out
    }

    /// Defects of the two Robin conditions using second-order one-sided
    /// derivatives.
    pub fn boundary_residuals(&self, u: &[f64]) -> (f64, f64) {
        let n = u.len();
        let h = self.h;
        let d0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        let d1 = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
        (u[0] - self.sqrt_eps * d0 - self.left_value, u[n - 1] + self.sqrt_eps * d1 - self.right_value)
    }
}
