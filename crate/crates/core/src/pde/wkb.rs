//! Phase functions `phi = -sqrt(eps) ln u` and their eikonal defects.

use super::{Grid1D, PdeError, StateField};
use crate::model::CompetitionModel;

/// Values below this are floored before taking logarithms.
pub const WKB_FLOOR: f64 = 1e-280;

#[derive(Debug, Clone, PartialEq)]
pub struct WkbField {
    pub grid: Grid1D,
    pub phi_a: Vec<f64>,
    pub phi_b: Vec<f64>,
    /// `d_A (|phi_A'|^2 - sqrt(eps) phi_A'') + H_A`
    pub eikonal_residual_a: Vec<f64>,
    pub eikonal_residual_b: Vec<f64>,
    /// Node indices where `A` or `B` had to be floored.
    pub floored_a: Vec<usize>,
    pub floored_b: Vec<usize>,
}

impl WkbField {
    pub fn is_floored(&self) -> bool {
        !self.floored_a.is_empty() || !self.floored_b.is_empty()
    }
}

fn phase(values: &[f64], sqrt_eps: f64, allow_floor: bool, name: &str) -> Result<(Vec<f64>, Vec<usize>), PdeError> {
    let mut floored = Vec::new();
    let phi = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v >= WKB_FLOOR {
                Ok(-sqrt_eps * v.ln())
            } else if allow_floor {
                floored.push(i);
                Ok(-sqrt_eps * WKB_FLOOR.ln())
            } else {
                Err(PdeError::Domain(format!("{name}[{i}] = {v} is below the WKB floor")))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((phi, floored))
}

/// First and second derivatives: centered inside, second-order one-sided at
/// the ends.
pub(crate) fn derivatives(u: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = u.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n - 1 {
        d1[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        d2[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
    }
    d1[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    d1[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    if n >= 4 {
        d2[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
        d2[n - 1] = (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) / (h * h);
    } else {
        d2[0] = d2[1];
        d2[n - 1] = d2[n - 2];
    }
    (d1, d2)
}

/// WKB phases of a state and their pointwise eikonal residuals.
pub fn wkb_transform(
    state: &StateField,
    model: &CompetitionModel,
    eps: f64,
    allow_floor: bool,
) -> Result<WkbField, PdeError> {
    if !(eps > 0.0) {
        return Err(PdeError::Domain(format!("WKB transform needs eps > 0, got {eps}")));
    }
    let sqrt_eps = eps.sqrt();
    let grid = state.grid;
    let (phi_a, floored_a) = phase(&state.a, sqrt_eps, allow_floor, "A")?;
    let (phi_b, floored_b) = phase(&state.b, sqrt_eps, allow_floor, "B")?;
    let h = grid.h();
    let (da1, da2) = derivatives(&phi_a, h);
    let (db1, db2) = derivatives(&phi_b, h);
    let mut ra = Vec::with_capacity(grid.len());
    let mut rb = Vec::with_capacity(grid.len());
    for (i, x) in grid.nodes().enumerate() {
        let (a, b) = (state.a[i], state.b[i]);
        let ha = model.h_a(model.f_a().value(x), a, b);
        let hb = model.h_b(model.f_b().value(x), a, b);
        ra.push(model.d_a() * (da1[i] * da1[i] - sqrt_eps * da2[i]) + ha);
        rb.push(model.d_b() * (db1[i] * db1[i] - sqrt_eps * db2[i]) + hb);
    }
    Ok(WkbField { grid, phi_a, phi_b, eikonal_residual_a: ra, eikonal_residual_b: rb, floored_a, floored_b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_profile_has_linear_phase() {
        let eps: f64 = 1e-4;
        let g = Grid1D::new(201).unwrap();
        let s = StateField::from_fn(g, |x| ((-x / eps.sqrt()).exp(), 1.0));
        let w = wkb_transform(&s, &CompetitionModel::reference_linear(), eps, false).unwrap();
        for (x, phi) in g.nodes().zip(&w.phi_a) {
            assert!((phi - x).abs() < 1e-12);
        }
        let (d1, _) = derivatives(&w.phi_a, g.h());
        assert!(d1.iter().all(|v| (v - 1.0).abs() < 1e-9));
        assert!(!w.is_floored());
    }

    #[test]
    fn floor_is_flagged_or_refused() {
        let g = Grid1D::new(5).unwrap();
        let s = StateField::from_fn(g, |x| (if x > 0.7 { 0.0 } else { 1.0 }, 1.0));
        let m = CompetitionModel::reference_linear();
        assert!(matches!(wkb_transform(&s, &m, 1e-4, false), Err(PdeError::Domain(_))));
        let w = wkb_transform(&s, &m, 1e-4, true).unwrap();
        assert_eq!(w.floored_a, vec![3, 4]);
    }
}
