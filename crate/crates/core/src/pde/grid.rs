use serde::Serialize;

use super::PdeError;
use crate::model::CompetitionModel;

/// Uniform grid on `[0, 1]` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid1D {
    n: usize,
}

impl Grid1D {
    pub fn new(n: usize) -> Result<Self, PdeError> {
        if n < 3 {
            return Err(PdeError::Grid(format!("need at least 3 nodes, got {n}")));
        }
        Ok(Self { n })
    }

    /// Smallest grid with at least ten nodes per front width `sqrt(eps)`.
    pub fn auto(eps: f64) -> Result<Self, PdeError> {
        Self::new(Self::required_nodes(eps))
    }

    /// Node count needed for `h <= sqrt(eps) / 10`.
    pub fn required_nodes(eps: f64) -> usize {
        if eps <= 0.0 {
            return 3;
        }
        let cells = (10.0 / eps.sqrt() - 1e-9).ceil().max(2.0) as usize;
        cells + 1
    }

    pub fn resolves(&self, eps: f64) -> bool {
        eps <= 0.0 || self.h() <= eps.sqrt() / 10.0 * (1.0 + 1e-12)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            1.0
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Grid with `2n - 1` nodes containing every node of `self`.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n - 1 }
    }
}

/// Concentrations `(A, B)` on a grid at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub grid: Grid1D,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
}

impl StateField {
    pub fn new(grid: Grid1D, a: Vec<f64>, b: Vec<f64>) -> Result<Self, PdeError> {
        if a.len() != grid.len() || b.len() != grid.len() {
            return Err(PdeError::Grid(format!(
                "field lengths {}/{} do not match grid of {} nodes",
                a.len(),
                b.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, a, b, t: 0.0 })
    }

    pub fn from_fn<F: Fn(f64) -> (f64, f64)>(grid: Grid1D, f: F) -> Self {
        let (a, b) = grid.nodes().map(f).unzip();
        Self { grid, a, b, t: 0.0 }
    }

    /// Largest excursion outside `[0, F_A(0)] x [0, F_B(1)]` (0 when inside).
    pub fn bound_violation(&self, model: &CompetitionModel) -> f64 {
        let (a_max, b_max) = (model.a_max(), model.b_max());
        let over = |v: f64, hi: f64| (-v).max(v - hi).max(0.0);
        self.a
            .iter()
            .map(|&v| over(v, a_max))
            .chain(self.b.iter().map(|&v| over(v, b_max)))
            .fold(0.0, f64::max)
    }

    /// Largest increase of `A` or decrease of `B` between neighbours.
    pub fn monotonicity_violation(&self) -> f64 {
        let up_a = self.a.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let down_b = self.b.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
        up_a.max(down_b)
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.monotonicity_violation() <= tol
    }

    pub fn max_abs_diff(&self, other: &StateField) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .chain(self.b.iter().zip(&other.b))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|dA/dx|` by first differences.
    pub fn max_slope_a(&self) -> f64 {
        let h = self.grid.h();
        self.a.windows(2).map(|w| (w[1] - w[0]).abs() / h).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = Grid1D::new(5).unwrap();
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.refined().len(), 9);
        assert!(Grid1D::new(2).is_err());
    }

    #[test]
    fn auto_grid_resolves_front() {
        for eps in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
            let g = Grid1D::auto(eps).unwrap();
            assert!(g.resolves(eps), "eps={eps} n={}", g.len());
            assert!(!Grid1D::new(g.len() - 1).unwrap().resolves(eps));
        }
        assert_eq!(Grid1D::required_nodes(1e-4), 1001);
    }

    #[test]
    fn field_invariants() {
        let g = Grid1D::new(11).unwrap();
        let s = StateField::from_fn(g, |x| (1.0 - x, x));
        assert!(s.is_monotone(0.0));
        let m = CompetitionModel::reference_linear();
        assert_eq!(s.bound_violation(&m), 0.0);
        let mut bad = s.clone();
        bad.a[3] = -0.5;
        assert_eq!(bad.bound_violation(&m), 0.5);
        assert!(!bad.is_monotone(1e-9));
        assert!(StateField::new(g, vec![0.0; 3], vec![0.0; 11]).is_err());
    }
}
