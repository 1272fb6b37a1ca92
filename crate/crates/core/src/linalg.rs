//! Banded solvers used by the implicit diffusion step and the wave BVP.

/// Solves a tridiagonal system in place with the Thomas algorithm.
///
/// `lower[0]` and `upper[n-1]` are ignored. Returns `None` on a zero pivot.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> Option<()> {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 || !beta.is_finite() {
        return None;
    }
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return None;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Some(())
}

/// A factored tridiagonal matrix, reused across many right-hand sides.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_scaled: Vec<f64>,
}

impl TridiagonalLu {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Option<Self> {
        let n = diag.len();
        let mut inv_pivot = vec![0.0; n];
        let mut upper_scaled = vec![0.0; n];
        let mut beta = diag[0];
        for i in 0..n {
            if i > 0 {
                beta = diag[i] - lower[i] * upper_scaled[i - 1];
            }
            if beta == 0.0 || !beta.is_finite() {
                return None;
            }
            inv_pivot[i] = 1.0 / beta;
            if i + 1 < n {
                upper_scaled[i] = upper[i] * inv_pivot[i];
            }
        }
        Some(Self { lower: lower.to_vec(), inv_pivot, upper_scaled })
    }

    pub fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper_scaled[i] * rhs[i + 1];
        }
    }
}

/// Square band matrix with `kl` sub- and `ku` super-diagonals, factored by
/// Gaussian elimination with partial pivoting.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row `i` stores columns `i - kl ..= i + ku + kl` (room for fill-in).
    rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    m: BandedMatrix,
    perm: Vec<usize>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, rows: vec![vec![0.0; 2 * kl + ku + 1]; n] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        j + self.kl - i
    }

    /// Sets entry `(i, j)`; panics outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.rows[i][s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.rows[i][s] += v;
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.rows[i][self.slot(i, j)] * x[j]).sum()
            })
            .collect()
    }

    pub fn factor(mut self) -> Option<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut perm = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.rows[k][self.slot(k, k)].abs();
            for i in k + 1..=last {
                let v = self.rows[i][self.slot(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return None;
            }
            perm[k] = p;
            let width = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=width {
                    let (sk, sp) = (self.slot(k, j), self.slot(p, j));
                    let tmp = self.rows[k][sk];
                    self.rows[k][sk] = self.rows[p][sp];
                    self.rows[p][sp] = tmp;
                }
            }
            let pivot = self.rows[k][self.slot(k, k)];
            for i in k + 1..=last {
                let si = self.slot(i, k);
                let factor = self.rows[i][si] / pivot;
                self.rows[i][si] = factor;
                if factor != 0.0 {
                    for j in k + 1..=width {
                        let v = self.rows[k][self.slot(k, j)];
                        let s = self.slot(i, j);
                        self.rows[i][s] -= factor * v;
                    }
                }
            }
        }
        Some(BandedLu { m: self, perm })
    }
}

impl BandedLu {
    pub fn solve(&self, rhs: &mut [f64]) {
        let m = &self.m;
        let (n, kl, ku) = (m.n, m.kl, m.ku);
        for k in 0..n {
            rhs.swap(k, self.perm[k]);
            let r = rhs[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                rhs[i] -= m.rows[i][m.slot(i, k)] * r;
            }
        }
        for k in (0..n).rev() {
            let mut v = rhs[k];
            for j in k + 1..=(k + ku + kl).min(n - 1) {
                v -= m.rows[k][m.slot(k, j)] * rhs[j];
            }
            rhs[k] = v / m.rows[k][m.slot(k, k)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_known_solution() {
        let n = 6;
        let lower = vec![-1.0; n];
        let diag = vec![2.5; n];
        let upper = vec![-1.0; n];
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 1.0).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| {
                let mut r = diag[i] * x[i];
                if i > 0 {
                    r += lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    r += upper[i] * x[i + 1];
                }
                r
            })
            .collect();
        let mut rhs2 = rhs.clone();
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs).unwrap();
        TridiagonalLu::factor(&lower, &diag, &upper).unwrap().solve(&mut rhs2);
        for i in 0..n {
            assert!((rhs[i] - x[i]).abs() < 1e-13);
            assert!((rhs2[i] - x[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn banded_solver_needs_pivoting() {
        // Zero on the leading diagonal forces a row swap.
        let n = 9;
        let mut m = BandedMatrix::zeros(n, 2, 3);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 3).min(n - 1) {
                let v = if i == j { if i % 3 == 0 { 0.0 } else { 3.0 } } else { 1.0 / (1.0 + (i + 2 * j) as f64) };
                m.set(i, j, v);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() + 0.2).collect();
        let mut b = m.apply(&x);
        m.factor().unwrap().solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-12, "{i}: {} vs {}", b[i], x[i]);
        }
    }

    #[test]
    fn singular_band_is_reported() {
        let m = BandedMatrix::zeros(4, 1, 1);
        assert!(m.factor().is_none());
    }
}
