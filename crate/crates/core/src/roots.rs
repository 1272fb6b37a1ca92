//! Scalar root bracketing.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("function returned a non-finite value at {0}")]
    NonFinite(f64),
}

/// Finds a root of `f` in `[lo, hi]` by bisection down to `tol` in `x`,
/// then tries one secant step inside the final bracket and keeps it if it
/// lowers `|f|`.
pub fn bisect_secant<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if !f_lo.is_finite() {
        return Err(RootError::NonFinite(lo));
    }
    if !f_hi.is_finite() {
        return Err(RootError::NonFinite(hi));
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    // 200 halvings exhaust f64 resolution on any finite interval.
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if !f_mid.is_finite() {
            return Err(RootError::NonFinite(mid));
        }
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let f_mid = f(mid).abs();
    let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
    if secant.is_finite() && secant >= lo.min(hi) && secant <= lo.max(hi) && f(secant).abs() < f_mid {
        Ok(secant)
    } else {
        Ok(mid)
    }
}

/// Counts strict sign changes of `f` on a uniform sample of `[0, 1]`.
pub fn count_sign_changes<F>(f: F, n_samples: usize) -> usize
where
    F: Fn(f64) -> f64,
{
    let n = n_samples.max(2);
    let mut changes = 0;
    let mut prev = f(0.0);
    for i in 1..n {
        let v = f(i as f64 / (n - 1) as f64);
        if prev != 0.0 && v != 0.0 && prev.signum() != v.signum() {
            changes += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = bisect_secant(|x| x.powi(3) - x.powi(2) + 2.0, -200.0, 300.0, 1e-12).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_missing_bracket() {
        let e = bisect_secant(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(e, RootError::NoSignChange { .. }));
    }

    #[test]
    fn counts_changes() {
        assert_eq!(count_sign_changes(|x| x - 0.3, 101), 1);
        assert_eq!(count_sign_changes(|x| (x - 0.3) * (x - 0.6), 101), 2);
        assert_eq!(count_sign_changes(|x| x + 1.0, 101), 0);
    }
}
