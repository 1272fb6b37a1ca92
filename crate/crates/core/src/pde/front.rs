use serde::Serialize;

use super::{PdeError, StateField};

/// Location of the `A = B` crossing and the width of the transition layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontEstimate {
    pub x_star_eps: f64,
    /// Length of the region where `|A - B| < 0.1 * scale`.
    pub width: f64,
}

/// Crossing of `A - B` for a monotone state, with the width measured against
/// `0.1 * max(A)`.
pub fn front_position(state: &StateField) -> Result<FrontEstimate, PdeError> {
    let scale = state.a.iter().cloned().fold(0.0, f64::max);
    front_position_scaled(state, scale)
}

/// As [`front_position`] with an explicit concentration scale (normally
/// `F_A(0)`).
pub fn front_position_scaled(state: &StateField, scale: f64) -> Result<FrontEstimate, PdeError> {
    let g: Vec<f64> = state.a.iter().zip(&state.b).map(|(a, b)| a - b).collect();
    let n = g.len();
    if !(g[0] > 0.0 && g[n - 1] < 0.0) {
        return Err(PdeError::Structure(format!(
            "expected A > B at x=0 and A < B at x=1, got A-B = {} and {}",
            g[0],
            g[n - 1]
        )));
    }
    let x_star_eps = single_crossing(state, &g, 0.0)?;
    let thr = 0.1 * scale;
    let left = if g[0] <= thr { 0.0 } else { single_crossing(state, &g, thr)? };
    let right = if g[n - 1] >= -thr { 1.0 } else { single_crossing(state, &g, -thr)? };
    Ok(FrontEstimate { x_star_eps, width: (right - left).max(0.0) })
}

/// Root in `(0, 1)` of the cubic through `(-1, p[0]), (0, p[1]), (1, p[2]), (2, p[3])`,
/// given `p[1]` and `p[2]` of opposite signs.
fn cubic_root(p: [f64; 4]) -> f64 {
    let f = |t: f64| {
        let (a, b, c, d) = (t + 1.0, t, t - 1.0, t - 2.0);
        -p[0] * b * c * d / 6.0 + p[1] * a * c * d / 2.0 - p[2] * a * b * d / 2.0 + p[3] * a * b * c / 6.0
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let f_lo = f(lo);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unique crossing of `level` (sign change, zeros skipped). Between adjacent
/// interior nodes the crossing of the four-point cubic interpolant is used,
/// otherwise linear interpolation.
fn single_crossing(state: &StateField, g: &[f64], level: f64) -> Result<f64, PdeError> {
    let mut found = None;
    let mut count = 0;
    let mut last: Option<(usize, f64)> = None;
    for (i, &v) in g.iter().enumerate() {
        let v = v - level;
        if v == 0.0 {
            continue;
        }
        if let Some((j, u)) = last {
            if u.signum() != v.signum() {
                count += 1;
                let theta = if i == j + 1 && j >= 1 && i + 1 < g.len() {
                    cubic_root([g[j - 1] - level, u, v, g[i + 1] - level])
                } else {
                    u / (u - v)
                };
                let (x0, x1) = (state.grid.x(j), state.grid.x(i));
                found = Some(x0 + theta * (x1 - x0));
            }
        }
        last = Some((i, v));
    }
    match (count, found) {
        (1, Some(x)) => Ok(x),
        (0, _) => Err(PdeError::Structure(format!("A - B never crosses {level}"))),
        (k, _) => Err(PdeError::Structure(format!("A - B crosses {level} {k} times; state is not monotone"))),
    }
}
