use serde::Serialize;

use crate::model::{find_bistable_interval, CompetitionModel};
use crate::pde::{front_position_scaled, SteadyState, StateField};

/// Support cutoff as a fraction of `F_A(0)`.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 0.01;
/// Allowed relative deviation from the pure states away from the front.
const FIT_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Supports `[0, x*]` and `[x*, 1]` meeting at one point.
    ASharpInterface,
    /// A band where both species vanish.
    BDeadZone,
    /// A band of width well beyond the front scale where both persist.
    CCoexistenceTail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioClassification {
    pub verdict: Verdict,
    /// Hull of the nodes with `A > threshold F_A(0)`.
    pub support_a: Option<(f64, f64)>,
    pub support_b: Option<(f64, f64)>,
    /// Estimated `I_b` (where `B ~ 0`), the complement of `support_b`.
    pub i_b: Option<(f64, f64)>,
    /// Estimated `I_a` (where `A ~ 0`).
    pub i_a: Option<(f64, f64)>,
    pub x_star: Option<f64>,
    /// Half-width `max(5 sqrt(eps), 2h)` of the excluded band around the front.
    pub collar: f64,
    /// Max of `|A - F_A| / F_A` on `[0, x* - collar]`.
    pub a_rel_error: Option<f64>,
    /// Max of `|B - F_B| / F_B` on `[x* + collar, 1]`.
    pub b_rel_error: Option<f64>,
    /// `[0, x_b) ⊂ I_b` and `(x_a, 1] ⊂ I_a` up to one grid spacing.
    pub left_zone_ok: Option<bool>,
    pub right_zone_ok: Option<bool>,
    pub diagnostics: Vec<String>,
}

/// Connected runs of nodes where `present` holds, as `(first, last)` indices.
fn runs(present: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &p) in present.iter().enumerate() {
        match (p, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, present.len() - 1));
    }
    out
}

fn max_rel_error(state: &StateField, field: &[f64], profile: impl Fn(f64) -> f64, range: (f64, f64)) -> Option<f64> {
    state
        .grid
        .nodes()
        .enumerate()
        .filter(|(_, x)| *x >= range.0 && *x <= range.1)
        .map(|(i, x)| (field[i] - profile(x)).abs() / profile(x))
        .reduce(f64::max)
}

/// Reads off which limit scenario a small-`eps` steady state resembles.
pub fn classify_limit(steady: &SteadyState, model: &CompetitionModel, threshold: f64) -> ScenarioClassification {
    let state = &steady.state;
    let grid = state.grid;
    let h = grid.h();
    let cut = threshold * model.a_max();
    let collar = (5.0 * steady.eps.sqrt()).max(2.0 * h);
    let mut diagnostics = Vec::new();
    if steady.eps > 1e-3 {
        diagnostics.push(format!("eps = {} is above the 1e-3 regime the classifier is meant for", steady.eps));
    }

    let runs_a = runs(&state.a.iter().map(|&v| v > cut).collect::<Vec<_>>());
    let runs_b = runs(&state.b.iter().map(|&v| v > cut).collect::<Vec<_>>());
    let hull = |r: &[(usize, usize)]| -> Option<(f64, f64)> {
        Some((grid.x(r.first()?.0), grid.x(r.last()?.1)))
    };
    let support_a = hull(&runs_a);
    let support_b = hull(&runs_b);
    let i_b = support_b.map(|(lo, _)| (0.0, lo)).or(Some((0.0, 1.0)));
    let i_a = support_a.map(|(_, hi)| (hi, 1.0)).or(Some((0.0, 1.0)));

    let x_star = steady.front.map(|f| f.x_star_eps).or_else(|| front_position_scaled(state, model.a_max()).ok().map(|f| f.x_star_eps));

    let (left_zone_ok, right_zone_ok) = match find_bistable_interval(model) {
        Ok(iv) => {
            let left = grid.nodes().enumerate().filter(|(_, x)| *x < iv.x_b - h).all(|(i, _)| state.b[i] <= cut);
            let right = grid.nodes().enumerate().filter(|(_, x)| *x > iv.x_a + h).all(|(i, _)| state.a[i] <= cut);
            (Some(left), Some(right))
        }
        Err(e) => {
            diagnostics.push(format!("no bistable interval: {e}"));
            (None, None)
        }
    };

    let (a_rel_error, b_rel_error) = match x_star {
        Some(xs) => (
            max_rel_error(state, &state.a, |x| model.f_a().value(x), (0.0, xs - collar)),
            max_rel_error(state, &state.b, |x| model.f_b().value(x), (xs + collar, 1.0)),
        ),
        None => (None, None),
    };

    let verdict = if runs_a.len() != 1 || runs_b.len() != 1 {
        diagnostics.push(format!("A has {} support components, B has {}", runs_a.len(), runs_b.len()));
        Verdict::Inconclusive
    } else {
        let (a_lo, a_hi) = support_a.unwrap();
        let (b_lo, b_hi) = support_b.unwrap();
        if a_lo > h || b_hi < 1.0 - h {
            diagnostics.push(format!("supports [{a_lo}, {a_hi}] and [{b_lo}, {b_hi}] do not reach the domain ends"));
            Verdict::Inconclusive
        } else {
            let gap = b_lo - a_hi;
            if gap > collar {
                Verdict::BDeadZone
            } else if -gap > 2.0 * collar {
                Verdict::CCoexistenceTail
            } else {
                let fits = [a_rel_error, b_rel_error].iter().all(|e| e.is_some_and(|v| v <= FIT_TOL));
                if fits {
                    Verdict::ASharpInterface
                } else {
                    diagnostics.push(format!(
                        "sharp geometry but pure-state fit fails: A error {a_rel_error:?}, B error {b_rel_error:?}"
                    ));
                    Verdict::Inconclusive
                }
            }
        }
    };

    ScenarioClassification {
        verdict,
        support_a,
        support_b,
        i_b,
        i_a,
        x_star,
        collar,
        a_rel_error,
        b_rel_error,
        left_zone_ok,
        right_zone_ok,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{Grid1D, MonitorSummary};

    fn wrap(state: StateField, eps: f64) -> SteadyState {
        SteadyState {
            front: front_position_scaled(&state, 2.0).ok(),
            state,
            eps,
            residual: 0.0,
            iterations: 0,
            monitors: MonitorSummary::default(),
            residual_trace: Vec::new(),
            snapshots: Vec::new(),
        }
    }

    #[test]
    fn runs_of_true() {
        assert_eq!(runs(&[true, true, false, true]), vec![(0, 1), (3, 3)]);
        assert!(runs(&[false, false]).is_empty());
    }

    #[test]
    fn hand_built_dead_zone() {
        let m = CompetitionModel::reference_linear();
        let g = Grid1D::new(1001).unwrap();
        let s = StateField::from_fn(g, |x| {
            if x < 0.4 {
                (m.f_a().value(x), 0.0)
            } else if x > 0.6 {
                (0.0, m.f_b().value(x))
            } else {
                (0.0, 0.0)
            }
        });
        let c = classify_limit(&wrap(s, 1e-5), &m, DEFAULT_SUPPORT_THRESHOLD);
        assert_eq!(c.verdict, Verdict::BDeadZone);
    }

    #[test]
    fn hand_built_sharp_and_coexistence() {
        let m = CompetitionModel::reference_linear();
        let g = Grid1D::new(1001).unwrap();
        let sharp = StateField::from_fn(g, |x| if x <= 0.5 { (m.f_a().value(x), 0.0) } else { (0.0, m.f_b().value(x)) });
        let c = classify_limit(&wrap(sharp, 1e-5), &m, DEFAULT_SUPPORT_THRESHOLD);
        assert_eq!(c.verdict, Verdict::ASharpInterface);
        assert_eq!(c.left_zone_ok, Some(true));
        assert_eq!(c.right_zone_ok, Some(true));
        let tail = StateField::from_fn(g, |x| {
            let a = if x <= 0.7 { m.f_a().value(x) * 0.5 } else { 0.0 };
            let b = if x >= 0.3 { m.f_b().value(x) * 0.5 } else { 0.0 };
            (if x < 0.3 { m.f_a().value(x) } else { a }, if x > 0.7 { m.f_b().value(x) } else { b })
        });
        let c = classify_limit(&wrap(tail, 1e-5), &m, DEFAULT_SUPPORT_THRESHOLD);
        assert_eq!(c.verdict, Verdict::CCoexistenceTail);
    }
}
