//! Zero-diffusion equilibria, their stability, and the bistable interval.

use serde::Serialize;

use super::{check_position, CompetitionModel, ModelError};
use crate::roots::{bisect_secant, count_sign_changes};

/// Real parts within this distance of zero are reported as marginal.
pub const STABILITY_TOL: f64 = 1e-10;

const ROOT_TOL: f64 = 1e-12;
const SIGN_SAMPLES: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPoint {
    pub a: f64,
    pub b: f64,
    pub stability: Stability,
    /// Real parts of the Jacobian eigenvalues, ascending.
    pub eigenvalues: [f64; 2],
    pub jacobian_det: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    pub x: f64,
    pub e_a: EquilibriumPoint,
    pub e_b: EquilibriumPoint,
    pub origin: EquilibriumPoint,
    /// Interior saddle, present only where both coordinates are non-negative.
    pub saddle: Option<EquilibriumPoint>,
    /// Raw `(A*, B*)` from the closed form, admissible or not. `None` when
    /// `s_A s_B = 1` and the nullclines are parallel.
    pub saddle_candidate: Option<(f64, f64)>,
}

impl EquilibriumSet {
    pub fn points(&self) -> impl Iterator<Item = &EquilibriumPoint> {
        [&self.e_a, &self.e_b, &self.origin].into_iter().chain(self.saddle.as_ref())
    }

    /// Equilibrium nearest to `(a, b)` in the max norm, with its distance.
    pub fn nearest(&self, a: f64, b: f64) -> (&EquilibriumPoint, f64) {
        self.points()
            .map(|p| (p, (p.a - a).abs().max((p.b - b).abs())))
            .min_by(|l, r| l.1.total_cmp(&r.1))
            .unwrap()
    }
}

/// Jacobian of `(A H_A, B H_B)` at `(a, b)`.
fn jacobian(model: &CompetitionModel, fa: f64, fb: f64, a: f64, b: f64) -> [[f64; 2]; 2] {
    let ha = model.h_a(fa, a, b);
    let hb = model.h_b(fb, a, b);
    [[ha - a, -model.s_a() * a], [-model.s_b() * b, hb - b]]
}

fn classify(j: [[f64; 2]; 2]) -> ([f64; 2], f64, Stability) {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    let re = if disc >= 0.0 {
        let s = disc.sqrt();
        // Avoid cancellation in the smaller root.
        let q = -0.5 * (tr + tr.signum() * s);
        if q == 0.0 {
            [0.0, 0.0]
        } else {
            let (r1, r2) = (-q, -det / q);
            let (r1, r2) = (r1.min(r2), r1.max(r2));
            [r1, r2]
        }
    } else {
        [0.5 * tr, 0.5 * tr]
    };
    let label = if re.iter().any(|r| r.abs() <= STABILITY_TOL) {
        Stability::Marginal
    } else if re[1] < 0.0 {
        Stability::Stable
    } else if re[0] > 0.0 {
        Stability::Unstable
    } else {
        Stability::Saddle
    };
    (re, det, label)
}

fn point(model: &CompetitionModel, fa: f64, fb: f64, a: f64, b: f64) -> EquilibriumPoint {
    let (eigenvalues, jacobian_det, stability) = classify(jacobian(model, fa, fb, a, b));
    EquilibriumPoint { a, b, stability, eigenvalues, jacobian_det }
}

/// All non-negative equilibria of the zero-diffusion system at `x`.
pub fn equilibria(model: &CompetitionModel, x: f64) -> Result<EquilibriumSet, ModelError> {
    check_position(x)?;
    let fa = model.f_a().value(x);
    let fb = model.f_b().value(x);
    let e_a = point(model, fa, fb, fa, 0.0);
    let e_b = point(model, fa, fb, 0.0, fb);
    let origin = point(model, fa, fb, 0.0, 0.0);

    let denom = model.s_a() * model.s_b() - 1.0;
    let saddle_candidate = (denom != 0.0).then(|| {
        ((model.s_a() * fb - fa) / denom, (model.s_b() * fa - fb) / denom)
    });
    // Admissibility tolerates round-off at the interval endpoints where one
    // coordinate vanishes exactly.
    let slack = STABILITY_TOL * fa.max(fb);
    let saddle = saddle_candidate
        .filter(|&(a, b)| a >= -slack && b >= -slack)
        .map(|(a, b)| point(model, fa, fb, a.max(0.0), b.max(0.0)));
    Ok(EquilibriumSet { x, e_a, e_b, origin, saddle, saddle_candidate })
}

/// Endpoints of the bistable zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BistableInterval {
    /// Solves `F_A(x_b) = s_A F_B(x_b)`; `(0, F_B)` is stable to the right.
    pub x_b: f64,
    /// Solves `F_B(x_a) = s_B F_A(x_a)`; `(F_A, 0)` is stable to the left.
    pub x_a: f64,
}

impl BistableInterval {
    pub fn width(&self) -> f64 {
        self.x_a - self.x_b
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.x_b && x < self.x_a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x_a + self.x_b)
    }
}

fn single_root<F: Fn(f64) -> f64>(f: F, name: &str) -> Result<f64, ModelError> {
    let changes = count_sign_changes(&f, SIGN_SAMPLES);
    if changes != 1 {
        return Err(ModelError::Hypothesis(format!(
            "{name} changes sign {changes} times on [0, 1], expected exactly once"
        )));
    }
    bisect_secant(&f, 0.0, 1.0, ROOT_TOL).map_err(|e| ModelError::Hypothesis(format!("{name}: {e}")))
}

/// Locates `x_b < x_a` by bracketing the two balance conditions.
pub fn find_bistable_interval(model: &CompetitionModel) -> Result<BistableInterval, ModelError> {
    let (fa, fb) = (model.f_a(), model.f_b());
    let x_b = single_root(|x| fa.value(x) - model.s_a() * fb.value(x), "F_A - s_A F_B")?;
    let x_a = single_root(|x| fb.value(x) - model.s_b() * fa.value(x), "F_B - s_B F_A")?;
    if x_b >= x_a {
        return Err(ModelError::Hypothesis(format!("no bistable overlap: x_b={x_b} >= x_a={x_a}")));
    }
    Ok(BistableInterval { x_b, x_a })
}

/// Slopes of the equilibrium branches at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumDerivatives {
    pub d_f_a: f64,
    pub d_f_b: f64,
    /// `(dA*/dx, dB*/dx)` where the saddle is admissible.
    pub saddle: Option<(f64, f64)>,
}

impl EquilibriumDerivatives {
    pub fn saddle_slopes(&self, x: f64) -> Result<(f64, f64), ModelError> {
        self.saddle.ok_or(ModelError::SaddleNotAdmissible(x))
    }
}

/// Implicit-function slopes of `F_A`, `F_B`, `A*`, `B*` built from the
/// reaction partials. The saddle slopes are only reported strictly inside
/// the admissible range, where `A*, B* > 0`.
pub fn equilibrium_derivatives(model: &CompetitionModel, x: f64) -> Result<EquilibriumDerivatives, ModelError> {
    check_position(x)?;
    let fa = model.f_a().value(x);
    let fb = model.f_b().value(x);
    let ra = model.evaluate_reaction(x, fa, 0.0)?;
    let rb = model.evaluate_reaction(x, 0.0, fb)?;
    let d_f_a = -ra.dx_ha / ra.da_ha;
    let d_f_b = -rb.dx_hb / rb.db_hb;

    let saddle = match equilibria(model, x)?.saddle_candidate {
        Some((a, b)) if a > 0.0 && b > 0.0 => {
            let r = model.evaluate_reaction(x, a, b)?;
            let det = r.da_ha * r.db_hb - r.db_ha * r.da_hb;
            let da = (r.db_ha * r.dx_hb - r.dx_ha * r.db_hb) / det;
            let db = (r.dx_ha * r.da_hb - r.da_ha * r.dx_hb) / det;
            Some((da, db))
        }
        _ => None,
    };
    Ok(EquilibriumDerivatives { d_f_a, d_f_b, saddle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Direction, GradientSpec};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn reference_midpoint_equilibria() {
        let m = CompetitionModel::reference_linear();
        let e = equilibria(&m, 0.5).unwrap();
        assert_eq!((e.e_a.a, e.e_a.b), (1.25, 0.0));
        assert_eq!(e.e_a.stability, Stability::Stable);
        assert_eq!((e.e_b.a, e.e_b.b), (0.0, 1.25));
        assert_eq!(e.e_b.stability, Stability::Stable);
        assert_eq!(e.origin.stability, Stability::Unstable);
        let s = e.saddle.unwrap();
        assert!(close(s.a, 5.0 / 12.0, 1e-15) && close(s.b, 5.0 / 12.0, 1e-15));
        assert_eq!(s.stability, Stability::Saddle);
        // -(5/12) [[1,2],[2,1]] has eigenvalues -15/12 and +5/12.
        assert!(close(s.eigenvalues[0], -15.0 / 12.0, 1e-14));
        assert!(close(s.eigenvalues[1], 5.0 / 12.0, 1e-14));
        assert!(s.jacobian_det < 0.0);
    }

    #[test]
    fn saddle_absent_outside_interval() {
        let m = CompetitionModel::reference_linear();
        let e = equilibria(&m, 0.0).unwrap();
        assert!(e.saddle.is_none());
        let (a, _) = e.saddle_candidate.unwrap();
        assert!(close(a, -1.0 / 3.0, 1e-15));
    }

    #[test]
    fn saddle_touches_axis_at_x_b() {
        let m = CompetitionModel::reference_linear();
        let e = equilibria(&m, 2.0 / 9.0).unwrap();
        let s = e.saddle.expect("saddle should be present at x_b");
        assert!(s.a.abs() < 1e-12);
        assert_eq!(e.e_b.stability, Stability::Marginal);
    }

    #[test]
    fn reference_interval() {
        let iv = find_bistable_interval(&CompetitionModel::reference_linear()).unwrap();
        assert!(close(iv.x_b, 2.0 / 9.0, 1e-12));
        assert!(close(iv.x_a, 7.0 / 9.0, 1e-12));
    }

    #[test]
    fn interval_mirror_symmetry() {
        let m = CompetitionModel::exponential_figure();
        let iv = find_bistable_interval(&m).unwrap();
        assert!(close(iv.x_b, 1.0 - iv.x_a, 1e-11));
        assert!(close(iv.x_b, (1.0 - 2f64.ln()) / 2.0, 1e-12));
    }

    #[test]
    fn strong_saturation_has_no_interval() {
        let m = CompetitionModel::reference_linear().with_saturations(10.0, 10.0).unwrap();
        assert!(matches!(find_bistable_interval(&m), Err(ModelError::Hypothesis(_))));
    }

    #[test]
    fn derivative_formulas_reference() {
        let m = CompetitionModel::reference_linear();
        let d = equilibrium_derivatives(&m, 0.5).unwrap();
        let (da, db) = d.saddle_slopes(0.5).unwrap();
        assert!(close(da, 1.5, 1e-14) && close(db, -1.5, 1e-14));
        let d = equilibrium_derivatives(&m, 0.1).unwrap();
        assert_eq!(d.d_f_a, -1.5);
        assert_eq!(d.saddle_slopes(0.1), Err(ModelError::SaddleNotAdmissible(0.1)));
    }

    #[test]
    fn saddle_slopes_match_finite_differences_on_exponential_model() {
        let m = CompetitionModel::exponential_figure();
        let h = 1e-5;
        for x in [0.3, 0.5, 0.7] {
            let (da, db) = equilibrium_derivatives(&m, x).unwrap().saddle.unwrap();
            let (ap, bp) = equilibria(&m, x + h).unwrap().saddle_candidate.unwrap();
            let (am, bm) = equilibria(&m, x - h).unwrap().saddle_candidate.unwrap();
            let (fda, fdb) = ((ap - am) / (2.0 * h), (bp - bm) / (2.0 * h));
            assert!(((fda - da) / da).abs() < 1e-6);
            assert!(((fdb - db) / db).abs() < 1e-6);
            assert!(da > 0.0 && db < 0.0);
        }
    }

    #[test]
    fn tabulated_gradients_give_an_interval() {
        let fa = GradientSpec::tabulated(vec![0.0, 0.5, 1.0], vec![2.0, 1.25, 0.5], Direction::Decreasing, 0.1).unwrap();
        let fb = GradientSpec::tabulated(vec![0.0, 0.5, 1.0], vec![0.5, 1.25, 2.0], Direction::Increasing, 0.1).unwrap();
        let m = CompetitionModel::reference_linear().with_gradients(fa, fb).unwrap();
        let iv = find_bistable_interval(&m).unwrap();
        assert!(close(iv.x_b + iv.x_a, 1.0, 1e-10));
    }
}
