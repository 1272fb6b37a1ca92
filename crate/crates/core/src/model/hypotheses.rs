//! Sampled certification of the structural hypotheses.
//!
//! The reactions are affine in `(A, B)`, so every sign condition is checked
//! exactly at each sample `x`; the only approximation is the sampling in `x`.

use std::fmt;

use serde::Serialize;

use super::equilibria::{equilibria, find_bistable_interval, Stability};
use super::gradient::sample;
use super::CompetitionModel;

pub const DEFAULT_SAMPLES: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// Positive production, monotone heterogeneity and competition signs.
    Gh2Signs,
    /// Pure-state roots exist and are positive.
    Gh1aRoots,
    /// Stability of the pure states is exchanged across `x_a`, `x_b`.
    Gh1bExchange,
    /// An interior saddle exists throughout the bistable zone.
    Gh1cSaddle,
    /// Gradients above the floor with the declared orientation.
    H1,
    /// Balance points `x_b < x_a` exist.
    H2,
    /// `s_A s_B > 1`.
    H3,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 7] = [
        Hypothesis::Gh2Signs,
        Hypothesis::Gh1aRoots,
        Hypothesis::Gh1bExchange,
        Hypothesis::Gh1cSaddle,
        Hypothesis::H1,
        Hypothesis::H2,
        Hypothesis::H3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::Gh2Signs => "GH2",
            Hypothesis::Gh1aRoots => "GH1a",
            Hypothesis::Gh1bExchange => "GH1b",
            Hypothesis::Gh1cSaddle => "GH1c",
            Hypothesis::H1 => "H1",
            Hypothesis::H2 => "H2",
            Hypothesis::H3 => "H3",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub hypothesis: Hypothesis,
    pub passed: bool,
    pub first_violation: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub n_samples: usize,
    pub checks: Vec<Check>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, h: Hypothesis) -> &Check {
        self.checks.iter().find(|c| c.hypothesis == h).expect("every hypothesis is checked")
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "hypothesis check on {} samples", self.n_samples)?;
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            write!(f, "  {:<5} {status}", c.hypothesis.name())?;
            if let Some(x) = c.first_violation {
                write!(f, "  first violation at x={x:.6}")?;
            }
            if !c.detail.is_empty() {
                write!(f, "  ({})", c.detail)?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", if self.all_passed() { "pass" } else { "FAIL" })
    }
}

fn check(h: Hypothesis, violation: Option<(f64, String)>) -> Check {
    match violation {
        None => Check { hypothesis: h, passed: true, first_violation: None, detail: String::new() },
        Some((x, detail)) => Check { hypothesis: h, passed: false, first_violation: Some(x), detail },
    }
}

fn global(h: Hypothesis, violation: Option<String>) -> Check {
    match violation {
        None => Check { hypothesis: h, passed: true, first_violation: None, detail: String::new() },
        Some(detail) => Check { hypothesis: h, passed: false, first_violation: None, detail },
    }
}

/// Evaluates every hypothesis on `n_samples` uniform points of `[0, 1]`.
/// Failures are entries in the report, never errors.
pub fn verify_hypotheses(model: &CompetitionModel, n_samples: usize) -> HypothesisReport {
    let n = n_samples.max(2);
    let spacing = 1.0 / (n - 1) as f64;
    let (fa, fb) = (model.f_a(), model.f_b());
    let scale = model.a_max().abs().max(model.b_max().abs()).max(1.0);
    let mut checks = Vec::with_capacity(7);

    let gh2 = sample(n).find_map(|x| {
        let r_a = model.evaluate_reaction(x, 0.0, 0.0).ok()?;
        let fails = [
            (r_a.h_a > 0.0, "H_A(x,0,0) > 0"),
            (r_a.h_b > 0.0, "H_B(x,0,0) > 0"),
            (r_a.dx_ha < 0.0, "d/dx H_A < 0"),
            (r_a.dx_hb > 0.0, "d/dx H_B > 0"),
            (r_a.db_ha < 0.0, "d/dB H_A < 0"),
            (r_a.da_hb < 0.0, "d/dA H_B < 0"),
        ];
        fails.iter().find(|(ok, _)| !ok).map(|(_, what)| (x, format!("{what} violated")))
    });
    checks.push(check(Hypothesis::Gh2Signs, gh2));

    let gh1a = sample(n).find_map(|x| {
        let (va, vb) = (fa.value(x), fb.value(x));
        let ra = model.h_a(va, va, 0.0);
        let rb = model.h_b(vb, 0.0, vb);
        if !(va > 0.0 && vb > 0.0) {
            Some((x, format!("pure states not positive: F_A={va}, F_B={vb}")))
        } else if ra.abs() > 1e-12 * scale || rb.abs() > 1e-12 * scale {
            Some((x, format!("pure states are not roots: H_A={ra}, H_B={rb}")))
        } else {
            None
        }
    });
    checks.push(check(Hypothesis::Gh1aRoots, gh1a));

    let interval = find_bistable_interval(model);

    let gh1b = match &interval {
        Err(e) => Some((0.0, format!("no bistable interval: {e}"))),
        Ok(iv) => sample(n).find_map(|x| {
            let eq = equilibria(model, x).ok()?;
            let (va, vb) = (fa.value(x), fb.value(x));
            if x < iv.x_a - spacing && eq.e_a.stability != Stability::Stable {
                Some((x, format!("(F_A,0) is {:?} left of x_a", eq.e_a.stability)))
            } else if x > iv.x_a + spacing && !(model.h_b(vb, va, 0.0) > 0.0) {
                Some((x, "H_B(x,F_A,0) > 0 fails right of x_a".to_string()))
            } else if x > iv.x_b + spacing && eq.e_b.stability != Stability::Stable {
                Some((x, format!("(0,F_B) is {:?} right of x_b", eq.e_b.stability)))
            } else if x < iv.x_b - spacing && !(model.h_a(va, 0.0, vb) > 0.0) {
                Some((x, "H_A(x,0,F_B) > 0 fails left of x_b".to_string()))
            } else {
                None
            }
        }),
    };
    checks.push(check(Hypothesis::Gh1bExchange, gh1b));

    let gh1c = match &interval {
        Err(e) => Some((0.0, format!("no bistable interval: {e}"))),
        Ok(iv) => sample(n)
            .filter(|&x| x > iv.x_b + spacing && x < iv.x_a - spacing)
            .find_map(|x| {
                let eq = equilibria(model, x).ok()?;
                let Some(s) = eq.saddle.filter(|s| s.a > 0.0 && s.b > 0.0) else {
                    return Some((x, "no positive interior equilibrium".to_string()));
                };
                let r = model.evaluate_reaction(x, s.a, s.b).ok()?;
                let det = r.da_ha * r.db_hb - r.db_ha * r.da_hb;
                if r.h_a.abs() + r.h_b.abs() > 1e-12 * scale {
                    Some((x, "interior point is not a root".to_string()))
                } else if !(det < 0.0 && r.da_ha < 0.0 && r.db_hb < 0.0) {
                    Some((x, format!("saddle condition fails: det={det}")))
                } else if s.stability != Stability::Saddle {
                    Some((x, format!("interior point classified {:?}", s.stability)))
                } else {
                    None
                }
            }),
    };
    checks.push(check(Hypothesis::Gh1cSaddle, gh1c));

    let h1 = [
        fa.first_floor_violation(n).map(|x| (x, "F_A not above floor".to_string())),
        fa.first_direction_violation(n).map(|x| (x, "F_A not decreasing".to_string())),
        fb.first_floor_violation(n).map(|x| (x, "F_B not above floor".to_string())),
        fb.first_direction_violation(n).map(|x| (x, "F_B not increasing".to_string())),
    ]
    .into_iter()
    .flatten()
    .min_by(|l, r| l.0.total_cmp(&r.0));
    checks.push(check(Hypothesis::H1, h1));

    checks.push(global(Hypothesis::H2, interval.as_ref().err().map(|e| e.to_string())));

    let product = model.s_a() * model.s_b();
    checks.push(global(
        Hypothesis::H3,
        (!(product > 1.0)).then(|| format!("s_A s_B = {product} is not > 1")),
    ));

    HypothesisReport { n_samples: n, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Direction, GradientSpec};

    #[test]
    fn reference_passes() {
        let report = verify_hypotheses(&CompetitionModel::reference_linear(), DEFAULT_SAMPLES);
        assert!(report.all_passed(), "{report}");
        let report = verify_hypotheses(&CompetitionModel::exponential_figure(), DEFAULT_SAMPLES);
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn weak_saturation_fails_h3() {
        let m = CompetitionModel::reference_linear().with_saturations(0.5, 0.5).unwrap();
        let report = verify_hypotheses(&m, DEFAULT_SAMPLES);
        assert!(!report.get(Hypothesis::H3).passed);
        assert!(report.to_string().contains("H3"));
    }

    #[test]
    fn increasing_f_a_fails_h1_and_gh2() {
        let base = CompetitionModel::reference_linear();
        let fa = GradientSpec::linear(0.5, 1.5, Direction::Decreasing, 0.1).unwrap();
        let m = base.with_gradients(fa, base.f_b().clone()).unwrap();
        let report = verify_hypotheses(&m, 101);
        let h1 = report.get(Hypothesis::H1);
        let gh2 = report.get(Hypothesis::Gh2Signs);
        assert!(!h1.passed && !gh2.passed);
        assert_eq!(h1.first_violation, Some(0.0));
        assert_eq!(gh2.first_violation, Some(0.0));
    }

    #[test]
    fn too_few_samples_are_promoted() {
        assert_eq!(verify_hypotheses(&CompetitionModel::reference_linear(), 0).n_samples, 2);
    }
}
