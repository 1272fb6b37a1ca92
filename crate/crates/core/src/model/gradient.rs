//! Monotone morphogen profiles on `[0, 1]`.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Expected orientation of a gradient along the tissue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Decreasing,
    Increasing,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Decreasing => -1.0,
            Direction::Increasing => 1.0,
        }
    }
}

/// Functional form of a gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GradientFamily {
    /// `intercept + slope * x`
    Linear { intercept: f64, slope: f64 },
    /// `scale * exp(rate * x)`
    Exponential { scale: f64, rate: f64 },
    /// Monotone cubic (Fritsch-Carlson) interpolant through `(knots, values)`.
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
}

/// An evaluable morphogen profile `F(x)` with its floor `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSpec {
    family: GradientFamily,
    direction: Direction,
    floor: f64,
    // Hermite slopes, only populated for the tabulated family.
    slopes: Vec<f64>,
}

impl GradientSpec {
    /// Builds a gradient. Only structural problems are rejected here (bad
    /// knots, non-positive floor); positivity and orientation are checked by
    /// [`GradientSpec::validate`] and the hypothesis checker so that
    /// hypothesis-violating models can still be inspected.
    pub fn new(family: GradientFamily, direction: Direction, floor: f64) -> Result<Self, ModelError> {
        if !(floor > 0.0) || !floor.is_finite() {
            return Err(ModelError::InvalidParameter(format!("gradient floor must be positive, got {floor}")));
        }
        let slopes = match &family {
            GradientFamily::Linear { intercept, slope } => {
                check_finite(&[*intercept, *slope])?;
                Vec::new()
            }
            GradientFamily::Exponential { scale, rate } => {
                check_finite(&[*scale, *rate])?;
                Vec::new()
            }
            GradientFamily::Tabulated { knots, values } => {
                if knots.len() < 2 || knots.len() != values.len() {
                    return Err(ModelError::InvalidParameter(
                        "tabulated gradient needs at least two knots and one value per knot".into(),
                    ));
                }
                check_finite(knots)?;
                check_finite(values)?;
                if knots.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ModelError::InvalidParameter("tabulated knots must be strictly increasing".into()));
                }
                if knots[0] > 0.0 || knots[knots.len() - 1] < 1.0 {
                    return Err(ModelError::InvalidParameter("tabulated knots must cover [0, 1]".into()));
                }
                fritsch_carlson_slopes(knots, values)
            }
        };
        Ok(Self { family, direction, floor, slopes })
    }

    pub fn linear(intercept: f64, slope: f64, direction: Direction, floor: f64) -> Result<Self, ModelError> {
        Self::new(GradientFamily::Linear { intercept, slope }, direction, floor)
    }

    pub fn exponential(scale: f64, rate: f64, direction: Direction, floor: f64) -> Result<Self, ModelError> {
        Self::new(GradientFamily::Exponential { scale, rate }, direction, floor)
    }

    pub fn tabulated(knots: Vec<f64>, values: Vec<f64>, direction: Direction, floor: f64) -> Result<Self, ModelError> {
        Self::new(GradientFamily::Tabulated { knots, values }, direction, floor)
    }

    pub fn family(&self) -> &GradientFamily {
        &self.family
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.family {
            GradientFamily::Linear { intercept, slope } => intercept + slope * x,
            GradientFamily::Exponential { scale, rate } => scale * (rate * x).exp(),
            GradientFamily::Tabulated { knots, values } => {
                let (i, t, w) = locate(knots, x);
                let (h00, h10, h01, h11) = hermite_basis(t);
                h00 * values[i] + h10 * w * self.slopes[i] + h01 * values[i + 1] + h11 * w * self.slopes[i + 1]
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.family {
            GradientFamily::Linear { slope, .. } => *slope,
            GradientFamily::Exponential { scale, rate } => scale * rate * (rate * x).exp(),
            GradientFamily::Tabulated { knots, values } => {
                let (i, t, w) = locate(knots, x);
                let d00 = 6.0 * t * t - 6.0 * t;
                let d10 = 3.0 * t * t - 4.0 * t + 1.0;
                let d01 = -d00;
                let d11 = 3.0 * t * t - 2.0 * t;
                (d00 * values[i] + d01 * values[i + 1]) / w + d10 * self.slopes[i] + d11 * self.slopes[i + 1]
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match &self.family {
            GradientFamily::Linear { .. } => 0.0,
            GradientFamily::Exponential { scale, rate } => scale * rate * rate * (rate * x).exp(),
            GradientFamily::Tabulated { knots, values } => {
                let (i, t, w) = locate(knots, x);
                let s00 = 12.0 * t - 6.0;
                let s10 = 6.0 * t - 4.0;
                let s11 = 6.0 * t - 2.0;
                (s00 * (values[i] - values[i + 1])) / (w * w) + (s10 * self.slopes[i] + s11 * self.slopes[i + 1]) / w
            }
        }
    }

    /// Largest value on `[0, 1]`; attained at an endpoint for monotone profiles.
    pub fn max_value(&self) -> f64 {
        self.value(0.0).max(self.value(1.0))
    }

    /// First sample point violating `F(x) > floor`, if any.
    pub fn first_floor_violation(&self, n_samples: usize) -> Option<f64> {
        sample(n_samples).find(|&x| !(self.value(x) > self.floor))
    }

    /// First sample point where the slope does not have the declared sign.
    pub fn first_direction_violation(&self, n_samples: usize) -> Option<f64> {
        let sign = self.direction.sign();
        sample(n_samples).find(|&x| !(sign * self.derivative(x) > 0.0))
    }

    /// Checks both invariants on a dense sample.
    pub fn validate(&self, n_samples: usize) -> Result<(), ModelError> {
        if let Some(x) = self.first_floor_violation(n_samples) {
            return Err(ModelError::Hypothesis(format!(
                "gradient value {} at x={x} is not above floor {}",
                self.value(x),
                self.floor
            )));
        }
        if let Some(x) = self.first_direction_violation(n_samples) {
            return Err(ModelError::Hypothesis(format!(
                "gradient slope {} at x={x} does not match {:?}",
                self.derivative(x),
                self.direction
            )));
        }
        Ok(())
    }
}

pub(crate) fn sample(n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

fn check_finite(values: &[f64]) -> Result<(), ModelError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter("gradient parameters must be finite".into()))
    }
}

fn locate(knots: &[f64], x: f64) -> (usize, f64, f64) {
    let last = knots.len() - 2;
    let i = match knots.binary_search_by(|k| k.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(last),
        Err(i) => i.saturating_sub(1).min(last),
    };
    let w = knots[i + 1] - knots[i];
    (i, (x - knots[i]) / w, w)
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2)
}

fn fritsch_carlson_slopes(knots: &[f64], values: &[f64]) -> Vec<f64> {
    let n = knots.len();
    let secants: Vec<f64> = (0..n - 1)
        .map(|i| (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = secants[0];
    m[n - 1] = secants[n - 2];
    for i in 1..n - 1 {
        m[i] = if secants[i - 1] * secants[i] <= 0.0 { 0.0 } else { 0.5 * (secants[i - 1] + secants[i]) };
    }
    for i in 0..n - 1 {
        let d = secants[i];
        if d == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let alpha = m[i] / d;
        let beta = m[i + 1] / d;
        let r = alpha * alpha + beta * beta;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * alpha * d;
            m[i + 1] = tau * beta * d;
        }
    }
    m
}
