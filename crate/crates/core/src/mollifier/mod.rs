//! Gaussian-smoothed orthant indicators and the shifted approximators used
//! to compare soft and hard acceptance.

pub mod normal;

pub use normal::{erfc, normal_cdf};

use crate::error::{Error, Result};
use crate::polytope::{classify_image, BoundaryClass};
use serde::{Deserialize, Serialize};

/// Largest double below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// `E[1[t + λg <= θ]] = Φ((θ - t)/λ)`.
pub fn halfline(theta: f64, lambda: f64, t: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
    }
    Ok(normal_cdf((theta - t) / lambda))
}

/// The product mollifier `v ↦ ∏_i Φ((b_i - v_i)/λ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub b: Vec<f64>,
    pub lambda: f64,
}

impl MollifierSpec {
    pub fn new(b: Vec<f64>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(MollifierSpec { b, lambda })
    }

    /// Value at `v`, clamped into the open interval `(0, 1)` when the
    /// product underflows to 0 or rounds to 1.
    pub fn value(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.b.len() {
            return Err(Error::DimensionMismatch {
                expected: self.b.len(),
                actual: v.len(),
            });
        }
        let p: f64 = self
            .b
            .iter()
            .zip(v)
            .map(|(&b, &x)| normal_cdf((b - x) / self.lambda))
            .product();
        Ok(p.clamp(f64::MIN_POSITIVE, BELOW_ONE))
    }

    pub fn shifted(&self, shift: f64) -> Self {
        MollifierSpec {
            b: self.b.iter().map(|x| x + shift).collect(),
            lambda: self.lambda,
        }
    }
}

/// Both sides of `Õ_{b,λ}(v + Δ) = Õ_{b-v,λ}(Δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub const TRANSLATION_TOLERANCE: f64 = 1e-12;

pub fn translation_identity_check(spec: &MollifierSpec, v: &[f64], delta: &[f64]) -> Result<TranslationCheck> {
    if delta.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            actual: delta.len(),
        });
    }
    let moved: Vec<f64> = v.iter().zip(delta).map(|(a, d)| a + d).collect();
    let lhs = spec.value(&moved)?;
    let rebased = MollifierSpec {
        b: spec.b.iter().zip(v).map(|(b, x)| b - x).collect(),
        lambda: spec.lambda,
    };
    let rhs = rebased.value(delta)?;
    Ok(TranslationCheck {
        lhs,
        rhs,
        holds: (lhs - rhs).abs() <= TRANSLATION_TOLERANCE,
    })
}

/// Mollifiers at `b ∓ β·1`, with the boundary width `Λ` they are accurate
/// outside of.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximatorPair {
    pub b_in: Vec<f64>,
    pub b_out: Vec<f64>,
    pub beta: f64,
    #[serde(rename = "Lambda")]
    pub width: f64,
    pub lambda: f64,
}

impl ApproximatorPair {
    pub fn inner(&self) -> MollifierSpec {
        MollifierSpec {
            b: self.b_in.clone(),
            lambda: self.lambda,
        }
    }

    pub fn outer(&self) -> MollifierSpec {
        MollifierSpec {
            b: self.b_out.clone(),
            lambda: self.lambda,
        }
    }
}

/// `β = c_β λ √(2 ln(m/δ))` and `Λ = β + λ √(2 ln(m/δ))`.
///
/// With `c_β >= 1`, `Φ(-β/λ) <= δ/(2m)` and `Φ((β - Λ)/λ) <= δ/(2m)`, which
/// is what both halves of the sandwich property need.
pub fn approximators(b: &[f64], lambda: f64, m: usize, delta: f64, c_beta: f64) -> Result<ApproximatorPair> {
    if !(lambda > 0.0) || !(delta > 0.0 && delta < 1.0) || m == 0 || !(c_beta > 0.0) {
        return Err(Error::InvalidParameter(
            "approximators need lambda > 0, delta in (0,1), m >= 1 and c_beta > 0".into(),
        ));
    }
    let tail = lambda * (2.0 * (m as f64 / delta).ln()).sqrt();
    let beta = c_beta * tail;
    Ok(ApproximatorPair {
        b_in: b.iter().map(|x| x - beta).collect(),
        b_out: b.iter().map(|x| x + beta).collect(),
        beta,
        width: beta + tail,
        lambda,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichPoint {
    pub class: BoundaryClass,
    pub hard: bool,
    pub inner: f64,
    pub outer: f64,
    pub inner_checked: bool,
    pub outer_checked: bool,
    pub inner_violation: bool,
    pub outer_violation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub delta: f64,
    #[serde(rename = "Lambda")]
    pub width: f64,
    pub points: Vec<SandwichPoint>,
    pub inner_violations: usize,
    pub outer_violations: usize,
    /// Largest `|Υ(v) - O_b(v)|` over the checked points, per side.
    pub inner_slack: f64,
    pub outer_slack: f64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.inner_violations == 0 && self.outer_violations == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Checks the inner approximator outside the inner strip and the outer one
/// outside the outer strip, for each supplied image point.
pub fn sandwich_check(b: &[f64], pair: &ApproximatorPair, delta: f64, points: &[Vec<f64>]) -> Result<SandwichReport> {
    let inner = pair.inner();
    let outer = pair.outer();
    let mut report = SandwichReport {
        delta,
        width: pair.width,
        points: Vec::with_capacity(points.len()),
        inner_violations: 0,
        outer_violations: 0,
        inner_slack: 0.0,
        outer_slack: 0.0,
    };
    for v in points {
        let class = classify_image(v, b, pair.width);
        let hard_inside = matches!(class, BoundaryClass::DeepInside | BoundaryClass::InnerBoundary);
        let hard = if hard_inside { 1.0 } else { 0.0 };
        let vi = inner.value(v)?;
        let vo = outer.value(v)?;
        let inner_checked = class != BoundaryClass::InnerBoundary;
        let outer_checked = class != BoundaryClass::OuterBoundary;
        let inner_violation = inner_checked && (vi - hard).abs() > delta;
        let outer_violation = outer_checked && (vo - hard).abs() > delta;
        if inner_checked {
            report.inner_slack = report.inner_slack.max((vi - hard).abs());
        }
        if outer_checked {
            report.outer_slack = report.outer_slack.max((vo - hard).abs());
        }
        report.inner_violations += inner_violation as usize;
        report.outer_violations += outer_violation as usize;
        report.points.push(SandwichPoint {
            class,
            hard: hard_inside,
            inner: vi,
            outer: vo,
            inner_checked,
            outer_checked,
            inner_violation,
            outer_violation,
        });
    }
    Ok(report)
}

/// Number of points violating `Υ_in(v) - δ <= O_b(v) <= Υ_out(v) + δ`.
pub fn two_sided_violations(b: &[f64], pair: &ApproximatorPair, delta: f64, points: &[Vec<f64>]) -> Result<usize> {
    let inner = pair.inner();
    let outer = pair.outer();
    let mut bad = 0;
    for v in points {
        let hard = if v.iter().zip(b).all(|(x, t)| x <= t) { 1.0 } else { 0.0 };
        if inner.value(v)? - delta > hard || hard > outer.value(v)? + delta {
            bad += 1;
        }
    }
    Ok(bad)
}
