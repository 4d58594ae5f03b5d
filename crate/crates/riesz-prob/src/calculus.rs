//! Functional calculus on elements: spectral systems, step functions on
//! half-open intervals, and pointwise evaluation of real functions.
//!
//! In the finite-dimensional model the spectral integral of a function
//! against an element collapses to pointwise evaluation at the coordinate
//! values, which is what `apply_fn` computes; `apply_step` follows the
//! spectral-difference construction and must agree with it.

use serde::{Deserialize, Serialize};

use crate::element::{proj_geq, BandProjection, Element};
use crate::error::{Error, Result};

/// One piece of a step function: the constant `value` on the half-open
/// interval `(a, b]`. `a = −∞` and `b = +∞` are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPiece {
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

/// A function which is a finite linear combination of indicators of disjoint
/// left-open right-closed intervals, and 0 outside its pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pieces: Vec<StepPiece>,
}

impl StepFunction {
    /// Builds a step function from pieces; intervals must be pairwise
    /// disjoint and values finite.
    pub fn new(mut pieces: Vec<StepPiece>) -> Result<Self> {
        for p in &pieces {
            if p.a.is_nan() || p.b.is_nan() || !p.value.is_finite() {
                return Err(Error::Domain("step piece with NaN bound or non-finite value".into()));
            }
            if !(p.a < p.b) {
                return Err(Error::Domain(format!(
                    "empty interval ({}, {}]",
                    p.a, p.b
                )));
            }
        }
        pieces.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
        for w in pieces.windows(2) {
            // (a₁,b₁] and (a₂,b₂] with a₁ ≤ a₂ are disjoint iff b₁ ≤ a₂
            if w[0].b > w[1].a {
                return Err(Error::Domain(format!(
                    "overlapping intervals ({}, {}] and ({}, {}]",
                    w[0].a, w[0].b, w[1].a, w[1].b
                )));
            }
        }
        Ok(Self { pieces })
    }

    pub fn zero() -> Self {
        Self { pieces: Vec::new() }
    }

    /// The indicator of `(a, b]`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![StepPiece { a, b, value: 1.0 }])
    }

    pub fn pieces(&self) -> &[StepPiece] {
        &self.pieces
    }

    /// Pointwise evaluation; 0 outside all pieces.
    pub fn eval_at(&self, t: f64) -> f64 {
        for p in &self.pieces {
            if p.a < t && t <= p.b {
                return p.value;
            }
        }
        0.0
    }
}

/// Serialization shape: `{a, b, value}` with `null` for an infinite bound.
#[derive(Serialize, Deserialize)]
struct StepPieceWire {
    a: Option<f64>,
    b: Option<f64>,
    value: f64,
}

impl Serialize for StepFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire: Vec<StepPieceWire> = self
            .pieces
            .iter()
            .map(|p| StepPieceWire {
                a: if p.a == f64::NEG_INFINITY { None } else { Some(p.a) },
                b: if p.b == f64::INFINITY { None } else { Some(p.b) },
                value: p.value,
            })
            .collect();
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = Vec::<StepPieceWire>::deserialize(deserializer)?;
        let pieces = wire
            .into_iter()
            .map(|w| StepPiece {
                a: w.a.unwrap_or(f64::NEG_INFINITY),
                b: w.b.unwrap_or(f64::INFINITY),
                value: w.value,
            })
            .collect();
        StepFunction::new(pieces).map_err(serde::de::Error::custom)
    }
}

/// The right-continuous spectral system of an element: the family of
/// projections `t ↦ P_{x≤te}`, together with the sorted distinct coordinate
/// values where the system jumps.
#[derive(Debug, Clone)]
pub struct SpectralSystem {
    element: Element,
    thresholds: Vec<f64>,
}

impl SpectralSystem {
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// The projection `P_{x≤te}`; constant between consecutive thresholds,
    /// zero below the smallest coordinate and the identity above the largest.
    pub fn at(&self, t: f64) -> BandProjection {
        // mask true exactly where x_i ≤ t
        let te = Element::from_vec_unchecked(vec![t; self.element.dim()]);
        proj_geq(&te, &self.element).expect("dims match by construction")
    }
}

pub fn spectral_system(x: &Element) -> SpectralSystem {
    let mut thresholds: Vec<f64> = x.values().to_vec();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();
    SpectralSystem {
        element: x.clone(),
        thresholds,
    }
}

/// Applies a step function to an element via spectral differences:
/// `f(x) = Σ value · (e_b^x − e_a^x)` over the pieces. Equals pointwise
/// application coordinate by coordinate.
pub fn apply_step(f: &StepFunction, x: &Element) -> Element {
    let system = spectral_system(x);
    let mut acc = vec![0.0; x.dim()];
    for p in f.pieces() {
        let upper = if p.b == f64::INFINITY {
            BandProjection::identity(x.dim()).indicator()
        } else {
            system.at(p.b).indicator()
        };
        let lower = if p.a == f64::NEG_INFINITY {
            Element::zero(x.dim())
        } else {
            system.at(p.a).indicator()
        };
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot += p.value * (upper.get(i) - lower.get(i));
        }
    }
    Element::from_vec_unchecked(acc)
}

/// Applies a real function coordinatewise: coordinate `i` carries `f(x_i)`.
///
/// The function must be finite at every coordinate value of `x`; a NaN or
/// infinite result is a domain error. Functions with infinite values are
/// rejected rather than modeled.
pub fn apply_fn(f: impl Fn(f64) -> f64, x: &Element) -> Result<Element> {
    let mut out = Vec::with_capacity(x.dim());
    for (i, &v) in x.values().iter().enumerate() {
        let r = f(v);
        if !r.is_finite() {
            return Err(Error::Domain(format!(
                "function not finite at coordinate value {v} (index {i}): got {r}"
            )));
        }
        out.push(r);
    }
    Ok(Element::from_vec_unchecked(out))
}

/// `s^x` coordinatewise, for `s ≥ 0`.
///
/// For `s = 0` the element must be nonnegative and the convention `0⁰ = 1`
/// applies.
pub fn power_element(s: f64, x: &Element) -> Result<Element> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("negative base {s} for power of an element")));
    }
    if s == 0.0 {
        if let Some(&v) = x.values().iter().find(|&&v| v < 0.0) {
            return Err(Error::Domain(format!(
                "0^x undefined for negative coordinate {v}"
            )));
        }
        return Ok(x.map(|v| if v == 0.0 { 1.0 } else { 0.0 }));
    }
    apply_fn(|v| s.powf(v), x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: &[f64]) -> Element {
        Element::new(v.to_vec()).unwrap()
    }

    #[test]
    fn spectral_system_thresholds() {
        let x = el(&[0.0, 1.0, 1.0, 2.0]);
        let sys = spectral_system(&x);
        assert_eq!(sys.thresholds(), &[0.0, 1.0, 2.0]);
        assert_eq!(sys.at(1.0).indicator(), el(&[1.0, 1.0, 1.0, 0.0]));
        assert!(sys.at(100.0).is_identity());
        assert!(sys.at(-1.0).is_zero());
        // right continuity: constant on [v_k, v_{k+1})
        assert_eq!(sys.at(1.0), sys.at(1.5));
        assert_eq!(sys.at(0.0), sys.at(0.99));
    }

    #[test]
    fn step_application_matches_pointwise() {
        let x = el(&[0.0, 1.0, 1.0, 2.0]);
        let f = StepFunction::indicator(0.0, 1.0).unwrap();
        assert_eq!(apply_step(&f, &x), el(&[0.0, 1.0, 1.0, 0.0]));
        let total = StepFunction::indicator(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert_eq!(apply_step(&total, &x), Element::unit(4));
        assert_eq!(apply_step(&StepFunction::zero(), &x), Element::zero(4));
    }

    #[test]
    fn function_application_is_pointwise() {
        let x = el(&[0.0, 1.0, 1.0, 2.0]);
        assert_eq!(
            apply_fn(|t| 0.5f64.powf(t), &x).unwrap(),
            el(&[1.0, 0.5, 0.5, 0.25])
        );
        assert_eq!(apply_fn(|t| t, &x).unwrap(), x);
        assert_eq!(apply_fn(|t| t * t, &x).unwrap(), el(&[0.0, 1.0, 1.0, 4.0]));
    }

    #[test]
    fn undefined_values_are_domain_errors() {
        let x = el(&[0.0, 1.0]);
        assert!(apply_fn(|t| 1.0 / t, &x).is_err());
        assert!(apply_fn(|t| (t - 2.0).ln(), &x).is_err());
    }

    #[test]
    fn power_element_conventions() {
        let x = el(&[0.0, 1.0, 1.0, 2.0]);
        assert_eq!(power_element(1.0, &x).unwrap(), Element::unit(4));
        assert_eq!(power_element(0.5, &x).unwrap(), el(&[1.0, 0.5, 0.5, 0.25]));
        assert_eq!(power_element(0.7, &Element::zero(3)).unwrap(), Element::unit(3));
        // 0^0 = 1, 0^n = 0
        assert_eq!(power_element(0.0, &x).unwrap(), el(&[1.0, 0.0, 0.0, 0.0]));
        assert!(power_element(-1.0, &x).is_err());
        assert!(power_element(0.0, &el(&[-1.0])).is_err());
    }

    #[test]
    fn step_function_rejects_overlap() {
        assert!(StepFunction::new(vec![
            StepPiece { a: 0.0, b: 2.0, value: 1.0 },
            StepPiece { a: 1.0, b: 3.0, value: 2.0 },
        ])
        .is_err());
        // touching intervals are fine: (0,1] and (1,2]
        assert!(StepFunction::new(vec![
            StepPiece { a: 0.0, b: 1.0, value: 1.0 },
            StepPiece { a: 1.0, b: 2.0, value: 2.0 },
        ])
        .is_ok());
    }

    #[test]
    fn step_function_serde_uses_null_for_infinite_bounds() {
        let f = StepFunction::new(vec![StepPiece {
            a: f64::NEG_INFINITY,
            b: 1.0,
            value: 2.0,
        }])
        .unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"[{"a":null,"b":1.0,"value":2.0}]"#);
        let back: StepFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
