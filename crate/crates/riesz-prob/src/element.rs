//! The concrete Riesz space: componentwise-ordered real `d`-tuples with the
//! all-ones weak order unit `e`, lattice operations, componentwise
//! multiplication, and band projections given by coordinate masks.
//!
//! Values are immutable; every operation returns a fresh value, so everything
//! here is safe to share across threads without synchronization.

use serde::de::{Deserializer, Error as DeError};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the model space: a tuple of finite reals ordered componentwise.
///
/// Every entry must be a finite real; `new` rejects NaN and infinities so
/// that lattice identities hold exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    values: Vec<f64>,
}

impl Element {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidElement("dimension must be at least 1".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidElement(format!(
                "entry {i} is not a finite real (got {v})"
            )));
        }
        Ok(Self { values })
    }

    /// Internal constructor for values produced by operations that preserve
    /// finiteness.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
        Self { values }
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; dim])
    }

    /// The weak order unit `e`: all entries 1.
    pub fn unit(dim: usize) -> Self {
        Self::from_vec_unchecked(vec![1.0; dim])
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_vec_unchecked(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_vec_unchecked(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec_unchecked(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Componentwise supremum `x ∨ y`.
    pub fn sup(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::max)
    }

    /// Componentwise infimum `x ∧ y`.
    pub fn inf(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::min)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// Positive part `x⁺ = x ∨ 0`.
    pub fn pos_part(&self) -> Self {
        self.map(|v| v.max(0.0))
    }

    /// Negative part `x⁻ = (−x) ∨ 0`, so that `x = x⁺ − x⁻`.
    pub fn neg_part(&self) -> Self {
        self.map(|v| (-v).max(0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }

    /// Componentwise product, the multiplication of the f-algebra generated
    /// by `e`. `e` is the multiplicative unit.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// The unit norm `‖x‖_e = inf{β : |x| ≤ βe}`, i.e. the max-abs entry.
    pub fn e_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs())))
    }

    /// Componentwise `x ≤ y` (exact).
    pub fn le(&self, other: &Self) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(&a, &b)| a <= b))
    }

    pub fn ge(&self, other: &Self) -> Result<bool> {
        other.le(self)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.values.len()))?;
        for v in &self.values {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(deserializer)?;
        Element::new(values).map_err(DeError::custom)
    }
}

/// An order projection onto a band, concretely a coordinate mask.
///
/// Applying a projection twice equals applying it once, and projections
/// commute with lattice operations on their band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandProjection {
    mask: Vec<bool>,
}

impl BandProjection {
    pub fn new(mask: Vec<bool>) -> Result<Self> {
        if mask.is_empty() {
            return Err(Error::InvalidElement("dimension must be at least 1".into()));
        }
        Ok(Self { mask })
    }

    pub fn identity(dim: usize) -> Self {
        Self { mask: vec![true; dim] }
    }

    pub fn zero(dim: usize) -> Self {
        Self { mask: vec![false; dim] }
    }

    pub fn dim(&self) -> usize {
        self.mask.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_identity(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    pub fn is_zero(&self) -> bool {
        self.mask.iter().all(|&b| !b)
    }

    /// Zeroes masked-out coordinates.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        if self.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(Element::from_vec_unchecked(
            x.values()
                .iter()
                .zip(&self.mask)
                .map(|(&v, &m)| if m { v } else { 0.0 })
                .collect(),
        ))
    }

    /// The complementary projection `Pᵈ = I − P`.
    pub fn complement(&self) -> Self {
        Self {
            mask: self.mask.iter().map(|&b| !b).collect(),
        }
    }

    /// Composition of band projections: intersection of bands.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a && b)
                .collect(),
        })
    }

    /// `P e`, the indicator element of the band.
    pub fn indicator(&self) -> Element {
        Element::from_vec_unchecked(
            self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        )
    }
}

impl Serialize for BandProjection {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.mask.len()))?;
        for b in &self.mask {
            seq.serialize_element(&(*b as u8))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for BandProjection {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(deserializer)?;
        if bits.is_empty() {
            return Err(DeError::custom("projection mask must be nonempty"));
        }
        let mask = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(DeError::custom(format!(
                    "projection mask entries must be 0 or 1, got {other}"
                ))),
            })
            .collect::<std::result::Result<Vec<bool>, D::Error>>()?;
        Ok(BandProjection { mask })
    }
}

/// The band projection generated by `x`: mask true exactly where `x` is
/// nonzero.
pub fn band_of(x: &Element) -> BandProjection {
    BandProjection {
        mask: x.values().iter().map(|&v| v != 0.0).collect(),
    }
}

fn comparison_proj(x: &Element, y: &Element, cmp: impl Fn(f64, f64) -> bool) -> Result<BandProjection> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(BandProjection {
        mask: x
            .values()
            .iter()
            .zip(y.values())
            .map(|(&a, &b)| cmp(a, b))
            .collect(),
    })
}

/// `P_{x≥y}`, the complement of the band generated by `(y−x)⁺`.
pub fn proj_geq(x: &Element, y: &Element) -> Result<BandProjection> {
    comparison_proj(x, y, |a, b| a >= b)
}

/// `P_{x>y}`, the band generated by `(x−y)⁺`.
pub fn proj_gt(x: &Element, y: &Element) -> Result<BandProjection> {
    comparison_proj(x, y, |a, b| a > b)
}

/// `P_{x=y}`, the complement of the band generated by `|x−y|`.
///
/// Comparison is exact: equality bands are set-theoretic and a fuzzy
/// comparison would break the partition-of-unity invariant.
pub fn proj_eq(x: &Element, y: &Element) -> Result<BandProjection> {
    comparison_proj(x, y, |a, b| a == b)
}
