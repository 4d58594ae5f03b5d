//! The conditional expectation operator: weighted block averaging over a
//! partition of coordinates.
//!
//! A triple bundles the space dimension, strictly positive weights, and a
//! partition of the coordinates. The operator `T = expect` averages within
//! each block; its range consists of the block-constant elements. `T` is a
//! strictly positive projection with `Te = e`, and it is invariant under
//! rescaling of the weights (weights are normalized per block when
//! averaging, raw weights are kept for serialization).
//!
//! Order continuity of `T` needs no separate check here: in finite
//! dimension every positive linear map is order continuous.

use serde::de::Error as DeError;
use serde::{Deserialize, Serialize};

use crate::distributions::NaturalElement;
use crate::element::{BandProjection, Element};
use crate::error::{Error, Result};

/// Absolute slack used by the factorization and multiplicativity checks.
pub const FACTORIZATION_TOL: f64 = 1e-12;

/// Largest projection family accepted by the independence check; subset
/// enumeration is exponential.
pub const MAX_INDEPENDENT_FAMILY: usize = 12;

/// The concrete conditional probability structure: dimension, strictly
/// positive outcome weights, and a partition of the coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTriple {
    weights: Vec<f64>,
    partition: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    block_weight: Vec<f64>,
}

impl ConditionalTriple {
    pub fn new(weights: Vec<f64>, partition: Vec<Vec<usize>>) -> Result<Self> {
        let dim = weights.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "weight {i} must be strictly positive and finite, got {w}"
                )));
            }
        }
        if partition.is_empty() {
            return Err(Error::InvalidArgument("partition must have at least one block".into()));
        }
        let mut block_of = vec![usize::MAX; dim];
        for (b, block) in partition.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidArgument(format!("partition block {b} is empty")));
            }
            for &i in block {
                if i >= dim {
                    return Err(Error::InvalidArgument(format!(
                        "partition block {b} references coordinate {i} but dim is {dim}"
                    )));
                }
                if block_of[i] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "coordinate {i} appears in more than one block"
                    )));
                }
                block_of[i] = b;
            }
        }
        if let Some(i) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidArgument(format!(
                "coordinate {i} is not covered by the partition"
            )));
        }
        let block_weight = partition
            .iter()
            .map(|block| block.iter().map(|&i| weights[i]).sum())
            .collect();
        Ok(Self {
            weights,
            partition,
            block_of,
            block_weight,
        })
    }

    /// A one-point space; the smallest usable base for product constructions.
    pub fn point() -> Self {
        Self::new(vec![1.0], vec![vec![0]]).unwrap()
    }

    /// The bundled golden instance: four equally weighted outcomes in two
    /// blocks {0,1} and {2,3}.
    pub fn canonical() -> Self {
        Self::new(vec![0.25; 4], vec![vec![0, 1], vec![2, 3]]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.partition.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn partition(&self) -> &[Vec<usize>] {
        &self.partition
    }

    pub fn block_of(&self, coord: usize) -> usize {
        self.block_of[coord]
    }

    /// The weak order unit of this space.
    pub fn unit(&self) -> Element {
        Element::unit(self.dim())
    }

    fn check_dim(&self, x: &Element) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// The conditional expectation `Tx`: on each block every coordinate of
    /// the result carries the weighted block average. The result is exactly
    /// block-constant by construction.
    pub fn expect(&self, x: &Element) -> Result<Element> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.dim()];
        for (b, block) in self.partition.iter().enumerate() {
            let s: f64 = block.iter().map(|&i| self.weights[i] * x.get(i)).sum();
            let avg = s / self.block_weight[b];
            for &i in block {
                out[i] = avg;
            }
        }
        Element::new(out)
    }

    /// `T(Pe)` for a band projection: the conditional probability of the
    /// band.
    pub fn expect_indicator(&self, p: &BandProjection) -> Result<Element> {
        self.expect(&p.indicator())
    }

    /// True iff `x` lies in the range of `T`, i.e. is constant on every
    /// block (exact comparison).
    pub fn in_range(&self, x: &Element) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        self.partition.iter().all(|block| {
            let v = x.get(block[0]);
            block.iter().all(|&i| x.get(i) == v)
        })
    }

    /// Builds the block-constant element with the given value per block.
    pub fn from_block_values(&self, vals: &[f64]) -> Result<Element> {
        if vals.len() != self.n_blocks() {
            return Err(Error::InvalidArgument(format!(
                "expected {} block values, got {}",
                self.n_blocks(),
                vals.len()
            )));
        }
        let mut out = vec![0.0; self.dim()];
        for (b, block) in self.partition.iter().enumerate() {
            for &i in block {
                out[i] = vals[b];
            }
        }
        Element::new(out)
    }

    /// Reads the per-block values of a block-constant element.
    pub fn block_values(&self, x: &Element) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if !self.in_range(x) {
            return Err(Error::InvalidArgument(
                "element is not block-constant".into(),
            ));
        }
        Ok(self.partition.iter().map(|block| x.get(block[0])).collect())
    }

    /// Checks whether a family of band projections factorizes under `T`:
    /// for every nonempty subset, the expectation of the composed projection
    /// applied to `e` equals the product of the individual expectations.
    pub fn check_projections_independent(&self, projections: &[BandProjection]) -> Result<bool> {
        for p in projections {
            if p.dim() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    found: p.dim(),
                });
            }
        }
        let m = projections.len();
        if m > MAX_INDEPENDENT_FAMILY {
            return Err(Error::Precondition(format!(
                "independence check limited to families of {MAX_INDEPENDENT_FAMILY} projections, got {m}"
            )));
        }
        let expectations: Vec<Element> = projections
            .iter()
            .map(|p| self.expect_indicator(p))
            .collect::<Result<_>>()?;
        for subset in 1u32..(1u32 << m) {
            let mut composed = BandProjection::identity(self.dim());
            let mut product = self.unit();
            for (j, p) in projections.iter().enumerate() {
                if subset & (1 << j) != 0 {
                    composed = composed.compose(p)?;
                    product = product.multiply(&expectations[j])?;
                }
            }
            let lhs = self.expect_indicator(&composed)?;
            if lhs.max_abs_diff(&product)? > FACTORIZATION_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks independence of two natural elements via factorization over
    /// their equality bands at every pair of attained values.
    pub fn check_elements_independent(&self, x: &NaturalElement, y: &NaturalElement) -> Result<bool> {
        self.check_dim(x.element())?;
        self.check_dim(y.element())?;
        for n in x.attained_values() {
            let px = x.eq_band(n);
            let ex = self.expect_indicator(&px)?;
            for k in y.attained_values() {
                let py = y.eq_band(k);
                let lhs = self.expect_indicator(&px.compose(&py)?)?;
                let rhs = ex.multiply(&self.expect_indicator(&py)?)?;
                if lhs.max_abs_diff(&rhs)? > FACTORIZATION_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Verifies the product identity `T(xy) = Tx · Ty`, which holds whenever
    /// `x` and `y` are independent with respect to `T`.
    pub fn check_multiplicativity(&self, x: &Element, y: &Element) -> Result<MultiplicativityReport> {
        let lhs = self.expect(&x.multiply(y)?)?;
        let rhs = self.expect(x)?.multiply(&self.expect(y)?)?;
        let mut worst_coord = 0;
        let mut max_abs_err = 0.0f64;
        for i in 0..self.dim() {
            let err = (lhs.get(i) - rhs.get(i)).abs();
            if err > max_abs_err {
                max_abs_err = err;
                worst_coord = i;
            }
        }
        Ok(MultiplicativityReport {
            holds: max_abs_err <= FACTORIZATION_TOL,
            max_abs_err,
            worst_coord,
        })
    }

    /// The product of two spaces: outcomes are pairs, weights multiply, and
    /// the partition is the pairwise product of blocks. The returned lifts
    /// embed each factor; lifted natural elements from distinct factors are
    /// independent by construction.
    pub fn product(t1: &Self, t2: &Self) -> (Self, Lift, Lift) {
        let d1 = t1.dim();
        let d2 = t2.dim();
        let mut weights = Vec::with_capacity(d1 * d2);
        for i in 0..d1 {
            for j in 0..d2 {
                weights.push(t1.weights[i] * t2.weights[j]);
            }
        }
        let mut partition = Vec::with_capacity(t1.n_blocks() * t2.n_blocks());
        for b1 in &t1.partition {
            for b2 in &t2.partition {
                let mut block = Vec::with_capacity(b1.len() * b2.len());
                for &i in b1 {
                    for &j in b2 {
                        block.push(i * d2 + j);
                    }
                }
                partition.push(block);
            }
        }
        let triple = Self::new(weights, partition).expect("product of valid triples is valid");
        let lift1 = Lift::new((0..d1 * d2).map(|c| c / d2).collect(), d1).unwrap();
        let lift2 = Lift::new((0..d1 * d2).map(|c| c % d2).collect(), d2).unwrap();
        (triple, lift1, lift2)
    }
}

/// Result of a multiplicativity check, with the offending coordinate when it
/// fails.
#[derive(Debug, Clone)]
pub struct MultiplicativityReport {
    pub holds: bool,
    pub max_abs_err: f64,
    pub worst_coord: usize,
}

#[derive(Serialize, Deserialize)]
struct TripleWire {
    dim: usize,
    weights: Vec<f64>,
    partition: Vec<Vec<usize>>,
}

impl Serialize for ConditionalTriple {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TripleWire {
            dim: self.dim(),
            weights: self.weights.clone(),
            partition: self.partition.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConditionalTriple {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = TripleWire::deserialize(deserializer)?;
        if wire.dim != wire.weights.len() {
            return Err(DeError::custom(format!(
                "dim field is {} but {} weights were given",
                wire.dim,
                wire.weights.len()
            )));
        }
        ConditionalTriple::new(wire.weights, wire.partition).map_err(DeError::custom)
    }
}

/// An embedding of one space into an extension, stored as the index map
/// sending each extended coordinate to its source coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lift {
    map: Vec<usize>,
    source_dim: usize,
}

impl Lift {
    pub fn new(map: Vec<usize>, source_dim: usize) -> Result<Self> {
        if map.is_empty() || source_dim == 0 {
            return Err(Error::InvalidArgument("lift must have positive dimensions".into()));
        }
        let mut seen = vec![false; source_dim];
        for &s in &map {
            if s >= source_dim {
                return Err(Error::InvalidArgument(format!(
                    "lift references source coordinate {s} but source dim is {source_dim}"
                )));
            }
            seen[s] = true;
        }
        if let Some(i) = seen.iter().position(|&b| !b) {
            return Err(Error::InvalidArgument(format!(
                "source coordinate {i} has no preimage in the lift"
            )));
        }
        Ok(Self { map, source_dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            map: (0..dim).collect(),
            source_dim: dim,
        }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.map.len()
    }

    /// The index map, target coordinate to source coordinate.
    pub fn index_map(&self) -> &[usize] {
        &self.map
    }

    /// Lifts an element of the source space into the extension.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.dim() != self.source_dim {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim,
                found: x.dim(),
            });
        }
        Ok(Element::from_vec_unchecked(
            self.map.iter().map(|&s| x.get(s)).collect(),
        ))
    }

    pub fn apply_projection(&self, p: &BandProjection) -> Result<BandProjection> {
        if p.dim() != self.source_dim {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim,
                found: p.dim(),
            });
        }
        BandProjection::new(self.map.iter().map(|&s| p.mask()[s]).collect())
    }

    /// Reads a lifted element back on the source space; the element must be
    /// constant on the fibers of the lift (block-constant results of
    /// `expect` on lifted partitions always are).
    pub fn restrict(&self, y: &Element) -> Result<Element> {
        if y.dim() != self.target_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.target_dim(),
                found: y.dim(),
            });
        }
        let mut out = vec![f64::NAN; self.source_dim];
        for (t, &s) in self.map.iter().enumerate() {
            if out[s].is_nan() {
                out[s] = y.get(t);
            } else if out[s] != y.get(t) {
                return Err(Error::InvalidArgument(format!(
                    "element is not constant on the fiber over source coordinate {s}"
                )));
            }
        }
        Element::new(out)
    }

    /// Composes two embeddings: `first` maps A into B, `second` maps B into
    /// C; the result maps A into C.
    pub fn compose(first: &Lift, second: &Lift) -> Result<Lift> {
        if second.source_dim != first.target_dim() {
            return Err(Error::DimensionMismatch {
                expected: first.target_dim(),
                found: second.source_dim,
            });
        }
        Lift::new(
            second.map.iter().map(|&b| first.map[b]).collect(),
            first.source_dim,
        )
    }
}
