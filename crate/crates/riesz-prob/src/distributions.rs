//! Natural elements, mass and distribution functions, named distribution
//! families, equality in distribution, and realization of finite
//! distributions on constructed spaces.
//!
//! A natural element takes nonnegative integer values coordinatewise, stored
//! exactly so that its equality bands are exact and partition the identity.
//! Poisson distributions exist only as parametric mass functions: a
//! finite-dimensional element attains finitely many values, so an exact
//! Poisson realization is impossible; every Poisson statement is checked at
//! the mass-function level with certified truncation.

use serde::de::Error as DeError;
use serde::{Deserialize, Serialize};

use crate::conditional::{ConditionalTriple, Lift};
use crate::convergence::exp_element;
use crate::element::{proj_geq, proj_gt, BandProjection, Element};
use crate::error::{Error, Result};

/// Hard cap on the number of coordinates a realization may create.
pub const STATE_SPACE_CAP: usize = 1 << 20;

/// Largest coordinate value accepted for a natural element.
pub const MAX_NATURAL_VALUE: u64 = 1 << 32;

/// Absolute slack for distribution-level equality checks; accumulated
/// rounding makes bitwise comparison of weighted sums too brittle.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

// Construction-time slack for "coefficients sum to e": admits rounding from
// normalized random weights without letting through genuinely deficient mass.
const MASS_SUM_TOL: f64 = 1e-9;

/// An element with exactly stored nonnegative integer coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalElement {
    element: Element,
    max_value: u64,
}

impl NaturalElement {
    pub fn new(element: Element) -> Result<Self> {
        let mut max_value = 0u64;
        for (i, &v) in element.values().iter().enumerate() {
            if v < 0.0 || v.fract() != 0.0 {
                return Err(Error::InvalidElement(format!(
                    "coordinate {i} of a natural element must be a nonnegative integer, got {v}"
                )));
            }
            if v > MAX_NATURAL_VALUE as f64 {
                return Err(Error::Resource(format!(
                    "coordinate {i} exceeds the natural-value cap ({v})"
                )));
            }
            max_value = max_value.max(v as u64);
        }
        Ok(Self { element, max_value })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            element: Element::zero(dim),
            max_value: 0,
        }
    }

    pub fn constant(dim: usize, k: u64) -> Self {
        Self::new(Element::from_vec_unchecked(vec![k as f64; dim]))
            .expect("constant naturals are valid up to the value cap")
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn dim(&self) -> usize {
        self.element.dim()
    }

    pub fn max_value(&self) -> u64 {
        self.max_value
    }

    pub fn value_at(&self, i: usize) -> u64 {
        self.element.get(i) as u64
    }

    /// The sorted distinct values attained by the element.
    pub fn attained_values(&self) -> Vec<u64> {
        let mut vals: Vec<u64> = self.element.values().iter().map(|&v| v as u64).collect();
        vals.sort_unstable();
        vals.dedup();
        vals
    }

    /// `P_{x=ne}`, exact because the coordinates are stored exactly.
    pub fn eq_band(&self, n: u64) -> BandProjection {
        BandProjection::new(
            self.element.values().iter().map(|&v| v == n as f64).collect(),
        )
        .expect("natural element has positive dimension")
    }

    /// `P_{x≥ne}`.
    pub fn geq_band(&self, n: u64) -> BandProjection {
        BandProjection::new(
            self.element.values().iter().map(|&v| v >= n as f64).collect(),
        )
        .expect("natural element has positive dimension")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(self.element.add(&other.element)?)
    }

    pub fn lift(&self, lift: &Lift) -> Result<Self> {
        Ok(Self {
            element: lift.apply(&self.element)?,
            max_value: self.max_value,
        })
    }
}

/// True iff every coordinate is a nonnegative integer; equivalently, the
/// masses of `x` sum to `e`.
pub fn is_natural(x: &Element) -> bool {
    x.values().iter().all(|&v| v >= 0.0 && v.fract() == 0.0)
}

/// `π_x(n) = T(P_{x=ne} e)`: the conditional probability that `x` equals
/// `n`, block-constant and in `[0, e]`. Zero for unattained `n`.
pub fn mass(triple: &ConditionalTriple, x: &NaturalElement, n: u64) -> Result<Element> {
    triple.expect_indicator(&x.eq_band(n))
}

/// All masses `π_x(0), ..., π_x(max)`.
pub fn all_masses(triple: &ConditionalTriple, x: &NaturalElement) -> Result<Vec<Element>> {
    (0..=x.max_value()).map(|n| mass(triple, x, n)).collect()
}

/// The distribution function `F_x(t) = T(P_{x≤te} e)`; nondecreasing and
/// right-continuous in `t`.
pub fn cdf(triple: &ConditionalTriple, x: &Element, t: f64) -> Result<Element> {
    let te = Element::constant(x.dim(), t)?;
    triple.expect_indicator(&proj_geq(&te, x)?)
}

/// The left limit `F_x(t⁻) = T(P_{x<te} e)`, so that
/// `π_x(n) = F_x(n) − F_x(n⁻)`.
pub fn cdf_left(triple: &ConditionalTriple, x: &Element, t: f64) -> Result<Element> {
    let te = Element::constant(x.dim(), t)?;
    triple.expect_indicator(&proj_gt(&te, x)?)
}

/// A named distribution with block-constant parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `π(1) = p`, `π(0) = e − p`, with `0 < p < e`.
    Bernoulli { p: Element },
    /// `π(k) = C(n,k) pᵏ (e−p)ⁿ⁻ᵏ`.
    Binomial { n: u64, p: Element },
    /// `π(k) = gᵏ e^{−g} / k!`, with `g > 0` in the range of `T`.
    Poisson { g: Element },
}

fn require_range_member(triple: &ConditionalTriple, v: &Element, name: &str) -> Result<()> {
    if v.dim() != triple.dim() {
        return Err(Error::DimensionMismatch {
            expected: triple.dim(),
            found: v.dim(),
        });
    }
    if !triple.in_range(v) {
        return Err(Error::InvalidArgument(format!(
            "{name} must be block-constant (lie in the range of T)"
        )));
    }
    Ok(())
}

fn require_open_unit(triple: &ConditionalTriple, p: &Element) -> Result<()> {
    require_range_member(triple, p, "parameter p")?;
    if p.values().iter().any(|&v| v <= 0.0 || v >= 1.0) {
        return Err(Error::InvalidArgument(
            "parameter p must satisfy 0 < p < e on every block".into(),
        ));
    }
    Ok(())
}

fn require_positive(triple: &ConditionalTriple, g: &Element) -> Result<()> {
    require_range_member(triple, g, "parameter g")?;
    if g.values().iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidArgument(
            "parameter g must be strictly positive on every block".into(),
        ));
    }
    Ok(())
}

impl Family {
    pub fn validate(&self, triple: &ConditionalTriple) -> Result<()> {
        match self {
            Family::Bernoulli { p } | Family::Binomial { p, .. } => require_open_unit(triple, p),
            Family::Poisson { g } => require_positive(triple, g),
        }
    }
}

/// Scalar binomial pmf over `k = 0..=n`, by the stable ratio recurrence.
pub(crate) fn binomial_pmf_scalar(n: u64, p: f64) -> Vec<f64> {
    let q = 1.0 - p;
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut m = q.powi(n as i32);
    let ratio = p / q;
    for k in 0..=n {
        out.push(m);
        if k < n {
            m *= (n - k) as f64 / (k + 1) as f64 * ratio;
        }
    }
    out
}

/// Scalar Poisson pmf values for `k = 0..=k_max`.
pub(crate) fn poisson_pmf_scalar(g: f64, k_max: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max as usize + 1);
    let mut m = (-g).exp();
    for k in 0..=k_max {
        out.push(m);
        m *= g / (k + 1) as f64;
    }
    out
}

/// The mass at `k` of a named family, evaluated in the f-algebra: powers are
/// componentwise and `e^{−g}` comes from the certified exponential series.
pub fn family_mass(triple: &ConditionalTriple, family: &Family, k: u64) -> Result<Element> {
    family.validate(triple)?;
    match family {
        Family::Bernoulli { p } => match k {
            0 => triple.unit().sub(p),
            1 => Ok(p.clone()),
            _ => Ok(Element::zero(triple.dim())),
        },
        Family::Binomial { n, p } => {
            if k > *n {
                return Ok(Element::zero(triple.dim()));
            }
            let q = triple.unit().sub(p)?;
            // C(n,k) pᵏ (e−p)ⁿ⁻ᵏ, accumulated multiplicatively
            let mut out = Element::constant(triple.dim(), binom_coeff(*n, k))?;
            for _ in 0..k {
                out = out.multiply(p)?;
            }
            for _ in 0..(*n - k) {
                out = out.multiply(&q)?;
            }
            Ok(out)
        }
        Family::Poisson { g } => {
            let mut out = exp_element(&g.neg(), 1e-15)?;
            for j in 1..=k {
                out = out.multiply(&g.scale(1.0 / j as f64))?;
            }
            Ok(out)
        }
    }
}

fn binom_coeff(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

/// A (T,e)-mass function: either finitely supported coefficients or the
/// parametric Poisson family.
#[derive(Debug, Clone, PartialEq)]
pub enum MassKind {
    Finite(Vec<Element>),
    Poisson(Element),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    kind: MassKind,
}

impl MassFunction {
    /// Finitely supported mass function; every coefficient must be
    /// block-constant, lie in `[0, e]`, and the coefficients must sum to `e`.
    pub fn finite(triple: &ConditionalTriple, coeffs: Vec<Element>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("mass function needs at least one coefficient".into()));
        }
        let mut sum = Element::zero(triple.dim());
        for (k, c) in coeffs.iter().enumerate() {
            require_range_member(triple, c, &format!("coefficient {k}"))?;
            if c.values().iter().any(|&v| !(-MASS_SUM_TOL..=1.0 + MASS_SUM_TOL).contains(&v)) {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {k} must lie in [0, e]"
                )));
            }
            sum = sum.add(c)?;
        }
        if sum.max_abs_diff(&triple.unit())? > MASS_SUM_TOL {
            return Err(Error::InvalidArgument(
                "mass function coefficients must sum to e".into(),
            ));
        }
        Ok(Self {
            kind: MassKind::Finite(coeffs),
        })
    }

    pub(crate) fn finite_unchecked(coeffs: Vec<Element>) -> Self {
        Self {
            kind: MassKind::Finite(coeffs),
        }
    }

    pub(crate) fn poisson_unchecked(g: Element) -> Self {
        Self {
            kind: MassKind::Poisson(g),
        }
    }

    /// Parametric Poisson mass function with block-constant `g > 0`.
    pub fn poisson(triple: &ConditionalTriple, g: Element) -> Result<Self> {
        require_positive(triple, &g)?;
        Ok(Self {
            kind: MassKind::Poisson(g),
        })
    }

    pub fn from_family(triple: &ConditionalTriple, family: &Family) -> Result<Self> {
        family.validate(triple)?;
        match family {
            Family::Bernoulli { .. } => Ok(Self::finite_unchecked(vec![
                family_mass(triple, family, 0)?,
                family_mass(triple, family, 1)?,
            ])),
            Family::Binomial { n, .. } => Ok(Self::finite_unchecked(
                (0..=*n)
                    .map(|k| family_mass(triple, family, k))
                    .collect::<Result<_>>()?,
            )),
            Family::Poisson { g } => Self::poisson(triple, g.clone()),
        }
    }

    /// The mass function of a realized natural element.
    pub fn of_element(triple: &ConditionalTriple, x: &NaturalElement) -> Result<Self> {
        Ok(Self::finite_unchecked(all_masses(triple, x)?))
    }

    pub fn kind(&self) -> &MassKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            MassKind::Finite(c) => c[0].dim(),
            MassKind::Poisson(g) => g.dim(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, MassKind::Finite(_))
    }

    /// The value `π(k)`.
    pub fn mass(&self, k: u64) -> Element {
        match &self.kind {
            MassKind::Finite(c) => c
                .get(k as usize)
                .cloned()
                .unwrap_or_else(|| Element::zero(self.dim())),
            MassKind::Poisson(g) => {
                let mut out = exp_element(&g.neg(), 1e-15).expect("exp of finite element converges");
                for j in 1..=k {
                    out = out
                        .multiply(&g.scale(1.0 / j as f64))
                        .expect("dims match");
                }
                out
            }
        }
    }

    /// Largest index of the finite support, if finitely supported.
    pub fn support_max(&self) -> Option<u64> {
        match &self.kind {
            MassKind::Finite(c) => {
                let mut last = 0u64;
                for (k, coeff) in c.iter().enumerate() {
                    if !coeff.is_zero() {
                        last = k as u64;
                    }
                }
                Some(last)
            }
            MassKind::Poisson(_) => None,
        }
    }

    /// Certified truncation level: the smallest `K` with tail mass below
    /// `tol` on every block, using the bound `g^{K+1} e^g / (K+1)!`.
    pub fn truncation_level(&self, tol: f64) -> Result<u64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        match &self.kind {
            MassKind::Finite(c) => Ok(c.len() as u64 - 1),
            MassKind::Poisson(g) => poisson_truncation_level(g.e_norm(), tol),
        }
    }

    /// Validates the mass function against a triple (used after
    /// deserialization, which can only check shape).
    pub fn validate(&self, triple: &ConditionalTriple) -> Result<()> {
        match &self.kind {
            MassKind::Finite(c) => {
                Self::finite(triple, c.clone())?;
            }
            MassKind::Poisson(g) => require_positive(triple, g)?,
        }
        Ok(())
    }
}

/// Smallest `K` with `g_max^{K+1} e^{g_max} / (K+1)! < tol`.
pub(crate) fn poisson_truncation_level(g_max: f64, tol: f64) -> Result<u64> {
    const MAX_LEVEL: u64 = 20_000;
    let mut bound = g_max.exp();
    let mut k = 0u64;
    loop {
        bound *= g_max / (k + 1) as f64;
        if bound < tol {
            return Ok(k);
        }
        k += 1;
        if k > MAX_LEVEL {
            return Err(Error::Divergence(format!(
                "Poisson tail bound not certified below {tol} within {MAX_LEVEL} terms (g_max = {g_max})"
            )));
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum MassWire {
    Finite { coeffs: Vec<Element> },
    Poisson { g: Element },
}

impl Serialize for MassFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.kind {
            MassKind::Finite(c) => MassWire::Finite { coeffs: c.clone() },
            MassKind::Poisson(g) => MassWire::Poisson { g: g.clone() },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MassFunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        // Shape-level checks only; block structure is validated against a
        // triple at the use site.
        match MassWire::deserialize(deserializer)? {
            MassWire::Finite { coeffs } => {
                if coeffs.is_empty() {
                    return Err(DeError::custom("mass function needs at least one coefficient"));
                }
                let dim = coeffs[0].dim();
                if coeffs.iter().any(|c| c.dim() != dim) {
                    return Err(DeError::custom("mass function coefficients must share a dimension"));
                }
                Ok(MassFunction::finite_unchecked(coeffs))
            }
            MassWire::Poisson { g } => {
                if g.values().iter().any(|&v| v <= 0.0) {
                    return Err(DeError::custom("Poisson parameter must be strictly positive"));
                }
                Ok(MassFunction {
                    kind: MassKind::Poisson(g),
                })
            }
        }
    }
}

/// True iff `x` and `y` have the same distribution: equal masses at every
/// value up to the larger support (within the distribution slack).
pub fn equal_in_distribution(
    triple: &ConditionalTriple,
    x: &NaturalElement,
    y: &NaturalElement,
) -> Result<bool> {
    let top = x.max_value().max(y.max_value());
    for n in 0..=top {
        let mx = mass(triple, x, n)?;
        let my = mass(triple, y, n)?;
        if mx.max_abs_diff(&my)? > DISTRIBUTION_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of realizing distributions on an extension of a base space.
#[derive(Debug, Clone)]
pub struct Realization {
    /// The extended triple carrying the realized elements.
    pub triple: ConditionalTriple,
    /// Embedding of the base space into `triple`.
    pub lift: Lift,
    /// The realized elements, pairwise and jointly independent.
    pub elements: Vec<NaturalElement>,
}

/// Realizes one finitely supported mass function by adjoining, per base
/// coordinate, one outcome for each support point with strictly positive
/// block coefficient. Outcomes of zero probability are omitted so the
/// extended weights stay strictly positive.
pub fn realize_finite(
    triple: &ConditionalTriple,
    mass_fn: &MassFunction,
) -> Result<(ConditionalTriple, Lift, NaturalElement)> {
    let coeffs = match mass_fn.kind() {
        MassKind::Finite(c) => c,
        MassKind::Poisson(_) => {
            return Err(Error::InvalidArgument(
                "a Poisson distribution attains infinitely many values and cannot be realized on a finite space"
                    .into(),
            ))
        }
    };
    mass_fn.validate(triple)?;

    // support per block: (value, coefficient) pairs with positive mass
    let block_support: Vec<Vec<(u64, f64)>> = triple
        .partition()
        .iter()
        .map(|block| {
            coeffs
                .iter()
                .enumerate()
                .filter_map(|(k, c)| {
                    let v = c.get(block[0]);
                    (v > 0.0).then_some((k as u64, v))
                })
                .collect()
        })
        .collect();

    let new_dim: usize = (0..triple.dim())
        .map(|i| block_support[triple.block_of(i)].len())
        .sum();
    if new_dim > STATE_SPACE_CAP {
        return Err(Error::Resource(format!(
            "realization would need {new_dim} coordinates (cap {STATE_SPACE_CAP})"
        )));
    }

    let mut map = Vec::with_capacity(new_dim);
    let mut weights = Vec::with_capacity(new_dim);
    let mut values = Vec::with_capacity(new_dim);
    let mut partition: Vec<Vec<usize>> = vec![Vec::new(); triple.n_blocks()];
    for i in 0..triple.dim() {
        let b = triple.block_of(i);
        for &(k, c) in &block_support[b] {
            partition[b].push(map.len());
            map.push(i);
            weights.push(triple.weights()[i] * c);
            values.push(k as f64);
        }
    }
    let extended = ConditionalTriple::new(weights, partition)?;
    let lift = Lift::new(map, triple.dim())?;
    let x = NaturalElement::new(Element::new(values)?)?;
    Ok((extended, lift, x))
}

/// Realizes a Bernoulli element: returns an extension with a band projection
/// `Q` such that the element is `Qe` and `T(Qe) = p`.
pub fn realize_bernoulli(
    triple: &ConditionalTriple,
    p: &Element,
) -> Result<(ConditionalTriple, Lift, NaturalElement)> {
    require_open_unit(triple, p)?;
    let mass_fn = MassFunction::from_family(triple, &Family::Bernoulli { p: p.clone() })?;
    realize_finite(triple, &mass_fn)
}

/// Realizes `count` independent copies of a finitely supported distribution
/// by iterated extension; previously realized elements are lifted along.
pub fn realize_iid(
    triple: &ConditionalTriple,
    mass_fn: &MassFunction,
    count: usize,
) -> Result<Realization> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let base_coeffs = match mass_fn.kind() {
        MassKind::Finite(c) => c.clone(),
        MassKind::Poisson(_) => {
            return Err(Error::InvalidArgument(
                "a Poisson distribution cannot be realized; use its parametric mass function".into(),
            ))
        }
    };
    mass_fn.validate(triple)?;

    let mut current = triple.clone();
    let mut cumulative = Lift::identity(triple.dim());
    let mut elements: Vec<NaturalElement> = Vec::with_capacity(count);
    for _ in 0..count {
        let lifted_coeffs: Vec<Element> = base_coeffs
            .iter()
            .map(|c| cumulative.apply(c))
            .collect::<Result<_>>()?;
        let step_mass = MassFunction::finite_unchecked(lifted_coeffs);
        let (next, step, x) = realize_finite(&current, &step_mass)?;
        for el in elements.iter_mut() {
            *el = el.lift(&step)?;
        }
        cumulative = Lift::compose(&cumulative, &step)?;
        elements.push(x);
        current = next;
    }
    Ok(Realization {
        triple: current,
        lift: cumulative,
        elements,
    })
}

/// `realize_iid` for a named family; the family must be finitely supported.
pub fn realize_iid_family(
    triple: &ConditionalTriple,
    family: &Family,
    count: usize,
) -> Result<Realization> {
    if matches!(family, Family::Poisson { .. }) {
        return Err(Error::InvalidArgument(
            "a Poisson distribution cannot be realized; use its parametric mass function".into(),
        ));
    }
    realize_iid(triple, &MassFunction::from_family(triple, family)?, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: &[f64]) -> Element {
        Element::new(v.to_vec()).unwrap()
    }

    fn canonical_x() -> NaturalElement {
        NaturalElement::new(el(&[0.0, 1.0, 1.0, 2.0])).unwrap()
    }

    #[test]
    fn canonical_masses() {
        let t = ConditionalTriple::canonical();
        let x = canonical_x();
        assert_eq!(mass(&t, &x, 0).unwrap(), el(&[0.5, 0.5, 0.0, 0.0]));
        assert_eq!(mass(&t, &x, 1).unwrap(), el(&[0.5, 0.5, 0.5, 0.5]));
        assert_eq!(mass(&t, &x, 2).unwrap(), el(&[0.0, 0.0, 0.5, 0.5]));
        assert_eq!(mass(&t, &x, 3).unwrap(), Element::zero(4));
    }

    #[test]
    fn zero_element_masses() {
        let t = ConditionalTriple::canonical();
        let x = NaturalElement::zero(4);
        assert_eq!(mass(&t, &x, 0).unwrap(), t.unit());
        assert_eq!(mass(&t, &x, 3).unwrap(), Element::zero(4));
    }

    #[test]
    fn masses_partition_unity() {
        let t = ConditionalTriple::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![vec![0, 2, 4], vec![1, 3]]).unwrap();
        let x = NaturalElement::new(el(&[0.0, 2.0, 1.0, 2.0, 5.0])).unwrap();
        let mut total = Element::zero(5);
        for m in all_masses(&t, &x).unwrap() {
            assert!(m.ge(&Element::zero(5)).unwrap());
            assert!(m.le(&t.unit()).unwrap());
            assert!(t.in_range(&m));
            total = total.add(&m).unwrap();
        }
        assert!(total.max_abs_diff(&t.unit()).unwrap() <= 1e-15);
    }

    #[test]
    fn cdf_values_and_consistency() {
        let t = ConditionalTriple::canonical();
        let x = canonical_x();
        assert_eq!(cdf(&t, x.element(), 1.0).unwrap(), el(&[1.0, 1.0, 0.5, 0.5]));
        assert_eq!(cdf(&t, x.element(), 5.0).unwrap(), t.unit());
        assert_eq!(cdf(&t, x.element(), -1.0).unwrap(), Element::zero(4));
        // constancy on (n, n+1)
        assert_eq!(cdf(&t, x.element(), 1.0).unwrap(), cdf(&t, x.element(), 1.7).unwrap());
        for n in 0..=2u64 {
            let m = mass(&t, &x, n).unwrap();
            let diff = cdf(&t, x.element(), n as f64)
                .unwrap()
                .sub(&cdf_left(&t, x.element(), n as f64).unwrap())
                .unwrap();
            assert!(m.max_abs_diff(&diff).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn naturality() {
        assert!(is_natural(&el(&[0.0, 1.0, 1.0, 2.0])));
        assert!(is_natural(&Element::unit(3)));
        assert!(!is_natural(&el(&[0.5, 1.0])));
        assert!(!is_natural(&el(&[-1.0])));
        assert!(NaturalElement::new(el(&[0.5])).is_err());
    }

    #[test]
    fn family_mass_values() {
        let t = ConditionalTriple::canonical();
        let p = t.from_block_values(&[0.3, 0.6]).unwrap();
        let bern = Family::Bernoulli { p: p.clone() };
        assert_eq!(family_mass(&t, &bern, 1).unwrap(), p);
        assert_eq!(
            family_mass(&t, &bern, 0).unwrap(),
            t.unit().sub(&p).unwrap()
        );
        assert!(family_mass(&t, &bern, 2).unwrap().is_zero());

        let binom = Family::Binomial { n: 3, p: p.clone() };
        let boundary = family_mass(&t, &binom, 3).unwrap();
        let p3 = p.multiply(&p).unwrap().multiply(&p).unwrap();
        assert!(boundary.max_abs_diff(&p3).unwrap() <= 1e-15);

        let g = t.from_block_values(&[1.0, 2.0]).unwrap();
        let pois = Family::Poisson { g: g.clone() };
        let m0 = family_mass(&t, &pois, 0).unwrap();
        for (i, &gv) in g.values().iter().enumerate() {
            assert!((m0.get(i) - (-gv).exp()).abs() <= 1e-12);
        }
    }

    #[test]
    fn family_parameter_validation() {
        let t = ConditionalTriple::canonical();
        let bad = el(&[0.3, 0.4, 0.6, 0.6]); // not block-constant
        assert!(family_mass(&t, &Family::Bernoulli { p: bad }, 0).is_err());
        let touching = t.from_block_values(&[1.0, 0.5]).unwrap();
        assert!(family_mass(&t, &Family::Bernoulli { p: touching }, 0).is_err());
        let zero_g = t.from_block_values(&[0.0, 1.0]).unwrap();
        assert!(family_mass(&t, &Family::Poisson { g: zero_g }, 0).is_err());
    }

    #[test]
    fn binomial_pmf_recurrence_matches_direct() {
        let pmf = binomial_pmf_scalar(4, 0.5);
        assert_eq!(pmf.len(), 5);
        for (k, expected) in [1.0, 4.0, 6.0, 4.0, 1.0].iter().enumerate() {
            assert!((pmf[k] - expected / 16.0).abs() <= 1e-15);
        }
        assert!((binomial_pmf_scalar(10, 0.3).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn equality_in_distribution() {
        let t = ConditionalTriple::canonical();
        let x = canonical_x();
        assert!(equal_in_distribution(&t, &x, &x).unwrap());

        // two lifted coordinates of an i.i.d. pair agree in distribution
        let p = t.from_block_values(&[0.3, 0.7]).unwrap();
        let r = realize_iid_family(&t, &Family::Bernoulli { p }, 2).unwrap();
        assert!(equal_in_distribution(&r.triple, &r.elements[0], &r.elements[1]).unwrap());

        // Bernoulli vs Binomial(2, p) differ
        let base = ConditionalTriple::point();
        let p1 = Element::new(vec![0.4]).unwrap();
        let (t1, l1, b) = realize_bernoulli(&base, &p1).unwrap();
        let binom_mass =
            MassFunction::from_family(&t1, &Family::Binomial { n: 2, p: l1.apply(&p1).unwrap() }).unwrap();
        let (t2, l2, s) = realize_finite(&t1, &binom_mass).unwrap();
        let b_lifted = b.lift(&l2).unwrap();
        assert!(!equal_in_distribution(&t2, &b_lifted, &s).unwrap());
    }

    #[test]
    fn bernoulli_realization_contract() {
        let base = ConditionalTriple::point();
        let p = Element::new(vec![0.5]).unwrap();
        let (ext, _, x) = realize_bernoulli(&base, &p).unwrap();
        assert_eq!(ext.dim(), 2);
        assert_eq!(x.max_value(), 1);
        let expect_x = ext.expect(x.element()).unwrap();
        assert!(expect_x.max_abs_diff(&Element::constant(2, 0.5).unwrap()).unwrap() <= 1e-15);
        let m1 = mass(&ext, &x, 1).unwrap();
        assert!(m1.max_abs_diff(&Element::constant(2, 0.5).unwrap()).unwrap() <= 1e-15);
    }

    #[test]
    fn iid_bernoulli_sum_is_binomial() {
        let base = ConditionalTriple::point();
        let p = Element::new(vec![0.5]).unwrap();
        let r = realize_iid_family(&base, &Family::Bernoulli { p }, 3).unwrap();
        assert_eq!(r.triple.dim(), 8);
        let sum = r.elements[0]
            .add(&r.elements[1])
            .unwrap()
            .add(&r.elements[2])
            .unwrap();
        let expected = [1.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0];
        for (k, &want) in expected.iter().enumerate() {
            let m = mass(&r.triple, &sum, k as u64).unwrap();
            assert!(m.max_abs_diff(&Element::constant(8, want).unwrap()).unwrap() <= 1e-15);
        }
        assert!(r
            .triple
            .check_elements_independent(&r.elements[0], &r.elements[1])
            .unwrap());
        assert!(r
            .triple
            .check_elements_independent(&r.elements[1], &r.elements[2])
            .unwrap());
    }

    #[test]
    fn single_realization_matches_mass_function() {
        let t = ConditionalTriple::canonical();
        let p = t.from_block_values(&[0.25, 0.75]).unwrap();
        let r = realize_iid_family(&t, &Family::Bernoulli { p: p.clone() }, 1).unwrap();
        let m1 = mass(&r.triple, &r.elements[0], 1).unwrap();
        assert!(m1.max_abs_diff(&r.lift.apply(&p).unwrap()).unwrap() <= 1e-15);
    }

    #[test]
    fn constant_element_is_independent_of_anything() {
        let t = ConditionalTriple::canonical();
        let x = canonical_x();
        let c = NaturalElement::constant(4, 3);
        assert!(t.check_elements_independent(&x, &c).unwrap());
        // a nondegenerate element is not independent of itself
        assert!(!t.check_elements_independent(&x, &x).unwrap());
    }

    #[test]
    fn realization_respects_state_cap() {
        let base = ConditionalTriple::point();
        let p = Element::new(vec![0.5]).unwrap();
        let result = realize_iid_family(&base, &Family::Bernoulli { p }, 25);
        assert!(matches!(result, Err(Error::Resource(_))));
    }

    #[test]
    fn poisson_mass_cannot_be_realized() {
        let t = ConditionalTriple::canonical();
        let g = t.from_block_values(&[1.0, 1.0]).unwrap();
        let mf = MassFunction::poisson(&t, g).unwrap();
        assert!(realize_finite(&t, &mf).is_err());
    }

    #[test]
    fn poisson_truncation_is_certified() {
        let t = ConditionalTriple::canonical();
        let g = t.from_block_values(&[1.0, 2.5]).unwrap();
        let mf = MassFunction::poisson(&t, g).unwrap();
        let k = mf.truncation_level(1e-10).unwrap();
        let mut total = Element::zero(4);
        for j in 0..=k {
            total = total.add(&mf.mass(j)).unwrap();
        }
        assert!(total.max_abs_diff(&t.unit()).unwrap() <= 1e-10);
    }

    #[test]
    fn mass_function_serde() {
        let t = ConditionalTriple::canonical();
        let mf = MassFunction::from_family(
            &t,
            &Family::Binomial { n: 2, p: t.from_block_values(&[0.5, 0.25]).unwrap() },
        )
        .unwrap();
        let json = serde_json::to_string(&mf).unwrap();
        assert!(json.contains("\"kind\":\"finite\""));
        let back: MassFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mf);

        let pois = MassFunction::poisson(&t, t.from_block_values(&[1.0, 2.0]).unwrap()).unwrap();
        let json = serde_json::to_string(&pois).unwrap();
        assert!(json.contains("\"kind\":\"poisson\""));
        let back: MassFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, pois);
    }
}
