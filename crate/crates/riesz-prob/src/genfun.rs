//! Generating functions of natural elements: evaluation, generalized
//! (element-argument) evaluation, derivatives, factorial moments, products
//! for independent sums, and compound (randomly indexed) sums.
//!
//! A generating function stores its coefficient sequence — the mass function
//! `π_x` — plus an optional closed-form tag when it was built from a named
//! family. Finitely supported coefficients are always evaluated exactly by
//! coefficient summation; the closed forms serve the Poisson family (whose
//! series needs certified truncation) and cross-checks.

use serde::de::Error as DeError;
use serde::{Deserialize, Serialize};

use crate::calculus::power_element;
use crate::conditional::ConditionalTriple;
use crate::convergence::exp_element;
use crate::distributions::{
    all_masses, Family, MassFunction, MassKind, NaturalElement,
};
use crate::element::Element;
use crate::error::{Error, Result};

/// Internal certification target for Poisson-kind series and closed forms.
const POISSON_EVAL_TOL: f64 = 1e-12;

/// Closed-form tags for fast or exact evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClosedForm {
    /// `g(s) = sp + e − p`
    Bernoulli { p: Element },
    /// `g(s) = (sp + e − p)ⁿ`
    Binomial { n: u64, p: Element },
    /// `g(s) = exp((s−1)g)`
    Poisson { g: Element },
}

/// A generating function `g_x(s) = Σ sⁿ π_x(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenFun {
    coeffs: MassFunction,
    form: Option<ClosedForm>,
}

impl GenFun {
    pub fn from_mass(coeffs: MassFunction) -> Self {
        Self { coeffs, form: None }
    }

    /// Builds the generating function of a named family, with its
    /// closed-form tag.
    pub fn from_family(triple: &ConditionalTriple, family: &Family) -> Result<Self> {
        let coeffs = MassFunction::from_family(triple, family)?;
        let form = Some(match family {
            Family::Bernoulli { p } => ClosedForm::Bernoulli { p: p.clone() },
            Family::Binomial { n, p } => ClosedForm::Binomial { n: *n, p: p.clone() },
            Family::Poisson { g } => ClosedForm::Poisson { g: g.clone() },
        });
        Ok(Self { coeffs, form })
    }

    /// The generating function of a realized natural element: coefficients
    /// are its masses, with finite support.
    pub fn of_element(triple: &ConditionalTriple, x: &NaturalElement) -> Result<Self> {
        Ok(Self {
            coeffs: MassFunction::finite_unchecked(all_masses(triple, x)?),
            form: None,
        })
    }

    /// The point mass at `k`; `delta(dim, 0)` is the unit for [`GenFun::product`].
    pub fn delta(dim: usize, k: u64) -> Self {
        let mut coeffs = vec![Element::zero(dim); k as usize + 1];
        coeffs[k as usize] = Element::unit(dim);
        Self {
            coeffs: MassFunction::finite_unchecked(coeffs),
            form: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn coefficients(&self) -> &MassFunction {
        &self.coeffs
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.form.as_ref()
    }

    /// The coefficient `π(n)`.
    pub fn coefficient(&self, n: u64) -> Element {
        self.coeffs.mass(n)
    }

    fn finite_coeffs(&self) -> Option<&[Element]> {
        match self.coeffs.kind() {
            MassKind::Finite(c) => Some(c),
            MassKind::Poisson(_) => None,
        }
    }

    /// Evaluates `g(s) = Σ sⁿ π(n)` for `s ≥ 0`. Finite supports are summed
    /// exactly (Horner); the Poisson kind uses its closed form
    /// `exp((s−1)g)`, itself a certified series.
    pub fn eval(&self, s: f64) -> Result<Element> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("generating functions are evaluated at s ≥ 0, got {s}")));
        }
        match self.coeffs.kind() {
            MassKind::Finite(c) => {
                let mut acc = Element::zero(self.dim());
                for coeff in c.iter().rev() {
                    acc = acc.scale(s).add(coeff)?;
                }
                Ok(acc)
            }
            MassKind::Poisson(g) => exp_element(&g.scale(s - 1.0), POISSON_EVAL_TOL),
        }
    }

    /// Evaluates by direct coefficient summation; for the Poisson kind the
    /// series is truncated at a level certified below `tol`.
    pub fn eval_series(&self, s: f64, tol: f64) -> Result<Element> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("generating functions are evaluated at s ≥ 0, got {s}")));
        }
        match self.coeffs.kind() {
            MassKind::Finite(_) => self.eval(s),
            MassKind::Poisson(g) => {
                // Σ_{k≤K} sᵏ π(k) with tail Σ_{k>K} (sg)ᵏ e^{−g}/k! certified < tol
                let level = crate::distributions::poisson_truncation_level(s * g.e_norm(), tol)?;
                let mut acc = Element::zero(self.dim());
                let mut term = exp_element(&g.neg(), tol * 1e-3)?;
                for k in 0..=level {
                    acc = acc.add(&term)?;
                    term = term.multiply(&g.scale(s / (k + 1) as f64))?;
                }
                Ok(acc)
            }
        }
    }

    /// Evaluates the tagged closed form, when present.
    pub fn eval_via_form(&self, s: f64) -> Option<Result<Element>> {
        let form = self.form.as_ref()?;
        Some(match form {
            ClosedForm::Bernoulli { p } => {
                let e = Element::unit(p.dim());
                p.scale(s).add(&e).and_then(|v| v.sub(p))
            }
            ClosedForm::Binomial { n, p } => {
                let e = Element::unit(p.dim());
                p.scale(s)
                    .add(&e)
                    .and_then(|v| v.sub(p))
                    .map(|base| base.map(|v| v.powi(*n as i32)))
            }
            ClosedForm::Poisson { g } => exp_element(&g.scale(s - 1.0), POISSON_EVAL_TOL),
        })
    }

    /// The generalized form `g̃(u) = Σ π(n) uⁿ` for an element argument
    /// `u ≥ 0` (powers componentwise). `g̃(se) = g(s)`.
    pub fn eval_generalized(&self, u: &Element) -> Result<Element> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        if !u.ge(&Element::zero(u.dim()))? {
            return Err(Error::Domain("generalized evaluation requires u ≥ 0".into()));
        }
        match self.coeffs.kind() {
            MassKind::Finite(c) => {
                let mut acc = Element::zero(self.dim());
                for coeff in c.iter().rev() {
                    acc = acc.multiply(u)?.add(coeff)?;
                }
                Ok(acc)
            }
            // Σ gⁿ e^{−g} uⁿ / n! = exp(g·(u − e))
            MassKind::Poisson(g) => {
                let shifted = u.sub(&Element::unit(u.dim()))?;
                exp_element(&g.multiply(&shifted)?, POISSON_EVAL_TOL)
            }
        }
    }

    /// The `k`-th derivative `Σ_{n≥k} n(n−1)···(n−k+1) s^{n−k} π(n)` for
    /// `s ∈ [0, 1)`.
    pub fn derivative(&self, k: u32, s: f64) -> Result<Element> {
        if !(0.0..1.0).contains(&s) {
            return Err(Error::Domain(format!(
                "derivatives are taken on [0, 1), got s = {s}"
            )));
        }
        match self.coeffs.kind() {
            MassKind::Finite(c) => {
                let mut acc = Element::zero(self.dim());
                for (n, coeff) in c.iter().enumerate().skip(k as usize) {
                    let factor = falling_factorial(n as u64, k as u64) * s.powi((n - k as usize) as i32);
                    acc = acc.add(&coeff.scale(factor))?;
                }
                Ok(acc)
            }
            // dᵏ/dsᵏ exp((s−1)g) = gᵏ exp((s−1)g)
            MassKind::Poisson(g) => {
                let mut out = exp_element(&g.scale(s - 1.0), POISSON_EVAL_TOL)?;
                for _ in 0..k {
                    out = out.multiply(g)?;
                }
                Ok(out)
            }
        }
    }

    /// The `n`-th factorial moment `Σ_{k≥n} k(k−1)···(k−n+1) π(k)`, the
    /// left derivative of order `n` at 1. Exact empty sum (zero) beyond the
    /// finite support.
    pub fn factorial_moment(&self, n: u32) -> Result<Element> {
        if n == 0 {
            return Err(Error::InvalidArgument("factorial moments start at order 1".into()));
        }
        match self.coeffs.kind() {
            MassKind::Finite(c) => {
                let mut acc = Element::zero(self.dim());
                for (k, coeff) in c.iter().enumerate().skip(n as usize) {
                    acc = acc.add(&coeff.scale(falling_factorial(k as u64, n as u64)))?;
                }
                Ok(acc)
            }
            MassKind::Poisson(g) => {
                let mut out = g.clone();
                for _ in 1..n {
                    out = out.multiply(g)?;
                }
                Ok(out)
            }
        }
    }

    /// `Tx`, the first factorial moment.
    pub fn mean(&self) -> Result<Element> {
        self.factorial_moment(1)
    }

    /// `Tx² = Tx + T[x(x−e)]`.
    pub fn second_moment(&self) -> Result<Element> {
        self.mean()?.add(&self.factorial_moment(2)?)
    }

    /// `Var(x) = Tx² − (Tx)²`.
    pub fn variance(&self) -> Result<Element> {
        let mean = self.mean()?;
        self.second_moment()?.sub(&mean.multiply(&mean)?)
    }

    /// Generating function of the sum of two independent elements: the
    /// coefficient convolution `π(n) = Σ_{i+j=n} π₁(i)·π₂(j)`.
    ///
    /// Supported for two finite supports (exact) and for two Poisson tags
    /// (parameter sum); a mixed product has no representation here.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        match (self.coeffs.kind(), other.coeffs.kind()) {
            (MassKind::Finite(a), MassKind::Finite(b)) => {
                let dim = self.dim();
                let mut out = vec![Element::zero(dim); a.len() + b.len() - 1];
                for (i, ai) in a.iter().enumerate() {
                    for (j, bj) in b.iter().enumerate() {
                        out[i + j] = out[i + j].add(&ai.multiply(bj)?)?;
                    }
                }
                Ok(Self {
                    coeffs: MassFunction::finite_unchecked(out),
                    form: None,
                })
            }
            (MassKind::Poisson(g1), MassKind::Poisson(g2)) => {
                let g = g1.add(g2)?;
                Ok(Self {
                    coeffs: MassFunction::poisson_unchecked(g.clone()),
                    form: Some(ClosedForm::Poisson { g }),
                })
            }
            _ => Err(Error::InvalidArgument(
                "product of a finite-support and a Poisson generating function is not representable".into(),
            )),
        }
    }
}

fn falling_factorial(n: u64, k: u64) -> f64 {
    let mut f = 1.0f64;
    for j in 0..k {
        f *= (n - j) as f64;
    }
    f
}

/// `g_x(s) = T(s^x)`: evaluation through the power element instead of the
/// coefficient sum. Must agree with [`GenFun::eval`].
pub fn eval_via_power(triple: &ConditionalTriple, x: &NaturalElement, s: f64) -> Result<Element> {
    triple.expect(&power_element(s, x.element())?)
}

/// `Tx = Σ_{n≥1} T(P_{x≥ne} e)`: the mean computed from the tail sums.
pub fn mean_via_tail(triple: &ConditionalTriple, x: &NaturalElement) -> Result<Element> {
    let mut acc = Element::zero(triple.dim());
    for n in 1..=x.max_value() {
        acc = acc.add(&triple.expect_indicator(&x.geq_band(n))?)?;
    }
    Ok(acc)
}

fn check_index_family(
    triple: &ConditionalTriple,
    index: &NaturalElement,
    summands: &[NaturalElement],
) -> Result<()> {
    if index.dim() != triple.dim() {
        return Err(Error::DimensionMismatch {
            expected: triple.dim(),
            found: index.dim(),
        });
    }
    for x in summands {
        if x.dim() != triple.dim() {
            return Err(Error::DimensionMismatch {
                expected: triple.dim(),
                found: x.dim(),
            });
        }
    }
    match summands.first() {
        None => return Err(Error::MissingSummand { value: 0 }),
        Some(x0) if !x0.element().is_zero() => {
            return Err(Error::InvalidArgument(
                "the summand at index 0 must be the zero element".into(),
            ))
        }
        _ => {}
    }
    if index.max_value() as usize >= summands.len() {
        return Err(Error::MissingSummand {
            value: summands.len() as u64,
        });
    }
    Ok(())
}

/// `x_N = Σ_n P_{N=ne} x_n`: coordinate `j` carries the value of `x_{N_j}`
/// at `j`. The summand list must start with the zero element and cover every
/// attained value of `N`.
pub fn random_index_element(
    triple: &ConditionalTriple,
    index: &NaturalElement,
    summands: &[NaturalElement],
) -> Result<NaturalElement> {
    check_index_family(triple, index, summands)?;
    let values = (0..triple.dim())
        .map(|j| summands[index.value_at(j) as usize].element().get(j))
        .collect();
    NaturalElement::new(Element::new(values)?)
}

/// `S_N = Σ_n P_{N=ne} S_n` with `S_n = x_1 + ... + x_n`: coordinate `j`
/// carries `Σ_{k ≤ N_j} x_k(j)`.
pub fn random_index_sum(
    triple: &ConditionalTriple,
    index: &NaturalElement,
    summands: &[NaturalElement],
) -> Result<NaturalElement> {
    check_index_family(triple, index, summands)?;
    let values = (0..triple.dim())
        .map(|j| {
            (1..=index.value_at(j) as usize)
                .map(|k| summands[k].element().get(j))
                .sum()
        })
        .collect();
    NaturalElement::new(Element::new(values)?)
}

/// The generating function of the compound sum `S_N`, namely `g̃_N ∘ g_x`.
///
/// The caller is responsible for the hypotheses: the summands are i.i.d.
/// with generating function `gx` and independent of the index. Supported
/// shapes: finite index (exact mixture of convolution powers), and a Poisson
/// index with `{0,1}`-valued summands, where the result is the Poisson
/// distribution with the thinned parameter `p·g`.
pub fn compose(g_index: &GenFun, g_summand: &GenFun) -> Result<GenFun> {
    if g_index.dim() != g_summand.dim() {
        return Err(Error::DimensionMismatch {
            expected: g_index.dim(),
            found: g_summand.dim(),
        });
    }
    let dim = g_index.dim();
    match (g_index.coeffs.kind(), g_summand.coeffs.kind()) {
        (MassKind::Finite(nc), MassKind::Finite(xc)) => {
            let top = (nc.len() - 1) * (xc.len() - 1);
            let mut out = vec![Element::zero(dim); top + 1];
            // conv_power holds π_x^{*n}, starting from the point mass at 0
            let mut conv_power = vec![Element::unit(dim)];
            for (n, pn) in nc.iter().enumerate() {
                for (k, c) in conv_power.iter().enumerate() {
                    out[k] = out[k].add(&pn.multiply(c)?)?;
                }
                if n + 1 < nc.len() {
                    conv_power = convolve(&conv_power, xc)?;
                }
            }
            Ok(GenFun {
                coeffs: MassFunction::finite_unchecked(out),
                form: None,
            })
        }
        (MassKind::Poisson(g), MassKind::Finite(xc)) => {
            if trimmed_support(xc) > 1 {
                return Err(Error::InvalidArgument(
                    "a Poisson index supports only {0,1}-valued summands; the compound mass has no finite representation otherwise"
                        .into(),
                ));
            }
            let p = if xc.len() > 1 { xc[1].clone() } else { Element::zero(dim) };
            if p.values().iter().any(|&v| v <= 0.0) {
                return Err(Error::InvalidArgument(
                    "thinning a Poisson index requires a strictly positive success mass".into(),
                ));
            }
            let thinned = p.multiply(g)?;
            Ok(GenFun {
                coeffs: MassFunction::poisson_unchecked(thinned.clone()),
                form: Some(ClosedForm::Poisson { g: thinned }),
            })
        }
        (_, MassKind::Poisson(_)) => Err(Error::InvalidArgument(
            "compound sums of Poisson summands have no finite coefficient representation".into(),
        )),
    }
}

fn trimmed_support(coeffs: &[Element]) -> u64 {
    let mut last = 0u64;
    for (k, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            last = k as u64;
        }
    }
    last
}

fn convolve(a: &[Element], b: &[Element]) -> Result<Vec<Element>> {
    let dim = a[0].dim();
    let mut out = vec![Element::zero(dim); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ai.multiply(bj)?)?;
        }
    }
    Ok(out)
}

/// `T(S_N) = TN · Tx` evaluated in the f-algebra.
pub fn compound_mean(g_index: &GenFun, g_summand: &GenFun) -> Result<Element> {
    g_index.mean()?.multiply(&g_summand.mean()?)
}

/// `Var(S_N) = TN · Var(x) + Var(N) · (Tx)²`.
pub fn compound_variance(g_index: &GenFun, g_summand: &GenFun) -> Result<Element> {
    let mean_x = g_summand.mean()?;
    let a = g_index.mean()?.multiply(&g_summand.variance()?)?;
    let b = g_index.variance()?.multiply(&mean_x.multiply(&mean_x)?)?;
    a.add(&b)
}

/// The generating function of `x_N` (a single randomly indexed summand):
/// `g_{x_N}(s) = π_N(0) + (e − π_N(0)) · g_x(s)`; in particular it equals
/// `g_x` when the index is positive with full mass.
pub fn genfun_of_random_index(g_index: &GenFun, g_summand: &GenFun) -> Result<GenFun> {
    if g_index.dim() != g_summand.dim() {
        return Err(Error::DimensionMismatch {
            expected: g_index.dim(),
            found: g_summand.dim(),
        });
    }
    let dim = g_index.dim();
    let xc = g_summand.finite_coeffs().ok_or_else(|| {
        Error::InvalidArgument(
            "a randomly indexed Poisson summand has no finite coefficient representation".into(),
        )
    })?;
    let pn0 = g_index.coefficient(0);
    let survive = Element::unit(dim).sub(&pn0)?;
    let mut out: Vec<Element> = xc
        .iter()
        .map(|c| survive.multiply(c))
        .collect::<Result<_>>()?;
    out[0] = out[0].add(&pn0)?;
    Ok(GenFun {
        coeffs: MassFunction::finite_unchecked(out),
        form: None,
    })
}

#[derive(Serialize, Deserialize)]
struct GenFunWire {
    #[serde(flatten)]
    coeffs: MassFunction,
    #[serde(skip_serializing_if = "Option::is_none")]
    form: Option<ClosedForm>,
}

impl Serialize for GenFun {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GenFunWire {
            coeffs: self.coeffs.clone(),
            form: self.form.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GenFun {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = GenFunWire::deserialize(deserializer)?;
        if let Some(form) = &wire.form {
            let fd = match form {
                ClosedForm::Bernoulli { p } | ClosedForm::Binomial { p, .. } => p.dim(),
                ClosedForm::Poisson { g } => g.dim(),
            };
            if fd != wire.coeffs.dim() {
                return Err(DeError::custom("closed-form tag dimension does not match coefficients"));
            }
        }
        Ok(GenFun {
            coeffs: wire.coeffs,
            form: wire.form,
        })
    }
}
