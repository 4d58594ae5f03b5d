//! Order-convergence utilities, series limit theorems as executable checks,
//! the certified exponential series, distribution convergence, and the
//! Poisson approximation experiments.
//!
//! In a finite-dimensional space order convergence coincides with
//! coordinatewise convergence (and with unbounded order convergence), so the
//! checks here test finite prefixes with a monotone tail criterion: a
//! sequence passes only when the suffix suprema are nonincreasing and the
//! final one is below tolerance. That is honest finite evidence for an
//! asymptotic property, not a proof.

use std::sync::Arc;

use crate::distributions::{
    binomial_pmf_scalar, poisson_pmf_scalar, poisson_truncation_level, MassFunction,
};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::genfun::GenFun;
use crate::conditional::ConditionalTriple;
use crate::par;

/// A finite prefix of a sequence, or a rule for generating terms on demand.
#[derive(Clone)]
pub enum ElementSequence {
    Terms(Vec<Element>),
    Generated {
        dim: usize,
        rule: Arc<dyn Fn(usize) -> Element + Send + Sync>,
    },
}

impl ElementSequence {
    pub fn from_terms(terms: Vec<Element>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("sequence needs at least one term".into()));
        }
        let dim = terms[0].dim();
        if terms.iter().any(|t| t.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: terms.iter().find(|t| t.dim() != dim).unwrap().dim(),
            });
        }
        Ok(Self::Terms(terms))
    }

    pub fn from_rule(dim: usize, rule: impl Fn(usize) -> Element + Send + Sync + 'static) -> Self {
        Self::Generated {
            dim,
            rule: Arc::new(rule),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Terms(t) => t[0].dim(),
            Self::Generated { dim, .. } => *dim,
        }
    }

    /// Number of available terms; `None` when generated on demand.
    pub fn capacity(&self) -> Option<usize> {
        match self {
            Self::Terms(t) => Some(t.len()),
            Self::Generated { .. } => None,
        }
    }

    pub fn term(&self, n: usize) -> Element {
        match self {
            Self::Terms(t) => t[n].clone(),
            Self::Generated { rule, .. } => rule(n),
        }
    }
}

/// Evidence gathered while testing order convergence on a finite prefix.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub limit: Element,
    /// `tail_sup[n] = max_{m ≥ n} ‖x_m − limit‖_e` over the tested prefix;
    /// nonincreasing by construction.
    pub tail_sup: Vec<f64>,
    pub converged: bool,
    /// Crude power-law fit of the tail decay, when enough positive tails
    /// exist.
    pub rate_estimate: Option<f64>,
}

/// Tests order convergence of a sequence prefix toward `limit`.
pub fn order_converges(
    seq: &ElementSequence,
    limit: &Element,
    tol: f64,
    horizon: usize,
) -> Result<ConvergenceReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    check_horizon(seq, horizon)?;
    if seq.dim() != limit.dim() {
        return Err(Error::DimensionMismatch {
            expected: seq.dim(),
            found: limit.dim(),
        });
    }
    let deviations: Vec<f64> = (0..horizon)
        .map(|n| seq.term(n).sub(limit).map(|d| d.e_norm()))
        .collect::<Result<_>>()?;
    let mut tail_sup = vec![0.0f64; horizon];
    let mut running = 0.0f64;
    for n in (0..horizon).rev() {
        running = running.max(deviations[n]);
        tail_sup[n] = running;
    }
    let converged = *tail_sup.last().unwrap() < tol;
    let rate_estimate = estimate_rate(&tail_sup);
    Ok(ConvergenceReport {
        limit: limit.clone(),
        tail_sup,
        converged,
        rate_estimate,
    })
}

fn check_horizon(seq: &ElementSequence, horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    if let Some(cap) = seq.capacity() {
        if horizon > cap {
            return Err(Error::InvalidArgument(format!(
                "horizon {horizon} exceeds the {cap} available terms"
            )));
        }
    }
    Ok(())
}

fn estimate_rate(tail_sup: &[f64]) -> Option<f64> {
    // least-squares slope of log(tail) against log(n+1)
    let points: Vec<(f64, f64)> = tail_sup
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 0.0)
        .map(|(n, &t)| (((n + 1) as f64).ln(), t.ln()))
        .collect();
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    (denom.abs() > 1e-12).then(|| -(n * sxy - sx * sy) / denom)
}

fn check_rectangular(rows: &[Vec<Element>]) -> Result<usize> {
    let dim = rows
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.dim())
        .next()
        .ok_or_else(|| Error::InvalidArgument("family must contain at least one element".into()))?;
    for x in rows.iter().flat_map(|r| r.iter()) {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.dim(),
            });
        }
    }
    Ok(dim)
}

/// Sum of a finite pair-indexed family of nonnegative elements.
pub fn series_sum(rows: &[Vec<Element>]) -> Result<Element> {
    let dim = check_rectangular(rows)?;
    let mut total = Element::zero(dim);
    for x in rows.iter().flat_map(|r| r.iter()) {
        if !x.ge(&Element::zero(dim))? {
            return Err(Error::Precondition("family must be nonnegative".into()));
        }
        total = total.add(x)?;
    }
    Ok(total)
}

/// Checks that row-major, row-then-column, and column-then-row summation of
/// a nonnegative pair-indexed family agree within `tol`.
pub fn fubini_check(rows: &[Vec<Element>], tol: f64) -> Result<bool> {
    let dim = check_rectangular(rows)?;
    let total = series_sum(rows)?;

    let mut by_rows = Element::zero(dim);
    for row in rows {
        let mut r = Element::zero(dim);
        for x in row {
            r = r.add(x)?;
        }
        by_rows = by_rows.add(&r)?;
    }

    let max_cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut by_cols = Element::zero(dim);
    for j in 0..max_cols {
        let mut c = Element::zero(dim);
        for row in rows {
            if let Some(x) = row.get(j) {
                c = c.add(x)?;
            }
        }
        by_cols = by_cols.add(&c)?;
    }

    Ok(total.max_abs_diff(&by_rows)? <= tol && total.max_abs_diff(&by_cols)? <= tol)
}

/// Monotone convergence check for series: `stages[α][n]` must be nonnegative
/// and increasing in `α` with pointwise limits `limits[n]`; verifies that the
/// stage sums increase toward the sum of the limits, agreeing within `tol`
/// at the final stage.
pub fn monotone_limit_check(stages: &[Vec<Element>], limits: &[Element], tol: f64) -> Result<bool> {
    if stages.is_empty() {
        return Err(Error::InvalidArgument("need at least one stage".into()));
    }
    let dim = check_rectangular(stages)?;
    let zero = Element::zero(dim);
    for stage in stages {
        if stage.len() != limits.len() {
            return Err(Error::InvalidArgument(
                "every stage must cover the same index range as the limits".into(),
            ));
        }
        for x in stage {
            if !x.ge(&zero)? {
                return Err(Error::Precondition("terms must be nonnegative".into()));
            }
        }
    }
    for w in stages.windows(2) {
        for (lo, hi) in w[0].iter().zip(&w[1]) {
            if !lo.le(hi)? {
                return Err(Error::Precondition("stages must increase pointwise".into()));
            }
        }
    }
    for (last, lim) in stages.last().unwrap().iter().zip(limits) {
        if !last.le(lim)? {
            return Err(Error::Precondition(
                "stages must stay below the declared limits".into(),
            ));
        }
    }

    let mut sum_limits = Element::zero(dim);
    for lim in limits {
        sum_limits = sum_limits.add(lim)?;
    }
    let mut prev_sum: Option<Element> = None;
    for stage in stages {
        let mut s = Element::zero(dim);
        for x in stage {
            s = s.add(x)?;
        }
        if let Some(p) = &prev_sum {
            if !p.le(&s)? {
                return Err(Error::Precondition("stage sums must be nondecreasing".into()));
            }
        }
        prev_sum = Some(s);
    }
    Ok(prev_sum.unwrap().max_abs_diff(&sum_limits)? <= tol)
}

/// Dominated convergence check for series: `|stages[α][n]| ≤ dominator[n]`
/// for every `α`; verifies that the final stage sum agrees with the sum of
/// the pointwise limits within `tol`.
pub fn dominated_limit_check(
    stages: &[Vec<Element>],
    limits: &[Element],
    dominator: &[Element],
    tol: f64,
) -> Result<bool> {
    if stages.is_empty() {
        return Err(Error::InvalidArgument("need at least one stage".into()));
    }
    let dim = check_rectangular(stages)?;
    if dominator.len() != limits.len() {
        return Err(Error::InvalidArgument(
            "dominator must cover the same index range as the limits".into(),
        ));
    }
    for stage in stages {
        if stage.len() != limits.len() {
            return Err(Error::InvalidArgument(
                "every stage must cover the same index range as the limits".into(),
            ));
        }
        for (x, y) in stage.iter().zip(dominator) {
            if !x.abs().le(y)? {
                return Err(Error::Precondition(
                    "terms must be dominated by the declared dominator".into(),
                ));
            }
        }
    }
    for (lim, y) in limits.iter().zip(dominator) {
        if !lim.abs().le(y)? {
            return Err(Error::Precondition(
                "limits must be dominated by the declared dominator".into(),
            ));
        }
    }
    let mut sum_limits = Element::zero(dim);
    for lim in limits {
        sum_limits = sum_limits.add(lim)?;
    }
    let mut last = Element::zero(dim);
    for x in stages.last().unwrap() {
        last = last.add(x)?;
    }
    Ok(last.max_abs_diff(&sum_limits)? <= tol)
}

/// `exp(x)` computed as the supremum of the partial sums `Σ_{k≤K} x^k/k!`,
/// truncated at a level certified by the Lagrange remainder bound
/// `M^{K+1} e^M / (K+1)!` with `M = ‖x‖_e`.
pub fn exp_element(x: &Element, tol: f64) -> Result<Element> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    const MAX_TERMS: u64 = 5_000;
    let m = x.e_norm();
    let mut bound = m.exp();
    let mut levels = 0u64;
    loop {
        bound *= m / (levels + 1) as f64;
        if bound < tol {
            break;
        }
        levels += 1;
        if levels > MAX_TERMS {
            return Err(Error::Divergence(format!(
                "exponential series not certified below {tol} within {MAX_TERMS} terms (‖x‖_e = {m})"
            )));
        }
    }
    let out = x
        .values()
        .iter()
        .map(|&v| {
            let mut term = 1.0f64;
            let mut acc = 1.0f64;
            for k in 1..=levels {
                term *= v / k as f64;
                acc += term;
            }
            acc
        })
        .collect();
    Element::new(out)
}

/// Checks `(e + x_n/n)^n → exp(x)` for a sequence with order limit `x`.
/// Terms are indexed from `n = 1`.
pub fn power_limit_check(
    seq: &ElementSequence,
    limit: &Element,
    tol: f64,
    horizon: usize,
) -> Result<ConvergenceReport> {
    let dim = seq.dim();
    if dim != limit.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: limit.dim(),
        });
    }
    check_horizon(seq, horizon)?;
    let terms: Vec<Element> = (0..horizon)
        .map(|idx| {
            let n = idx + 1;
            let x_n = seq.term(idx);
            let base = Element::unit(dim).add(&x_n.scale(1.0 / n as f64))?;
            Ok(base.map(|v| v.powi(n as i32)))
        })
        .collect::<Result<_>>()?;
    let exp_limit = exp_element(limit, tol * 1e-3)?;
    order_converges(&ElementSequence::from_terms(terms)?, &exp_limit, tol, horizon)
}

/// Checks `x_n^n → 0` for an order-null sequence (terms indexed from 1).
pub fn power_null_check(seq: &ElementSequence, tol: f64, horizon: usize) -> Result<ConvergenceReport> {
    let dim = seq.dim();
    check_horizon(seq, horizon)?;
    let terms: Vec<Element> = (0..horizon)
        .map(|idx| {
            let n = idx + 1;
            Ok(seq.term(idx).map(|v| v.powi(n as i32)))
        })
        .collect::<Result<_>>()?;
    order_converges(
        &ElementSequence::from_terms(terms)?,
        &Element::zero(dim),
        tol,
        horizon,
    )
}

/// Per-value convergence evidence for a sequence of mass functions.
#[derive(Debug, Clone)]
pub struct TDistReport {
    pub per_value: Vec<ConvergenceReport>,
    pub converged: bool,
}

/// Tests convergence in distribution: for every `k ≤ k_max` the masses at
/// `k` must order-converge to the target mass at `k`.
pub fn tdist_converges(
    seq: &[MassFunction],
    target: &MassFunction,
    k_max: u64,
    tol: f64,
) -> Result<TDistReport> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("need at least one mass function".into()));
    }
    let horizon = seq.len();
    let mut per_value = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let terms: Vec<Element> = seq.iter().map(|m| m.mass(k)).collect();
        let report = order_converges(
            &ElementSequence::from_terms(terms)?,
            &target.mass(k),
            tol,
            horizon,
        )?;
        per_value.push(report);
    }
    let converged = per_value.iter().all(|r| r.converged);
    Ok(TDistReport { per_value, converged })
}

/// Both directions of the equivalence between pointwise convergence of
/// generating functions and convergence in distribution, on a finite prefix.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub genfun_pointwise: bool,
    pub tdist: bool,
}

impl EquivalenceReport {
    /// The biconditional: the two convergence notions agree on the evidence.
    pub fn holds(&self) -> bool {
        self.genfun_pointwise == self.tdist
    }
}

/// Tests the equivalence on a sequence of generating functions: pointwise
/// order convergence of `g_α(s)` on the grid against convergence of the
/// masses up to `k_max`.
pub fn genfun_equivalence_check(
    seq: &[GenFun],
    target: &GenFun,
    s_grid: &[f64],
    k_max: u64,
    tol: f64,
) -> Result<EquivalenceReport> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("need at least one generating function".into()));
    }
    if s_grid.is_empty() {
        return Err(Error::InvalidArgument("s grid must be nonempty".into()));
    }
    let horizon = seq.len();
    let mut genfun_pointwise = true;
    for &s in s_grid {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!(
                "pointwise convergence is tested on [0, 1]; got s = {s}"
            )));
        }
        let terms: Vec<Element> = seq.iter().map(|g| g.eval(s)).collect::<Result<_>>()?;
        let report = order_converges(
            &ElementSequence::from_terms(terms)?,
            &target.eval(s)?,
            tol,
            horizon,
        )?;
        if !report.converged {
            genfun_pointwise = false;
            break;
        }
    }
    let masses: Vec<MassFunction> = seq.iter().map(|g| g.coefficients().clone()).collect();
    let tdist = tdist_converges(&masses, target.coefficients(), k_max, tol)?.converged;
    Ok(EquivalenceReport {
        genfun_pointwise,
        tdist,
    })
}

/// One row of the Poisson approximation table.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonApproxRow {
    pub n: u64,
    pub k: u64,
    pub block: usize,
    pub binomial_mass: f64,
    pub poisson_mass: f64,
    pub abs_err: f64,
}

/// Per-`n` summary of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonApproxSummary {
    pub n: u64,
    /// `max_{k ≤ k_max, block} |Binomial(n, g/n) mass − Poisson(g) mass|`.
    pub err: f64,
    /// Certified threshold `(max_B g_B)² / n` (a total-variation bound
    /// applied blockwise; implementer-derived, not part of the modeled
    /// statements).
    pub le_cam_bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone)]
pub struct PoissonApproxTable {
    pub rows: Vec<PoissonApproxRow>,
    pub summaries: Vec<PoissonApproxSummary>,
}

impl PoissonApproxTable {
    pub fn errs_strictly_decreasing(&self) -> bool {
        self.summaries.windows(2).all(|w| w[1].err < w[0].err)
    }
}

/// Compares Binomial(n, g/n) masses with Poisson(g) masses for each `n` in
/// `n_list`, per block, for `k ≤ k_max`.
///
/// Rows are ordered by (n, k, block) regardless of how the work is split, so
/// the output is independent of the worker count.
pub fn poisson_limit_experiment(
    triple: &ConditionalTriple,
    g: &Element,
    n_list: &[u64],
    k_max: u64,
) -> Result<PoissonApproxTable> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("n list must be nonempty".into()));
    }
    if g.dim() != triple.dim() || !triple.in_range(g) {
        return Err(Error::InvalidArgument("g must be block-constant on the triple".into()));
    }
    let g_blocks = triple.block_values(g)?;
    if g_blocks.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidArgument("g must be strictly positive".into()));
    }
    let g_max = g.e_norm();
    for &n in n_list {
        if n == 0 || g_max / n as f64 >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "p_n = g/n must lie strictly below e; violated at n = {n}"
            )));
        }
    }

    let per_n: Vec<(Vec<PoissonApproxRow>, PoissonApproxSummary)> =
        par::try_map_indexed(n_list.len(), |idx| {
            let n = n_list[idx];
            let per_block: Vec<(Vec<f64>, Vec<f64>)> = g_blocks
                .iter()
                .map(|&gb| {
                    (
                        binomial_pmf_scalar(n, gb / n as f64),
                        poisson_pmf_scalar(gb, k_max),
                    )
                })
                .collect();
            let mut rows = Vec::with_capacity((k_max as usize + 1) * g_blocks.len());
            let mut err = 0.0f64;
            for k in 0..=k_max {
                for (b, (binom, pois)) in per_block.iter().enumerate() {
                    let bm = binom.get(k as usize).copied().unwrap_or(0.0);
                    let pm = pois[k as usize];
                    let abs_err = (bm - pm).abs();
                    err = err.max(abs_err);
                    rows.push(PoissonApproxRow {
                        n,
                        k,
                        block: b,
                        binomial_mass: bm,
                        poisson_mass: pm,
                        abs_err,
                    });
                }
            }
            let le_cam_bound = g_max * g_max / n as f64;
            Ok((
                rows,
                PoissonApproxSummary {
                    n,
                    err,
                    le_cam_bound,
                    within_bound: err <= le_cam_bound,
                },
            ))
        })?;

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (r, s) in per_n {
        rows.extend(r);
        summaries.push(s);
    }
    Ok(PoissonApproxTable { rows, summaries })
}

/// Sequential variant of [`poisson_limit_experiment`] for comparison runs.
pub fn poisson_limit_experiment_seq(
    triple: &ConditionalTriple,
    g: &Element,
    n_list: &[u64],
    k_max: u64,
) -> Result<PoissonApproxTable> {
    // identical computation, forced onto one thread
    par::with_sequential(|| poisson_limit_experiment(triple, g, n_list, k_max))
}

fn binomial_mass_at(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let q = 1.0 - p;
    let mut m = q.powi(n as i32);
    for j in 0..k {
        m *= (n - j) as f64 / (j + 1) as f64 * (p / q);
    }
    m
}

fn poisson_mass_at(g: f64, k: u64) -> f64 {
    let mut m = (-g).exp();
    for j in 1..=k {
        m *= g / j as f64;
    }
    m
}

/// Verifies numerically that thinning a Poisson count by independent
/// Bernoulli summands yields a Poisson distribution with the product
/// parameter: the truncated mixture `Σ_n π_N(n) · Binomial(n, p) mass`
/// is compared against the Poisson(p·g) mass for every `k ≤ k_max`.
pub fn compound_poisson_check(
    triple: &ConditionalTriple,
    g: &Element,
    p: &Element,
    k_max: u64,
    tol: f64,
) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let g_blocks = triple.block_values(g)?;
    let p_blocks = triple.block_values(p)?;
    if g_blocks.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidArgument("g must be strictly positive".into()));
    }
    if p_blocks.iter().any(|&v| v <= 0.0 || v >= 1.0) {
        return Err(Error::InvalidArgument("p must satisfy 0 < p < e".into()));
    }
    // Truncate the Poisson index so the neglected tail cannot spoil tol.
    let trunc = poisson_truncation_level(g.e_norm(), tol * 0.1)?;
    for (gb, pb) in g_blocks.iter().zip(&p_blocks) {
        let pois_n = poisson_pmf_scalar(*gb, trunc);
        for k in 0..=k_max {
            let mut mix = 0.0f64;
            for (n, pn) in pois_n.iter().enumerate() {
                mix += pn * binomial_mass_at(n as u64, *pb, k);
            }
            let expected = poisson_mass_at(gb * pb, k);
            if (mix - expected).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
