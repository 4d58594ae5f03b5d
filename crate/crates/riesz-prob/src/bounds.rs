//! Tail inequalities obtained from generating functions: the scalar- and
//! element-threshold bounds `T(P_{x≥α e} e) ≤ g_x(s)/s^α`, bound tightening
//! over `s`, and the exponential bound for sums of independent indicator
//! summands.
//!
//! Both sides of every inequality are computed: the left side is the exact
//! tail probability of the realized element, the right side the bound. The
//! slack must be nonnegative whenever the preconditions hold.

use crate::conditional::ConditionalTriple;
use crate::convergence::exp_element;
use crate::distributions::{realize_iid_family, Family, NaturalElement};
use crate::element::{band_of, proj_geq, Element};
use crate::error::{Error, Result};
use crate::genfun::GenFun;

/// Upper limit of the search window used by [`optimize_bound`].
pub const OPTIMIZE_S_MAX: f64 = 1e6;

/// Which tail a bound controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    /// `T(P_{x≥·} e)`, valid for `s > 1`.
    Upper,
    /// `T(P_{x≤·} e)`, valid for `0 < s < 1`.
    Lower,
}

/// The two sides of a tail bound, with per-block evaluation points.
#[derive(Debug, Clone)]
pub struct TailBoundReport {
    /// Scalar threshold `α` (the element threshold `u` reduces to per-block
    /// scalars; they are recorded here per block).
    pub threshold: Vec<f64>,
    /// Evaluation point per block.
    pub s: Vec<f64>,
    /// Exact tail probability.
    pub lhs: Element,
    /// The bound.
    pub rhs: Element,
    /// `rhs − lhs`, nonnegative whenever the preconditions hold.
    pub slack: Element,
}

impl TailBoundReport {
    pub fn min_slack(&self) -> f64 {
        self.slack.values().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn report(threshold: Vec<f64>, s: Vec<f64>, lhs: Element, rhs: Element) -> Result<TailBoundReport> {
    let slack = rhs.sub(&lhs)?;
    Ok(TailBoundReport {
        threshold,
        s,
        lhs,
        rhs,
        slack,
    })
}

fn tail_lhs(
    triple: &ConditionalTriple,
    x: &NaturalElement,
    u: &Element,
    mode: TailMode,
) -> Result<Element> {
    let proj = match mode {
        TailMode::Upper => proj_geq(x.element(), u)?,
        TailMode::Lower => proj_geq(u, x.element())?,
    };
    triple.expect_indicator(&proj)
}

/// `T(P_{x≥αe} e) ≤ g_x(s)/s^α` for `s > 1`.
pub fn chernoff_upper(
    triple: &ConditionalTriple,
    g: &GenFun,
    alpha: f64,
    s: f64,
    x: &NaturalElement,
) -> Result<TailBoundReport> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be nonnegative, got {alpha}")));
    }
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("the upper bound requires s > 1, got {s}")));
    }
    let u = Element::constant(triple.dim(), alpha)?;
    let lhs = tail_lhs(triple, x, &u, TailMode::Upper)?;
    let rhs = g.eval(s)?.scale(s.powf(-alpha));
    report(
        vec![alpha; triple.n_blocks()],
        vec![s; triple.n_blocks()],
        lhs,
        rhs,
    )
}

/// `T(P_{x≤αe} e) ≤ g_x(s)/s^α` for `0 < s < 1`.
pub fn chernoff_lower(
    triple: &ConditionalTriple,
    g: &GenFun,
    alpha: f64,
    s: f64,
    x: &NaturalElement,
) -> Result<TailBoundReport> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be nonnegative, got {alpha}")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "the lower bound requires 0 < s < 1, got {s}"
        )));
    }
    let u = Element::constant(triple.dim(), alpha)?;
    let lhs = tail_lhs(triple, x, &u, TailMode::Lower)?;
    let rhs = g.eval(s)?.scale(s.powf(-alpha));
    report(
        vec![alpha; triple.n_blocks()],
        vec![s; triple.n_blocks()],
        lhs,
        rhs,
    )
}

/// The element-threshold bound `T(P_{x≥u} e) ≤ s^{−u} g_x(s)` for
/// block-constant `u` (and the mirrored `x ≤ u` version for `0 < s < 1`).
pub fn chernoff_general(
    triple: &ConditionalTriple,
    g: &GenFun,
    u: &Element,
    s: f64,
    x: &NaturalElement,
    mode: TailMode,
) -> Result<TailBoundReport> {
    if !triple.in_range(u) {
        return Err(Error::InvalidArgument(
            "the threshold element must be block-constant (lie in the range of T)".into(),
        ));
    }
    match mode {
        TailMode::Upper if !(s > 1.0) => {
            return Err(Error::InvalidArgument(format!("the upper bound requires s > 1, got {s}")));
        }
        TailMode::Lower if !(s > 0.0 && s < 1.0) => {
            return Err(Error::InvalidArgument(format!(
                "the lower bound requires 0 < s < 1, got {s}"
            )));
        }
        _ => {}
    }
    let lhs = tail_lhs(triple, x, u, mode)?;
    // s^{−u} g(s), componentwise block-dependent exponent
    let damp = u.map(|ui| s.powf(-ui));
    let rhs = g.eval(s)?.multiply(&damp)?;
    report(
        triple.block_values(u)?,
        vec![s; triple.n_blocks()],
        lhs,
        rhs,
    )
}

/// Tightens a scalar-threshold bound over `s`, block by block, by golden
/// section search in `ln s` (the per-block objective is convex there).
/// Returns the per-block minimizers and a report evaluated at them; the
/// returned bound is no worse than any point probed during the search, and
/// `s = 2` (or `1/2` for the lower mode) is always probed.
pub fn optimize_bound(
    triple: &ConditionalTriple,
    g: &GenFun,
    alpha: f64,
    mode: TailMode,
    x: &NaturalElement,
) -> Result<(Vec<f64>, TailBoundReport)> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be nonnegative, got {alpha}")));
    }
    let (t_lo, t_hi, seed) = match mode {
        TailMode::Upper => (1e-9, OPTIMIZE_S_MAX.ln(), 2.0f64),
        TailMode::Lower => (-(OPTIMIZE_S_MAX.ln()), -1e-9, 0.5f64),
    };
    let n_blocks = triple.n_blocks();
    let block_rhs = |s: f64| -> Result<Vec<f64>> {
        let v = g.eval(s)?.scale(s.powf(-alpha));
        triple.block_values(&v)
    };

    // golden section on t = ln s, per block; every probe may improve the
    // recorded best, so the result is the minimum over all points tried
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut best_s = vec![seed; n_blocks];
    let mut best_v = block_rhs(seed)?;
    for b in 0..n_blocks {
        let (mut lo, mut hi) = (t_lo, t_hi);
        let mut t1 = hi - phi * (hi - lo);
        let mut t2 = lo + phi * (hi - lo);
        let mut f1 = block_rhs(t1.exp())?[b];
        let mut f2 = block_rhs(t2.exp())?[b];
        for _ in 0..120 {
            if f1 > f2 {
                lo = t1;
                t1 = t2;
                f1 = f2;
                t2 = lo + phi * (hi - lo);
                f2 = block_rhs(t2.exp())?[b];
            } else {
                hi = t2;
                t2 = t1;
                f2 = f1;
                t1 = hi - phi * (hi - lo);
                f1 = block_rhs(t1.exp())?[b];
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        let s_b = ((lo + hi) / 2.0).exp();
        for (s, v) in [(s_b, block_rhs(s_b)?[b]), (t1.exp(), f1), (t2.exp(), f2)] {
            if v < best_v[b] {
                best_v[b] = v;
                best_s[b] = s;
            }
        }
    }

    let u = Element::constant(triple.dim(), alpha)?;
    let lhs = tail_lhs(triple, x, &u, mode)?;
    let mut rhs_vals = vec![0.0; triple.dim()];
    for (b, block) in triple.partition().iter().enumerate() {
        let v = block_rhs(best_s[b])?[b];
        for &i in block {
            rhs_vals[i] = v;
        }
    }
    let rhs = Element::new(rhs_vals)?;
    let rep = report(vec![alpha; n_blocks], best_s.clone(), lhs, rhs)?;
    Ok((best_s, rep))
}

/// `‖f‖_e = inf{β : |f| ≤ βe}`: the max-abs entry.
pub fn e_norm(f: &Element) -> f64 {
    f.e_norm()
}

/// The exponential bound for a sum `S_n` of `n` independent indicator
/// summands with common success probability `f`:
///
/// `T(P_{(S_n − te)⁺} e) ≤ eᵗ (n‖f‖_e / t)ᵗ exp(−n f)` for `t > n‖f‖_e`.
///
/// The sum is realized internally and the left side computed exactly; note
/// that the band generated by `(S_n − te)⁺` is the strict-tail projection
/// `P_{S_n > te}`.
pub fn bernoulli_sum_bound(
    triple: &ConditionalTriple,
    n: u64,
    f: &Element,
    t: f64,
) -> Result<TailBoundReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one summand".into()));
    }
    let norm = e_norm(f);
    if !(t > n as f64 * norm) {
        return Err(Error::InvalidArgument(format!(
            "the bound requires t > n·‖f‖_e = {}, got {t}",
            n as f64 * norm
        )));
    }
    let r = realize_iid_family(triple, &Family::Bernoulli { p: f.clone() }, n as usize)?;
    let mut sum = r.elements[0].element().clone();
    for x in &r.elements[1..] {
        sum = sum.add(x.element())?;
    }
    let te = Element::constant(sum.dim(), t)?;
    let strict_tail = band_of(&sum.sub(&te)?.pos_part());
    let lhs_ext = r.triple.expect_indicator(&strict_tail)?;
    let lhs = r.lift.restrict(&lhs_ext)?;

    let scalar = t.exp() * (n as f64 * norm / t).powf(t);
    let rhs = exp_element(&f.scale(-(n as f64)), 1e-15)?.scale(scalar);
    report(
        vec![t; triple.n_blocks()],
        vec![t / (n as f64 * norm); triple.n_blocks()],
        lhs,
        rhs,
    )
}
