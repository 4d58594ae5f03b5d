//! The randomized oracle-equivalence suite: every operation with a
//! classical counterpart is recomputed by enumeration on random instances
//! and both sides must agree within the configured tolerance.

use crate::bounds::{chernoff_lower, chernoff_upper};
use crate::distributions::{
    cdf, cdf_left, equal_in_distribution, mass, realize_bernoulli, realize_iid_family, Family,
};
use crate::element::Element;
use crate::error::Result;
use crate::genfun::{eval_via_power, mean_via_tail, GenFun};
use crate::oracle::FiniteProbSpace;
use crate::par;
use crate::verify::gen::{random_block_constant, random_natural, random_real_element, random_triple, rng_for};

/// Configuration of the randomized suite.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub instances: usize,
    pub max_dim: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            instances: 500,
            max_dim: 64,
            seed: 0,
            tol: 1e-12,
        }
    }
}

/// Worst disagreement found on one instance.
#[derive(Debug, Clone)]
pub struct InstanceOutcome {
    pub index: usize,
    pub max_abs_err: f64,
    pub worst_check: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub outcomes: Vec<InstanceOutcome>,
    pub max_abs_err: f64,
    pub worst_check: String,
    pub pass: bool,
}

struct Tracker {
    max: f64,
    worst: String,
}

impl Tracker {
    fn new() -> Self {
        Self {
            max: 0.0,
            worst: "none".to_string(),
        }
    }

    fn note(&mut self, name: &str, err: f64) {
        if err > self.max {
            self.max = err;
            self.worst = name.to_string();
        }
    }

    fn diff(&mut self, name: &str, a: &Element, b: &Element) -> Result<()> {
        self.note(name, a.max_abs_diff(b)?);
        Ok(())
    }

    fn require(&mut self, name: &str, ok: bool) {
        if !ok {
            self.note(name, 1.0);
        }
    }
}

/// Runs the suite, in parallel over instances when the `parallel` feature is
/// enabled. Instance outcomes are deterministic functions of `(seed, index)`.
pub fn equivalence_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let outcomes = par::try_map_indexed(cfg.instances, |i| check_instance(cfg, i))?;
    let mut max_abs_err = 0.0f64;
    let mut worst_check = "none".to_string();
    for o in &outcomes {
        if o.max_abs_err > max_abs_err {
            max_abs_err = o.max_abs_err;
            worst_check = format!("instance {}: {}", o.index, o.worst_check);
        }
    }
    let pass = outcomes.iter().all(|o| o.pass);
    Ok(SuiteReport {
        outcomes,
        max_abs_err,
        worst_check,
        pass,
    })
}

/// Sequential variant of [`equivalence_suite`]; identical output.
pub fn equivalence_suite_seq(cfg: &SuiteConfig) -> Result<SuiteReport> {
    par::with_sequential(|| equivalence_suite(cfg))
}

fn check_instance(cfg: &SuiteConfig, index: usize) -> Result<InstanceOutcome> {
    let mut rng = rng_for(cfg.seed, index as u64);
    let mut tr = Tracker::new();

    let t = random_triple(&mut rng, cfg.max_dim);
    let space = FiniteProbSpace::from_triple(&t);
    let x = random_natural(&mut rng, &t, 6);
    let rv: Vec<f64> = x.element().values().to_vec();

    // conditional expectation against the classical formula
    tr.diff("cond_expect(natural)", &t.expect(x.element())?, &space.cond_expect(&rv)?)?;
    let y = random_real_element(&mut rng, t.dim());
    tr.diff("cond_expect(real)", &t.expect(&y)?, &space.cond_expect(y.values())?)?;
    let tx = t.expect(x.element())?;
    tr.diff("projection identity", &t.expect(&tx)?, &tx)?;
    tr.require("range membership of Tx", t.in_range(&tx));

    // strict positivity: a nonzero nonnegative element has nonzero mean
    let pos = y.abs();
    if !pos.is_zero() {
        tr.require("strict positivity", !t.expect(&pos)?.is_zero());
    }

    // masses
    for n in 0..=x.max_value() {
        tr.diff(
            "mass vs pmf",
            &mass(&t, &x, n)?,
            &space.cond_pmf_at(&rv, n as f64)?,
        )?;
    }

    // distribution function and its left limits
    let top = x.max_value() as f64;
    for tt in [-0.5, 0.0, 0.5, 1.0, top - 0.5, top, top + 0.5] {
        tr.diff(
            "cdf vs tail",
            &cdf(&t, x.element(), tt)?,
            &space.cond_tail(&rv, tt, false, false)?,
        )?;
        tr.diff(
            "cdf left limit vs strict tail",
            &cdf_left(&t, x.element(), tt)?,
            &space.cond_tail(&rv, tt, true, false)?,
        )?;
    }
    for n in 0..=x.max_value() {
        let jump = cdf(&t, x.element(), n as f64)?.sub(&cdf_left(&t, x.element(), n as f64)?)?;
        tr.diff("mass = cdf jump", &mass(&t, &x, n)?, &jump)?;
    }

    // generating function: coefficient sum, power evaluation, classical mean
    let g = GenFun::of_element(&t, &x)?;
    for s in [0.0, 0.3, 0.7, 1.0, 1.6] {
        let via_coeffs = g.eval(s)?;
        tr.diff("eval vs classical E[s^x]", &via_coeffs, &space.cond_power_mean(&rv, s)?)?;
        tr.diff("eval vs T(s^x)", &via_coeffs, &eval_via_power(&t, &x, s)?)?;
        let u = Element::constant(t.dim(), s)?;
        tr.diff("generalized eval at se", &g.eval_generalized(&u)?, &via_coeffs)?;
    }

    // moments
    tr.diff("mean", &g.mean()?, &space.cond_expect(&rv)?)?;
    tr.diff("second moment", &g.second_moment()?, &space.cond_moment(&rv, 2)?)?;
    tr.diff("variance", &g.variance()?, &space.cond_variance(&rv)?)?;
    tr.diff("mean via tails", &mean_via_tail(&t, &x)?, &g.mean()?)?;
    for n in [2u32, 3] {
        tr.diff(
            "factorial moment",
            &g.factorial_moment(n)?,
            &space.cond_falling_factorial(&rv, n)?,
        )?;
    }

    // tail bounds: exact side against enumeration, slack nonnegative
    for (alpha, s) in [(1.0, 2.0), (2.0, 4.0)] {
        let rep = chernoff_upper(&t, &g, alpha, s, &x)?;
        tr.diff("upper bound lhs", &rep.lhs, &space.cond_tail(&rv, alpha, false, true)?)?;
        tr.note("upper bound slack", (-rep.min_slack()).max(0.0));
    }
    for (alpha, s) in [(0.0, 0.5), (1.0, 0.7)] {
        let rep = chernoff_lower(&t, &g, alpha, s, &x)?;
        tr.diff("lower bound lhs", &rep.lhs, &space.cond_tail(&rv, alpha, false, false)?)?;
        tr.note("lower bound slack", (-rep.min_slack()).max(0.0));
    }

    // realization of an indicator element with prescribed success mass
    let p = random_block_constant(&mut rng, &t, 0.05, 0.95);
    let (ext, lift, b) = realize_bernoulli(&t, &p)?;
    let p_lifted = lift.apply(&p)?;
    tr.diff("realized success mean", &ext.expect(b.element())?, &p_lifted)?;
    tr.diff("realized mass at one", &mass(&ext, &b, 1)?, &p_lifted)?;
    tr.diff(
        "realized mass at zero",
        &mass(&ext, &b, 0)?,
        &ext.unit().sub(&p_lifted)?,
    )?;

    // sums of independent realized pairs, on small instances
    if t.dim() <= 8 {
        let r = realize_iid_family(&t, &Family::Bernoulli { p: p.clone() }, 2)?;
        tr.require(
            "iid pair equal in distribution",
            equal_in_distribution(&r.triple, &r.elements[0], &r.elements[1])?,
        );
        tr.require(
            "iid pair independent",
            r.triple.check_elements_independent(&r.elements[0], &r.elements[1])?,
        );
        let sum = r.elements[0].add(&r.elements[1])?;
        let g_sum = GenFun::of_element(&r.triple, &sum)?;
        let g_prod = GenFun::of_element(&r.triple, &r.elements[0])?
            .product(&GenFun::of_element(&r.triple, &r.elements[1])?)?;
        let ext_space = FiniteProbSpace::from_triple(&r.triple);
        let sum_rv: Vec<f64> = sum.element().values().to_vec();
        for k in 0..=sum.max_value() {
            tr.diff("sum coefficients vs product", &g_sum.coefficient(k), &g_prod.coefficient(k))?;
            tr.diff(
                "sum coefficients vs enumeration",
                &g_sum.coefficient(k),
                &ext_space.cond_pmf_at(&sum_rv, k as f64)?,
            )?;
        }
    }

    Ok(InstanceOutcome {
        index,
        pass: tr.max <= cfg.tol,
        max_abs_err: tr.max,
        worst_check: tr.worst,
    })
}
