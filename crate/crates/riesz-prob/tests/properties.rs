//! Property tests for the algebraic identities, plus the counted randomized
//! checks with fixed seeds.

use std::collections::BTreeMap;

use proptest::collection::vec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riesz_prob::calculus::{apply_fn, apply_step, power_element, spectral_system, StepFunction, StepPiece};
use riesz_prob::convergence::{
    dominated_limit_check, exp_element, fubini_check, monotone_limit_check, order_converges,
    power_limit_check, ElementSequence,
};
use riesz_prob::distributions::{
    all_masses, cdf, cdf_left, mass, realize_bernoulli, realize_iid_family, Family, MassFunction,
};
use riesz_prob::genfun::GenFun;
use riesz_prob::{band_of, proj_eq, proj_geq, BandProjection, ConditionalTriple, Element, NaturalElement};

// ---------------------------------------------------------------------------
// strategies

/// Elements drawn from a small integer set so that equality bands are
/// populated.
fn lattice_values(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    vec((-2i32..=2).prop_map(|v| v as f64), dim..=dim)
}

fn three_lattice_elements() -> impl Strategy<Value = (Element, Element, Element)> {
    (1usize..10).prop_flat_map(|d| {
        (lattice_values(d), lattice_values(d), lattice_values(d)).prop_map(|(a, b, c)| {
            (
                Element::new(a).unwrap(),
                Element::new(b).unwrap(),
                Element::new(c).unwrap(),
            )
        })
    })
}

fn arb_triple(max_dim: usize) -> impl Strategy<Value = ConditionalTriple> {
    (1usize..=max_dim).prop_flat_map(|d| {
        (vec(0.05f64..1.0, d..=d), vec(0usize..4, d..=d)).prop_map(|(weights, labels)| {
            let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (i, &l) in labels.iter().enumerate() {
                blocks.entry(l).or_default().push(i);
            }
            ConditionalTriple::new(weights, blocks.into_values().collect()).unwrap()
        })
    })
}

fn arb_triple_and_natural() -> impl Strategy<Value = (ConditionalTriple, NaturalElement)> {
    arb_triple(10).prop_flat_map(|t| {
        let d = t.dim();
        (Just(t), vec(0u64..=6, d..=d)).prop_map(|(t, vals)| {
            let x = NaturalElement::new(
                Element::new(vals.into_iter().map(|v| v as f64).collect()).unwrap(),
            )
            .unwrap();
            (t, x)
        })
    })
}

fn arb_triple_and_natural_pair(
) -> impl Strategy<Value = (ConditionalTriple, NaturalElement, NaturalElement)> {
    arb_triple(10).prop_flat_map(|t| {
        let d = t.dim();
        (Just(t), vec(0u64..=6, d..=d), vec(0u64..=6, d..=d)).prop_map(|(t, a, b)| {
            let to_nat = |vals: Vec<u64>| {
                NaturalElement::new(
                    Element::new(vals.into_iter().map(|v| v as f64).collect()).unwrap(),
                )
                .unwrap()
            };
            (t, to_nat(a), to_nat(b))
        })
    })
}

fn arb_step_function() -> impl Strategy<Value = StepFunction> {
    // disjoint pieces carved from a sorted set of breakpoints
    (vec(-3.0f64..3.0, 2..6), vec(-2.0f64..2.0, 1..5)).prop_map(|(mut cuts, values)| {
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let mut pieces = Vec::new();
        for (w, &value) in cuts.windows(2).zip(values.iter()) {
            pieces.push(StepPiece { a: w[0], b: w[1], value });
        }
        StepFunction::new(pieces).unwrap()
    })
}

// ---------------------------------------------------------------------------
// lattice identities

proptest! {
    #[test]
    fn absolute_value_is_sup_with_negation((x, _, _) in three_lattice_elements()) {
        prop_assert_eq!(x.abs(), x.sup(&x.neg()).unwrap());
    }

    #[test]
    fn sup_plus_inf_is_sum((x, y, _) in three_lattice_elements()) {
        let lhs = x.sup(&y).unwrap().add(&x.inf(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, x.add(&y).unwrap());
    }

    #[test]
    fn band_generated_is_symmetric_in_comparison((x, y, w) in three_lattice_elements()) {
        // band of |x−y| ∨ (x−w)⁺ does not depend on which side carries w
        let lhs = band_of(&x.sub(&y).unwrap().abs().sup(&x.sub(&w).unwrap().pos_part()).unwrap());
        let rhs = band_of(&x.sub(&y).unwrap().abs().sup(&y.sub(&w).unwrap().pos_part()).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn equality_bands_chain((x, y, w) in three_lattice_elements()) {
        let lhs = proj_eq(&x, &y).unwrap().compose(&proj_eq(&x, &w).unwrap()).unwrap();
        let rhs = proj_eq(&x, &y).unwrap().compose(&proj_eq(&y, &w).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn comparison_transfers_through_equality_band((x, y, w) in three_lattice_elements()) {
        let eq = proj_eq(&x, &w).unwrap();
        let lhs = proj_geq(&x, &y).unwrap().compose(&eq).unwrap();
        let rhs = proj_geq(&w, &y).unwrap().compose(&eq).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn elements_agree_on_their_equality_band((x, y, _) in three_lattice_elements()) {
        let eq = proj_eq(&x, &y).unwrap();
        prop_assert_eq!(eq.apply(&x).unwrap(), eq.apply(&y).unwrap());
    }

    #[test]
    fn spectral_system_is_monotone((x, _, _) in three_lattice_elements()) {
        let sys = spectral_system(&x);
        let mut prev = BandProjection::zero(x.dim());
        for &t in sys.thresholds() {
            let cur = sys.at(t);
            // masks increase with t
            prop_assert_eq!(prev.compose(&cur).unwrap(), prev.clone());
            prev = cur;
        }
        prop_assert!(prev.is_identity());
    }
}

// ---------------------------------------------------------------------------
// functional calculus

proptest! {
    #[test]
    fn step_application_is_pointwise(f in arb_step_function(), (x, _, _) in three_lattice_elements()) {
        let via_spectral = apply_step(&f, &x);
        let via_pointwise = apply_fn(|t| f.eval_at(t), &x).unwrap();
        prop_assert_eq!(via_spectral, via_pointwise);
    }

    #[test]
    fn pointwise_product_rule(f in arb_step_function(), g in arb_step_function(), (x, _, _) in three_lattice_elements()) {
        let lhs = apply_fn(|t| f.eval_at(t) * g.eval_at(t), &x).unwrap();
        let rhs = apply_step(&f, &x).multiply(&apply_step(&g, &x)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_rule(f in arb_step_function(), (x, _, _) in three_lattice_elements()) {
        let g = |t: f64| t * t - 1.0;
        let lhs = apply_fn(|t| f.eval_at(g(t)), &x).unwrap();
        let rhs = apply_step(&f, &apply_fn(g, &x).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn functions_agree_on_equality_bands(f in arb_step_function(), (x, y, _) in three_lattice_elements()) {
        let eq = proj_eq(&x, &y).unwrap();
        let lhs = eq.apply(&apply_step(&f, &x)).unwrap();
        let rhs = eq.apply(&apply_step(&f, &y)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn positive_part_band_restriction(f in arb_step_function(), g in arb_step_function(), (x, _, _) in three_lattice_elements()) {
        // restricting g(x) to the band where f(x) > 0 equals applying
        // g·1_{(0,∞)}∘f pointwise
        let fx = apply_step(&f, &x);
        let lhs = band_of(&fx.pos_part()).apply(&apply_step(&g, &x)).unwrap();
        let rhs = apply_fn(
            |t| if f.eval_at(t) > 0.0 { g.eval_at(t) } else { 0.0 },
            &x,
        )
        .unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn step_and_pointwise_agree_on_two_hundred_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let d = rng.gen_range(1..=12);
        let x = Element::new((0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
        let mut cuts: Vec<f64> = (0..rng.gen_range(2..7)).map(|_| rng.gen_range(-4.0..4.0)).collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let pieces = cuts
            .windows(2)
            .map(|w| StepPiece { a: w[0], b: w[1], value: rng.gen_range(-2.0..2.0) })
            .collect();
        let f = StepFunction::new(pieces).unwrap();
        assert_eq!(apply_step(&f, &x), apply_fn(|t| f.eval_at(t), &x).unwrap());
    }
}

#[test]
fn increasing_step_approximations_converge_to_the_function() {
    // lower Darboux staircases of a continuous function increase to it in
    // order, and their applications converge to the pointwise application
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = |t: f64| t * t + 1.0;
    for _ in 0..5 {
        let d = rng.gen_range(1..=8);
        let x = Element::new((0..d).map(|_| rng.gen_range(0.0..3.0)).collect()).unwrap();
        let limit = apply_fn(f, &x).unwrap();
        let mut terms = Vec::new();
        for m in 1..=12u32 {
            let cells = 1usize << m.min(10);
            let width = 4.0 / cells as f64;
            let pieces: Vec<StepPiece> = (0..cells)
                .map(|c| {
                    let a = c as f64 * width;
                    let b = a + width;
                    // infimum of an increasing function on (a, b] is at a
                    StepPiece { a, b, value: f(a) }
                })
                .collect();
            let stage = apply_step(&StepFunction::new(pieces).unwrap(), &x);
            assert!(stage.le(&limit).unwrap());
            if let Some(prev) = terms.last() {
                let prev: &Element = prev;
                assert!(prev.le(&stage).unwrap());
            }
            terms.push(stage);
        }
        let horizon = terms.len();
        let report = order_converges(
            &ElementSequence::from_terms(terms).unwrap(),
            &limit,
            0.05,
            horizon,
        )
        .unwrap();
        assert!(report.converged);
    }
}

// ---------------------------------------------------------------------------
// conditional expectation

proptest! {
    #[test]
    fn operator_axioms((t, x) in arb_triple_and_natural()) {
        let e = t.unit();
        prop_assert_eq!(t.expect(&e).unwrap(), e.clone());
        let tx = t.expect(x.element()).unwrap();
        prop_assert!(t.expect(&tx).unwrap().max_abs_diff(&tx).unwrap() <= 1e-14);
        prop_assert!(t.in_range(&tx));
        prop_assert!(tx.ge(&Element::zero(t.dim())).unwrap());
    }

    #[test]
    fn averaging_with_block_constant_factor((t, x) in arb_triple_and_natural(), scale in -3.0f64..3.0) {
        let r_vals: Vec<f64> = (0..t.n_blocks()).map(|b| scale + b as f64).collect();
        let r = t.from_block_values(&r_vals).unwrap();
        let lhs = t.expect(&r.multiply(x.element()).unwrap()).unwrap();
        let rhs = r.multiply(&t.expect(x.element()).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }
}

#[test]
fn strict_positivity_on_a_hundred_random_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let t = random_triple(&mut rng, 16);
        let mut vals: Vec<f64> = (0..t.dim()).map(|_| rng.gen_range(0.0..2.0)).collect();
        // force at least one strictly positive coordinate
        let hot = rng.gen_range(0..t.dim());
        vals[hot] = rng.gen_range(0.5..2.0);
        let x = Element::new(vals).unwrap();
        assert!(!t.expect(&x).unwrap().is_zero());
    }
}

#[test]
fn independent_elements_stay_multiplicative_under_truncation() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..10 {
        let t = random_triple(&mut rng, 4);
        let p_vals: Vec<f64> = (0..t.n_blocks()).map(|_| rng.gen_range(0.1..0.9)).collect();
        let p = t.from_block_values(&p_vals).unwrap();
        let r = realize_iid_family(&t, &Family::Binomial { n: 3, p }, 2).unwrap();
        assert!(r
            .triple
            .check_elements_independent(&r.elements[0], &r.elements[1])
            .unwrap());
        // truncation preserves independence, hence multiplicativity
        for n in 1..=5u64 {
            let cap = Element::constant(r.triple.dim(), n as f64).unwrap();
            let a = r.elements[0].element().inf(&cap).unwrap();
            let b = r.elements[1].element().inf(&cap).unwrap();
            let report = r.triple.check_multiplicativity(&a, &b).unwrap();
            assert!(report.holds, "violation {:e} at coord {}", report.max_abs_err, report.worst_coord);
        }
    }
}

// ---------------------------------------------------------------------------
// distributions

proptest! {
    #[test]
    fn masses_form_a_partition_of_unity((t, x) in arb_triple_and_natural()) {
        let mut total = Element::zero(t.dim());
        for m in all_masses(&t, &x).unwrap() {
            prop_assert!(m.ge(&Element::zero(t.dim())).unwrap());
            prop_assert!(m.le(&t.unit()).unwrap());
            prop_assert!(t.in_range(&m));
            total = total.add(&m).unwrap();
        }
        prop_assert!(total.max_abs_diff(&t.unit()).unwrap() <= 1e-12);
    }

    #[test]
    fn mass_is_the_distribution_jump((t, x) in arb_triple_and_natural()) {
        for n in 0..=x.max_value() {
            let jump = cdf(&t, x.element(), n as f64)
                .unwrap()
                .sub(&cdf_left(&t, x.element(), n as f64).unwrap())
                .unwrap();
            prop_assert!(mass(&t, &x, n).unwrap().max_abs_diff(&jump).unwrap() <= 1e-14);
        }
    }

    #[test]
    fn distribution_function_is_flat_between_integers((t, x) in arb_triple_and_natural(), frac in 0.01f64..0.99) {
        for n in 0..x.max_value() {
            let at_n = cdf(&t, x.element(), n as f64).unwrap();
            let inside = cdf(&t, x.element(), n as f64 + frac).unwrap();
            prop_assert_eq!(at_n, inside);
        }
    }
}

#[test]
fn indicator_characterization_of_bernoulli_fifty_ways() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let t = random_triple(&mut rng, 8);

        // realized Bernoulli elements are band indicators with mean p
        let p_vals: Vec<f64> = (0..t.n_blocks()).map(|_| rng.gen_range(0.1..0.9)).collect();
        let p = t.from_block_values(&p_vals).unwrap();
        let (ext, lift, x) = realize_bernoulli(&t, &p).unwrap();
        assert!(x.element().values().iter().all(|&v| v == 0.0 || v == 1.0));
        let q = band_of(x.element());
        assert_eq!(&q.apply(&ext.unit()).unwrap(), x.element());
        let p_lifted = lift.apply(&p).unwrap();
        assert!(ext.expect(x.element()).unwrap().max_abs_diff(&p_lifted).unwrap() <= 1e-14);

        // conversely, any indicator with interior mean has the two-point
        // mass function of its mean
        let mask: Vec<bool> = {
            // at least one true and one false per block
            let mut m = vec![false; ext.dim()];
            for block in ext.partition() {
                m[block[0]] = true;
            }
            m
        };
        let q = BandProjection::new(mask).unwrap();
        let y = NaturalElement::new(q.apply(&ext.unit()).unwrap()).unwrap();
        let mean = ext.expect(y.element()).unwrap();
        if mean.values().iter().all(|&v| v > 0.0 && v < 1.0) {
            assert!(mass(&ext, &y, 1).unwrap().max_abs_diff(&mean).unwrap() <= 1e-14);
            assert!(mass(&ext, &y, 0)
                .unwrap()
                .max_abs_diff(&ext.unit().sub(&mean).unwrap())
                .unwrap()
                <= 1e-14);
        }
    }
}

#[test]
fn binomial_realized_as_indicator_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let base = ConditionalTriple::point();
    for n in [1usize, 2, 3, 5, 8, 10] {
        let p_val = rng.gen_range(0.15..0.85);
        let p = Element::new(vec![p_val]).unwrap();
        let r = realize_iid_family(&base, &Family::Bernoulli { p: p.clone() }, n).unwrap();
        let mut sum = r.elements[0].clone();
        for x in &r.elements[1..] {
            sum = sum.add(x).unwrap();
        }
        let p_full = Element::constant(r.triple.dim(), p_val).unwrap();
        for k in 0..=n as u64 {
            let expected = riesz_prob::distributions::family_mass(
                &r.triple,
                &Family::Binomial { n: n as u64, p: p_full.clone() },
                k,
            )
            .unwrap();
            let got = mass(&r.triple, &sum, k).unwrap();
            assert!(
                got.max_abs_diff(&expected).unwrap() <= 1e-12,
                "n = {n}, k = {k}"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// generating functions

proptest! {
    #[test]
    fn genfun_range_monotonicity_and_convexity((t, x) in arb_triple_and_natural()) {
        let g = GenFun::of_element(&t, &x).unwrap();
        let grid: Vec<f64> = (0..=10).map(|j| j as f64 / 10.0).collect();
        let evals: Vec<Element> = grid.iter().map(|&s| g.eval(s).unwrap()).collect();
        for v in &evals {
            prop_assert!(v.ge(&Element::zero(t.dim())).unwrap());
            prop_assert!(v.le(&t.unit().add(&Element::constant(t.dim(), 1e-14).unwrap()).unwrap()).unwrap());
        }
        for w in evals.windows(2) {
            prop_assert!(w[0].le(&w[1].add(&Element::constant(t.dim(), 1e-14).unwrap()).unwrap()).unwrap());
        }
        // strict increase on blocks where the element is strictly positive
        for (b, block) in t.partition().iter().enumerate() {
            let _ = b;
            if block.iter().all(|&i| x.element().get(i) > 0.0) {
                let i = block[0];
                prop_assert!(evals[0].get(i) < evals[10].get(i));
            }
        }
        // midpoint convexity on the grid
        for j in 0..=8 {
            let mid = g.eval(grid[j + 1]).unwrap();
            let avg = evals[j].add(&evals[j + 2]).unwrap().scale(0.5);
            prop_assert!(mid.le(&avg.add(&Element::constant(t.dim(), 1e-14).unwrap()).unwrap()).unwrap());
        }
        // strict convexity on blocks carrying mass above 1
        let mid = g.eval(0.5).unwrap();
        let avg = evals[0].add(&evals[10]).unwrap().scale(0.5);
        for block in t.partition() {
            if block.iter().any(|&i| x.element().get(i) >= 2.0) {
                let i = block[0];
                prop_assert!(mid.get(i) < avg.get(i));
            }
        }
    }

    #[test]
    fn taylor_expansion_recovers_evaluation((t, x) in arb_triple_and_natural(), s in 0.0f64..0.95) {
        let g = GenFun::of_element(&t, &x).unwrap();
        let mut acc = Element::zero(t.dim());
        let mut factorial = 1.0f64;
        for k in 0..=x.max_value() as u32 {
            if k > 0 {
                factorial *= k as f64;
            }
            acc = acc.add(&g.derivative(k, 0.0).unwrap().scale(s.powi(k as i32) / factorial)).unwrap();
        }
        prop_assert!(acc.max_abs_diff(&g.eval(s).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn convolution_evaluates_to_products((t, x, y) in arb_triple_and_natural_pair(), s in 0.0f64..2.0) {
        let gx = GenFun::of_element(&t, &x).unwrap();
        let gy = GenFun::of_element(&t, &y).unwrap();
        let prod = gx.product(&gy).unwrap();
        let lhs = prod.eval(s).unwrap();
        let rhs = gx.eval(s).unwrap().multiply(&gy.eval(s).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-11 * (1.0 + s.powi(x.max_value() as i32 + y.max_value() as i32)));
    }

    #[test]
    fn derivatives_match_finite_differences((t, x) in arb_triple_and_natural()) {
        let g = GenFun::of_element(&t, &x).unwrap();
        let h = 1e-5;
        for k in 1..=2u32 {
            for s in [0.1, 0.3, 0.5, 0.8] {
                let numeric = g
                    .derivative(k - 1, s + h)
                    .unwrap()
                    .sub(&g.derivative(k - 1, s - h).unwrap())
                    .unwrap()
                    .scale(1.0 / (2.0 * h));
                let exact = g.derivative(k, s).unwrap();
                prop_assert!(numeric.max_abs_diff(&exact).unwrap() <= 1e-6);
            }
        }
    }

    #[test]
    fn power_element_matches_generating_function((t, x) in arb_triple_and_natural(), s in 0.01f64..3.0) {
        let via_powers = t.expect(&power_element(s, x.element()).unwrap()).unwrap();
        let via_coeffs = GenFun::of_element(&t, &x).unwrap().eval(s).unwrap();
        let scale = 1.0 + s.powi(x.max_value() as i32);
        prop_assert!(via_powers.max_abs_diff(&via_coeffs).unwrap() <= 1e-12 * scale);
    }
}

// ---------------------------------------------------------------------------
// convergence

#[test]
fn exponential_inverse_identity_on_fifty_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let d = rng.gen_range(1..=16);
        let x = Element::new((0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
        let prod = exp_element(&x, 1e-13)
            .unwrap()
            .multiply(&exp_element(&x.neg(), 1e-13).unwrap())
            .unwrap();
        assert!(prod.max_abs_diff(&Element::unit(d)).unwrap() <= 1e-10);
    }
}

#[test]
fn poisson_mass_normalizes_through_the_exponential_series() {
    let t = ConditionalTriple::canonical();
    let g = t.from_block_values(&[0.7, 2.2]).unwrap();
    let mf = MassFunction::poisson(&t, g).unwrap();
    let level = mf.truncation_level(1e-11).unwrap();
    let mut total = Element::zero(4);
    for k in 0..=level {
        total = total.add(&mf.mass(k)).unwrap();
    }
    assert!(total.max_abs_diff(&t.unit()).unwrap() <= 1e-11);
}

#[test]
fn monotone_series_limit_from_geometric_stages() {
    // stages s_α^n π(n) with s_α increasing to s: the stage sums increase to
    // the series at s
    let t = ConditionalTriple::canonical();
    let x = NaturalElement::new(Element::new(vec![0.0, 1.0, 1.0, 2.0]).unwrap()).unwrap();
    let masses = all_masses(&t, &x).unwrap();
    let s = 0.8;
    let stages: Vec<Vec<Element>> = (1..=200u32)
        .map(|a| {
            let s_a = s * (1.0 - 1.0 / (a as f64 + 1.0));
            masses
                .iter()
                .enumerate()
                .map(|(n, m)| m.scale(s_a.powi(n as i32)))
                .collect()
        })
        .collect();
    let limits: Vec<Element> = masses
        .iter()
        .enumerate()
        .map(|(n, m)| m.scale(s.powi(n as i32)))
        .collect();
    assert!(monotone_limit_check(&stages, &limits, 0.02).unwrap());
}

#[test]
fn dominated_series_limit_with_vanishing_signs() {
    let dominator: Vec<Element> = (0..8).map(|n| Element::constant(2, 1.0 / (1 << n) as f64).unwrap()).collect();
    let limits = vec![Element::zero(2); 8];
    let stages: Vec<Vec<Element>> = (1..=120u32)
        .map(|a| {
            dominator
                .iter()
                .map(|d| d.scale((1.0 / a as f64).sin() * if a % 2 == 0 { 1.0 } else { -1.0 }))
                .collect()
        })
        .collect();
    assert!(dominated_limit_check(&stages, &limits, &dominator, 0.05).unwrap());
}

#[test]
fn double_series_of_mass_products_sums_in_any_order() {
    let t = ConditionalTriple::canonical();
    let n = NaturalElement::new(Element::new(vec![0.0, 1.0, 2.0, 1.0]).unwrap()).unwrap();
    let x = NaturalElement::new(Element::new(vec![1.0, 0.0, 1.0, 2.0]).unwrap()).unwrap();
    let mn = all_masses(&t, &n).unwrap();
    let mx = all_masses(&t, &x).unwrap();
    let rows: Vec<Vec<Element>> = mn
        .iter()
        .map(|a| mx.iter().map(|b| a.multiply(b).unwrap()).collect())
        .collect();
    assert!(fubini_check(&rows, 1e-12).unwrap());
}

#[test]
fn scaled_parameter_power_limit() {
    // x_n = (1 − 1/n)·g converges to g, so (e + x_n/n)^n approaches exp(g)
    let t = ConditionalTriple::canonical();
    let g = t.from_block_values(&[0.5, 1.5]).unwrap();
    let g_for_rule = g.clone();
    let seq = ElementSequence::from_rule(4, move |idx| {
        g_for_rule.scale(1.0 - 1.0 / (idx + 1) as f64)
    });
    let report = power_limit_check(&seq, &g, 0.05, 3000).unwrap();
    assert!(report.converged);
}

// ---------------------------------------------------------------------------
// serialization round trips

proptest! {
    #[test]
    fn element_json_round_trip(vals in vec(-1e6f64..1e6, 1..20)) {
        let x = Element::new(vals).unwrap();
        let json = serde_json::to_string(&x).unwrap();
        let back: Element = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn triple_json_round_trip(t in arb_triple(10)) {
        let json = serde_json::to_string(&t).unwrap();
        let back: ConditionalTriple = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, t);
    }
}

// ---------------------------------------------------------------------------
// shared helpers

fn random_triple(rng: &mut ChaCha8Rng, max_dim: usize) -> ConditionalTriple {
    let d = rng.gen_range(1..=max_dim);
    let weights: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
    let mut idx: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    let mut partition = Vec::new();
    let mut start = 0;
    while start < d {
        let size = rng.gen_range(1..=(d - start).min(5));
        partition.push(idx[start..start + size].to_vec());
        start += size;
    }
    ConditionalTriple::new(weights, partition).unwrap()
}
