//! Seeded random instance generation for the verification suites. Every
//! generator draws from a counter-derived ChaCha stream so instance `i` is
//! the same regardless of how many workers run the sweep.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conditional::ConditionalTriple;
use crate::distributions::{MassFunction, NaturalElement};
use crate::element::Element;

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub(crate) fn random_triple(rng: &mut impl Rng, max_dim: usize) -> ConditionalTriple {
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
        let size = rng.gen_range(1..=(d - start).min(8));
        partition.push(idx[start..start + size].to_vec());
        start += size;
    }
    ConditionalTriple::new(weights, partition).expect("generated triple is valid")
}

pub(crate) fn random_natural(
    rng: &mut impl Rng,
    triple: &ConditionalTriple,
    max_value: u64,
) -> NaturalElement {
    let values: Vec<f64> = (0..triple.dim())
        .map(|_| rng.gen_range(0..=max_value) as f64)
        .collect();
    NaturalElement::new(Element::new(values).expect("finite")).expect("integral")
}

pub(crate) fn random_real_element(rng: &mut impl Rng, dim: usize) -> Element {
    Element::new((0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()).expect("finite")
}

pub(crate) fn random_block_constant(
    rng: &mut impl Rng,
    triple: &ConditionalTriple,
    lo: f64,
    hi: f64,
) -> Element {
    let vals: Vec<f64> = (0..triple.n_blocks()).map(|_| rng.gen_range(lo..hi)).collect();
    triple.from_block_values(&vals).expect("block counts match")
}

/// A finitely supported mass function with strictly positive block-constant
/// coefficients on `{0, ..., support_size − 1}`.
pub(crate) fn random_prob_mass(
    rng: &mut impl Rng,
    triple: &ConditionalTriple,
    support_size: usize,
) -> MassFunction {
    let mut per_block: Vec<Vec<f64>> = Vec::with_capacity(triple.n_blocks());
    for _ in 0..triple.n_blocks() {
        let raw: Vec<f64> = (0..support_size).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        per_block.push(raw.into_iter().map(|v| v / total).collect());
    }
    let coeffs: Vec<Element> = (0..support_size)
        .map(|k| {
            let vals: Vec<f64> = (0..triple.n_blocks()).map(|b| per_block[b][k]).collect();
            triple.from_block_values(&vals).expect("block counts match")
        })
        .collect();
    MassFunction::finite(triple, coeffs).expect("normalized coefficients are a mass function")
}
