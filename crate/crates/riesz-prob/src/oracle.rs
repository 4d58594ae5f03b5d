//! Independent classical ground truth: a triple reinterpreted as a finite
//! probability space with a partition σ-algebra, where every quantity is
//! recomputed by direct enumeration (plus optional seeded Monte Carlo for
//! scale demonstrations).
//!
//! Nothing here goes through the lattice machinery: conditional
//! expectations, probabilities, pushforward pmfs, tails, and moments are all
//! textbook formulas over the normalized outcome weights. Elements appear
//! only as the output currency. Enumeration is the arbiter in every
//! equivalence test; Monte Carlo is never used as one.

use crate::conditional::ConditionalTriple;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::par;

/// A finite probability space with a σ-algebra generated by a partition of
/// the outcomes.
#[derive(Debug, Clone)]
pub struct FiniteProbSpace {
    probs: Vec<f64>,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    block_prob: Vec<f64>,
}

impl FiniteProbSpace {
    /// Normalizes the triple's weights into outcome probabilities; the
    /// partition becomes the conditioning σ-algebra.
    pub fn from_triple(triple: &ConditionalTriple) -> Self {
        let total: f64 = triple.weights().iter().sum();
        let probs: Vec<f64> = triple.weights().iter().map(|w| w / total).collect();
        let blocks: Vec<Vec<usize>> = triple.partition().to_vec();
        let mut block_of = vec![0usize; probs.len()];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                block_of[i] = b;
            }
        }
        let block_prob = blocks
            .iter()
            .map(|block| block.iter().map(|&i| probs[i]).sum())
            .collect();
        Self {
            probs,
            blocks,
            block_of,
            block_prob,
        }
    }

    pub fn outcomes(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn check_rv(&self, rv: &[f64]) -> Result<()> {
        if rv.len() != self.outcomes() {
            return Err(Error::DimensionMismatch {
                expected: self.outcomes(),
                found: rv.len(),
            });
        }
        Ok(())
    }

    fn broadcast(&self, per_block: &[f64]) -> Element {
        let mut out = vec![0.0; self.outcomes()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                out[i] = per_block[b];
            }
        }
        Element::from_vec_unchecked(out)
    }

    /// Unconditional probability of an event given by outcome indices.
    pub fn prob(&self, event: &[usize]) -> Result<f64> {
        let mut seen = vec![false; self.outcomes()];
        let mut p = 0.0;
        for &i in event {
            if i >= self.outcomes() {
                return Err(Error::InvalidArgument(format!(
                    "event references outcome {i} but there are {}",
                    self.outcomes()
                )));
            }
            if !seen[i] {
                seen[i] = true;
                p += self.probs[i];
            }
        }
        Ok(p)
    }

    /// Conditional probability of an event given the σ-algebra, broadcast to
    /// an element.
    pub fn cond_prob(&self, event: &[bool]) -> Result<Element> {
        if event.len() != self.outcomes() {
            return Err(Error::DimensionMismatch {
                expected: self.outcomes(),
                found: event.len(),
            });
        }
        let per_block: Vec<f64> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, block)| {
                block
                    .iter()
                    .filter(|&&i| event[i])
                    .map(|&i| self.probs[i])
                    .sum::<f64>()
                    / self.block_prob[b]
            })
            .collect();
        Ok(self.broadcast(&per_block))
    }

    /// Textbook conditional expectation of a random variable given the
    /// σ-algebra.
    pub fn cond_expect(&self, rv: &[f64]) -> Result<Element> {
        self.check_rv(rv)?;
        let per_block: Vec<f64> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, block)| {
                block
                    .iter()
                    .map(|&i| self.probs[i] * rv[i])
                    .sum::<f64>()
                    / self.block_prob[b]
            })
            .collect();
        Ok(self.broadcast(&per_block))
    }

    /// Conditional probability that the random variable equals `value`.
    pub fn cond_pmf_at(&self, rv: &[f64], value: f64) -> Result<Element> {
        self.check_rv(rv)?;
        let event: Vec<bool> = rv.iter().map(|&v| v == value).collect();
        self.cond_prob(&event)
    }

    /// Conditional tail probability `P(rv ≥ threshold | block)` (or strict,
    /// or the mirrored `≤`).
    pub fn cond_tail(&self, rv: &[f64], threshold: f64, strict: bool, upper: bool) -> Result<Element> {
        self.check_rv(rv)?;
        let event: Vec<bool> = rv
            .iter()
            .map(|&v| match (upper, strict) {
                (true, true) => v > threshold,
                (true, false) => v >= threshold,
                (false, true) => v < threshold,
                (false, false) => v <= threshold,
            })
            .collect();
        self.cond_prob(&event)
    }

    /// Conditional raw moment `E[rv^p | block]`.
    pub fn cond_moment(&self, rv: &[f64], p: u32) -> Result<Element> {
        let powered: Vec<f64> = rv.iter().map(|&v| v.powi(p as i32)).collect();
        self.cond_expect(&powered)
    }

    /// Conditional variance.
    pub fn cond_variance(&self, rv: &[f64]) -> Result<Element> {
        let mean = self.cond_expect(rv)?;
        let second = self.cond_moment(rv, 2)?;
        second.sub(&mean.multiply(&mean)?)
    }

    /// Conditional expectation of `s^rv`.
    pub fn cond_power_mean(&self, rv: &[f64], s: f64) -> Result<Element> {
        let powered: Vec<f64> = rv
            .iter()
            .map(|&v| {
                if s == 0.0 {
                    if v == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    s.powf(v)
                }
            })
            .collect();
        self.cond_expect(&powered)
    }

    /// Conditional falling-factorial mean `E[rv(rv−1)···(rv−n+1) | block]`.
    pub fn cond_falling_factorial(&self, rv: &[f64], n: u32) -> Result<Element> {
        let transformed: Vec<f64> = rv
            .iter()
            .map(|&v| (0..n).map(|j| v - j as f64).product())
            .collect();
        self.cond_expect(&transformed)
    }

    /// Monte Carlo estimate of the conditional expectation, with standard
    /// errors. Counter-based per-sample randomness: the result depends only
    /// on `(seed, samples)`, not on how the work is split across threads.
    pub fn simulate(&self, rv: &[f64], samples: u64, seed: u64) -> Result<SimulationEstimate> {
        self.simulate_impl(rv, samples, seed, false)
    }

    /// Sequential variant of [`FiniteProbSpace::simulate`] for comparison
    /// runs; bitwise-identical output.
    pub fn simulate_seq(&self, rv: &[f64], samples: u64, seed: u64) -> Result<SimulationEstimate> {
        self.simulate_impl(rv, samples, seed, true)
    }

    fn simulate_impl(
        &self,
        rv: &[f64],
        samples: u64,
        seed: u64,
        force_seq: bool,
    ) -> Result<SimulationEstimate> {
        self.check_rv(rv)?;
        if samples == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        // cumulative distribution for inversion sampling
        let mut cum = Vec::with_capacity(self.outcomes());
        let mut acc = 0.0;
        for &p in &self.probs {
            acc += p;
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = 1.0;

        const CHUNK: u64 = 8192;
        let n_chunks = samples.div_ceil(CHUNK) as usize;
        let n_blocks = self.blocks.len();
        let run_chunk = |c: usize| -> Vec<(u64, f64, f64)> {
            let lo = c as u64 * CHUNK;
            let hi = (lo + CHUNK).min(samples);
            let mut acc = vec![(0u64, 0.0f64, 0.0f64); n_blocks];
            for i in lo..hi {
                let u = sample_u01(seed, i);
                let outcome = cum.partition_point(|&c| c <= u).min(self.outcomes() - 1);
                let b = self.block_of[outcome];
                let v = rv[outcome];
                acc[b].0 += 1;
                acc[b].1 += v;
                acc[b].2 += v * v;
            }
            acc
        };
        // chunk boundaries are fixed, and chunk results are folded in index
        // order, so worker count cannot change the result
        let per_chunk: Vec<Vec<(u64, f64, f64)>> = if force_seq {
            par::with_sequential(|| par::map_indexed(n_chunks, run_chunk))
        } else {
            par::map_indexed(n_chunks, run_chunk)
        };
        let mut totals = vec![(0u64, 0.0f64, 0.0f64); n_blocks];
        for chunk in per_chunk {
            for (b, (n, s, s2)) in chunk.into_iter().enumerate() {
                totals[b].0 += n;
                totals[b].1 += s;
                totals[b].2 += s2;
            }
        }

        let mut mean = vec![0.0; n_blocks];
        let mut se = vec![0.0; n_blocks];
        for (b, &(n, s, s2)) in totals.iter().enumerate() {
            if n == 0 {
                // a block missed by every sample: flag with a huge error bar
                mean[b] = 0.0;
                se[b] = f64::MAX;
                continue;
            }
            let nf = n as f64;
            mean[b] = s / nf;
            let var = if n > 1 {
                ((s2 - s * s / nf) / (nf - 1.0)).max(0.0)
            } else {
                0.0
            };
            se[b] = (var / nf).sqrt();
        }
        Ok(SimulationEstimate {
            mean: self.broadcast(&mean),
            std_error: self.broadcast(&se),
            counts: totals.iter().map(|t| t.0).collect(),
            samples,
            seed,
        })
    }
}

/// Outcome of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationEstimate {
    pub mean: Element,
    pub std_error: Element,
    /// Samples that landed in each block.
    pub counts: Vec<u64>,
    pub samples: u64,
    pub seed: u64,
}

impl SimulationEstimate {
    /// Whether the estimate lies within `k` standard errors of `exact`,
    /// componentwise. Excursions are expected at the normal-tail rate and
    /// should be flagged, not failed.
    pub fn within_k_se(&self, exact: &Element, k: f64) -> Result<bool> {
        let diff = self.mean.sub(exact)?.abs();
        Ok(diff
            .values()
            .iter()
            .zip(self.std_error.values())
            .all(|(&d, &s)| d <= k * s + 1e-12))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in [0, 1) from a (seed, counter) pair.
fn sample_u01(seed: u64, counter: u64) -> f64 {
    let h = splitmix64(seed ^ splitmix64(counter.wrapping_add(0xA076_1D64_78BD_642F)));
    (h >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}
