//! Discrete probability in finite-dimensional vector lattices.
//!
//! This crate builds a concrete, fully computable model of measure-free
//! discrete probability. The ambient structure is a triple `(E, e, T)`:
//!
//! - `E` is `R^d` with the componentwise order (a Dedekind complete Riesz
//!   space), with componentwise multiplication making the ideal of `e` an
//!   f-algebra;
//! - `e` is the all-ones tuple, a weak order unit;
//! - `T` is a strictly positive order-continuous projection with `Te = e`,
//!   realized as weighted averaging over a partition of the coordinates —
//!   a conditional expectation onto the block-constant elements.
//!
//! On this structure the crate implements natural (integer-valued) elements
//! and their mass functions `π_x(n) = T(P_{x=ne} e)`, named families
//! (Bernoulli, Binomial, Poisson), generating functions
//! `g_x(s) = Σ sⁿ π_x(n) = T(s^x)` with derivatives and factorial moments,
//! products over independent summands, compound (randomly indexed) sums with
//! their mean and variance identities, tail bounds derived from generating
//! functions, and order-convergence checks including the Binomial-to-Poisson
//! approximation with a certified error threshold.
//!
//! Everything is verifiable against [`oracle`], an independent classical
//! interpretation of the same data as a finite probability space where each
//! quantity is recomputed by direct enumeration. The [`verify`] module wires
//! the two sides together: a randomized equivalence suite plus the named
//! acceptance criteria used by the test suite and the CLI.
//!
//! Values are immutable and every operation is a pure function, so the whole
//! API can be used concurrently without synchronization. The heavy sweeps
//! (the equivalence suite, the approximation experiments, Monte Carlo) run
//! data-parallel under the `parallel` feature (enabled by default) and fall
//! back to sequential execution without it; either way results are bitwise
//! identical.
//!
//! # Quick example
//!
//! ```rust
//! use riesz_prob::{ConditionalTriple, Element, GenFun, NaturalElement};
//!
//! // four outcomes, two conditioning blocks
//! let t = ConditionalTriple::canonical();
//! let x = NaturalElement::new(Element::new(vec![0.0, 1.0, 1.0, 2.0]).unwrap()).unwrap();
//!
//! // conditional expectation is block averaging
//! assert_eq!(
//!     t.expect(x.element()).unwrap(),
//!     Element::new(vec![0.5, 0.5, 1.5, 1.5]).unwrap()
//! );
//!
//! // the generating function evaluates through the coefficient sum
//! let g = GenFun::of_element(&t, &x).unwrap();
//! assert_eq!(
//!     g.eval(0.5).unwrap(),
//!     Element::new(vec![0.75, 0.75, 0.375, 0.375]).unwrap()
//! );
//! ```

#![forbid(unsafe_code)]
// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod calculus;
pub mod conditional;
pub mod convergence;
pub mod distributions;
pub mod element;
mod error;
pub mod genfun;
pub mod oracle;
mod par;
pub mod verify;

pub use bounds::{TailBoundReport, TailMode};
pub use calculus::{SpectralSystem, StepFunction, StepPiece};
pub use conditional::{ConditionalTriple, Lift};
pub use distributions::{Family, MassFunction, NaturalElement};
pub use element::{band_of, proj_eq, proj_geq, proj_gt, BandProjection, Element};
pub use error::{Error, Result};
pub use genfun::{ClosedForm, GenFun};
pub use oracle::FiniteProbSpace;
