//! Verification front end: the randomized oracle-equivalence suite and the
//! acceptance criteria it feeds into.

pub(crate) mod gen;

mod criteria;
mod suite;

pub use criteria::{run_all, AcceptanceConfig, CriterionReport};
pub use criteria::{
    criterion_1, criterion_10, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
    criterion_7, criterion_8, criterion_9,
};
pub use suite::{equivalence_suite, equivalence_suite_seq, InstanceOutcome, SuiteConfig, SuiteReport};
