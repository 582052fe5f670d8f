//! Answer-set existence for normal programs.
//!
//! Tight programs go through their completion and the SAT dynamic program.
//! General normal programs use a dynamic program whose rows additionally
//! carry a strict order over the bag's true atoms and a "proven" flag per
//! true atom. A stored order only ever ranks atoms of the current bag.
//!
//! Stability follows the Gelfond-Lifschitz reduct: `M` is an answer set iff
//! it is the least model of `P^M` and violates no integrity constraint.
//! This DP decides existence only; its rows do not correspond one-to-one to
//! answer sets, so no counting entry point is offered.

mod completion;
mod normal;
mod oracle;

use thiserror::Error;

use crate::dp::DpError;

pub use completion::{clark_completion, solve_tight_asp, Completion};
pub use normal::{
    decompose_program, solve_normal_asp, solve_normal_asp_with_stats, solve_normal_with_heuristic, AspRow, ASP_MAX_BAG,
};
pub use oracle::{enumerate_answer_sets, enumerate_answer_sets_limited, StableModels, ASP_ORACLE_MAX_ATOMS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AspError {
    #[error("program is not tight: its positive dependency graph has a cycle")]
    NotTight,
    #[error("decomposition does not match the program: {0}")]
    DecompositionMismatch(String),
    #[error("bag of {size} atoms exceeds the supported maximum of {limit}")]
    BagTooLarge { size: usize, limit: usize },
    #[error("{atoms} atoms exceed the enumeration guard of {limit}")]
    TooLargeForOracle { atoms: usize, limit: usize },
}

impl From<DpError> for AspError {
    fn from(e: DpError) -> Self {
        match e {
            DpError::DecompositionMismatch(m) => AspError::DecompositionMismatch(m),
            DpError::BagTooLarge(size) => AspError::BagTooLarge { size, limit: 63 },
            DpError::TooLargeForOracle { vars, limit } => AspError::TooLargeForOracle { atoms: vars, limit },
        }
    }
}
