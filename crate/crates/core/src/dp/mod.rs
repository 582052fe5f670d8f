//! Dynamic programming over nice tree decompositions for SAT and #SAT.
//!
//! Tables are keyed by bag assignments packed into a `u64`, bit `i` holding
//! the value of the `i`-th smallest vertex of the bag.

mod oracle;
mod sat;

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::td::ValidationReport;

pub use oracle::{brute_force_count, ORACLE_MAX_VARS};
pub use sat::{
    count_models, count_models_with_stats, count_with_heuristic, decompose_formula, row_values, solve_sat,
    solve_with_heuristic, NoHook, RowHook, SatDp,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("decomposition does not match the instance: {0}")]
    DecompositionMismatch(String),
    #[error("bag of {0} vertices exceeds the supported maximum of 63")]
    BagTooLarge(usize),
    #[error("{vars} variables exceed the enumeration guard of {limit}")]
    TooLargeForOracle { vars: usize, limit: usize },
}

impl DpError {
    pub(crate) fn mismatch(report: &ValidationReport) -> Self {
        DpError::DecompositionMismatch(report.to_string())
    }
}

/// Values stored per table row: model counts or plain presence.
pub trait RowValue: Clone + fmt::Debug {
    fn one() -> Self;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
}

impl RowValue for BigUint {
    fn one() -> Self {
        One::one()
    }

    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// Set semantics: a row is either stored or not.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Presence;

impl RowValue for Presence {
    fn one() -> Self {
        Presence
    }

    fn add_assign(&mut self, _: &Self) {}

    fn mul(&self, _: &Self) -> Self {
        Presence
    }
}

/// Per-node table sizes of one DP run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DpStats {
    /// `(bag size, stored rows)` for every node, in node order.
    pub tables: Vec<(usize, usize)>,
}

impl DpStats {
    pub fn max_rows(&self) -> usize {
        self.tables.iter().map(|&(_, rows)| rows).max().unwrap_or(0)
    }

    pub fn total_rows(&self) -> usize {
        self.tables.iter().map(|&(_, rows)| rows).sum()
    }
}

/// Inserts `bit` at position `at`, shifting higher positions up.
pub(crate) fn insert_bit(word: u64, at: usize, bit: bool) -> u64 {
    let low = word & ((1u64 << at) - 1);
    let high = (word >> at) << (at + 1);
    high | ((bit as u64) << at) | low
}

/// Removes position `at`, shifting higher positions down.
pub(crate) fn remove_bit(word: u64, at: usize) -> u64 {
    let low = word & ((1u64 << at) - 1);
    let high = (word >> (at + 1)) << at;
    high | low
}

pub(crate) fn bit(word: u64, at: usize) -> bool {
    (word >> at) & 1 == 1
}
