//! Treewidth-guided solving: tree decompositions of primal graphs, dynamic
//! programming for SAT, #SAT and answer-set existence, a decomposition-guided
//! reduction from normal programs to SAT, and a hybrid solver for instances
//! whose width is too large for plain dynamic programming.

pub mod asp;
pub mod dg;
pub mod dp;
pub mod hybrid;
pub mod model;
pub mod td;

pub use model::{Clause, CnfFormula, Lit, ParseError, PrimalGraph, Program, Rule, Var};
pub use td::{decompose, make_nice, validate, Heuristic, NiceTreeDecomposition, TreeDecomposition};
