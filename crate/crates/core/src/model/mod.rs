//! Instance representations: CNF formulas, normal logic programs and their
//! primal graphs, together with the DIMACS, ASP and PACE `.gr` text formats.

mod cnf;
mod error;
mod graph;
mod program;
mod var;

pub use cnf::{Clause, CnfFormula};
pub use error::ParseError;
pub use graph::PrimalGraph;
pub(crate) use graph::{parse_count, parse_vertex};
pub use program::{Program, Rule, TightnessReport};
pub use var::{Lit, Var};
