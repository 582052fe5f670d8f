//! Decomposition-guided reductions.
//!
//! A reduction is driven node by node over a rooted tree decomposition of the
//! source instance. At every node an encoder emits clauses together with the
//! output bag that holds all of their variables; the output bags, placed on
//! the same tree, form a decomposition of the produced formula. Bag `t` of the
//! output depends only on `t`, its input bag and its children.

mod asp;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Clause, CnfFormula, Lit, PrimalGraph, Var};
use crate::td::{validate, RootedTree, TreeDecomposition, ValidationReport};

pub use asp::{reduce_asp_to_sat, reduce_asp_to_sat_with, AspLevelEncoder, AspSupportEncoder};

/// Frozen constant of the width certificate: every output bag satisfies
/// `|bag'| <= DG_WIDTH_CONSTANT * |bag| * (bits + 1)` when the input is a nice
/// decomposition. Measured at 10 on random programs (at most 10 atoms and 15
/// rules). Arbitrary decompositions can exceed it: a node collects one
/// relabeling table per child and one body variable per attached rule.
pub const DG_WIDTH_CONSTANT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DgError {
    #[error("input decomposition is invalid: {0}")]
    InvalidInputDecomposition(ValidationReport),
}

/// Identifies a variable shared between neighbouring node encodings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarKey {
    pub node: usize,
    pub role: u8,
    pub index: usize,
    pub bit: usize,
}

/// Hands out output variables. Variables `0..base` are reserved for the
/// source instance's own variables; keyed variables are created on first use.
#[derive(Clone, Debug)]
pub struct VarPool {
    keyed: HashMap<VarKey, usize>,
    next: usize,
}

impl VarPool {
    pub fn new(base: usize) -> Self {
        VarPool {
            keyed: HashMap::new(),
            next: base,
        }
    }

    pub fn var(&mut self, key: VarKey) -> usize {
        let next = &mut self.next;
        *self.keyed.entry(key).or_insert_with(|| {
            *next += 1;
            *next - 1
        })
    }

    pub fn fresh(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }

    pub fn len(&self) -> usize {
        self.next
    }

    pub fn is_empty(&self) -> bool {
        self.next == 0
    }
}

/// What an encoder sees of one node.
pub struct NodeView<'a> {
    pub id: usize,
    /// Sorted input bag.
    pub bag: &'a [usize],
    pub parent: Option<usize>,
    pub children: &'a [usize],
    /// Sorted input bags of all nodes.
    pub bags: &'a [Vec<usize>],
}

impl NodeView<'_> {
    /// Whether no ancestor's bag contains `v` (the node is `v`'s topmost).
    pub fn is_top(&self, v: usize) -> bool {
        self.parent.map_or(true, |p| self.bags[p].binary_search(&v).is_err())
    }

    /// Vertices shared with child `c`.
    pub fn shared_with(&self, c: usize) -> Vec<usize> {
        self.bags[c]
            .iter()
            .copied()
            .filter(|v| self.bag.binary_search(v).is_ok())
            .collect()
    }
}

/// Local clauses of one node and the output bag containing their variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeEncoderOutput {
    pub clauses: Vec<Clause>,
    pub output_bag: Vec<usize>,
    /// Counter bits per atom used at this node (0 when no counters are used).
    pub bits: usize,
}

/// Per-node step of a decomposition-guided reduction.
pub trait NodeEncoder {
    fn encode(&mut self, node: &NodeView<'_>, vars: &mut VarPool) -> NodeEncoderOutput;
}

/// Runs `encoder` bottom-up over `tree` and assembles formula and output decomposition.
///
/// Panics if an encoder emits a clause whose variables are not all in its output bag.
pub fn run_guided<E: NodeEncoder>(
    tree: &RootedTree,
    bags: &[Vec<usize>],
    base_vars: usize,
    encoder: &mut E,
) -> (CnfFormula, TreeDecomposition, Vec<WidthRow>) {
    let mut pool = VarPool::new(base_vars);
    let mut outputs: Vec<NodeEncoderOutput> = vec![NodeEncoderOutput::default(); bags.len()];
    for &t in &tree.postorder {
        let view = NodeView {
            id: t,
            bag: &bags[t],
            parent: tree.parent[t],
            children: &tree.children[t],
            bags,
        };
        let mut out = encoder.encode(&view, &mut pool);
        out.output_bag.sort_unstable();
        out.output_bag.dedup();
        for clause in &out.clauses {
            assert!(
                clause.iter().all(|l| out.output_bag.binary_search(&l.var().index()).is_ok()),
                "node {t}: clause {clause:?} leaves its output bag"
            );
        }
        outputs[t] = out;
    }

    let mut formula = CnfFormula::new(pool.len());
    let mut rows = Vec::with_capacity(bags.len());
    for (t, out) in outputs.iter().enumerate() {
        for clause in &out.clauses {
            formula.add_clause(clause.iter().copied());
        }
        rows.push(WidthRow {
            node: t + 1,
            input_bag_size: bags[t].len(),
            output_bag_size: out.output_bag.len(),
            bits: out.bits,
        });
    }
    let edges = tree
        .parent
        .iter()
        .enumerate()
        .filter_map(|(t, p)| p.map(|p| (t, p)))
        .collect();
    let output_td = TreeDecomposition::new(
        pool.len(),
        outputs.into_iter().map(|o| o.output_bag).collect(),
        edges,
        tree.root,
    );
    (formula, output_td, rows)
}

/// One line of the width report; `node` is 1-based like the `.td` format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WidthRow {
    pub node: usize,
    pub input_bag_size: usize,
    pub output_bag_size: usize,
    pub bits: usize,
}

impl WidthRow {
    pub fn bound(&self, c: usize) -> usize {
        c * self.input_bag_size * (self.bits + 1)
    }

    pub fn holds(&self, c: usize) -> bool {
        self.output_bag_size <= self.bound(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WidthCertificate {
    pub input_width: isize,
    pub output_width: isize,
    /// Largest counter width used at any node.
    pub bits_per_atom: usize,
    pub constant: usize,
    pub bound_holds: bool,
}

impl WidthCertificate {
    pub fn from_rows(rows: &[WidthRow], c: usize) -> Self {
        let max_in = rows.iter().map(|r| r.input_bag_size).max().unwrap_or(0);
        let max_out = rows.iter().map(|r| r.output_bag_size).max().unwrap_or(0);
        let bits = rows.iter().map(|r| r.bits).max().unwrap_or(0);
        WidthCertificate {
            input_width: max_in as isize - 1,
            output_width: max_out as isize - 1,
            bits_per_atom: bits,
            constant: c,
            bound_holds: rows.iter().all(|r| r.holds(c)),
        }
    }

    pub fn bound_text(&self) -> String {
        format!(
            "per node |bag'| <= {} * |bag| * (bits + 1); k' + 1 <= {} * (k + 1) * (b + 1)",
            self.constant, self.constant
        )
    }
}

impl fmt::Display for WidthCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} k'={} b={} c={} holds={}",
            self.input_width, self.output_width, self.bits_per_atom, self.constant, self.bound_holds
        )
    }
}

/// A reduced formula together with its guided decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgReductionOutput {
    pub formula: CnfFormula,
    pub output_td: TreeDecomposition,
    pub rows: Vec<WidthRow>,
    pub certificate: WidthCertificate,
}

/// Outcome of [`verify_guided`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GuidanceReport {
    pub validation: ValidationReport,
    /// 1-based nodes whose output bag exceeds the certificate bound.
    pub width_violations: Vec<usize>,
    pub tree_mismatch: bool,
}

impl GuidanceReport {
    pub fn is_ok(&self) -> bool {
        self.validation.is_valid() && self.width_violations.is_empty() && !self.tree_mismatch
    }
}

impl fmt::Display for GuidanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let mut parts = Vec::new();
        if !self.validation.is_valid() {
            parts.push(self.validation.to_string());
        }
        if !self.width_violations.is_empty() {
            let nodes: Vec<String> = self.width_violations.iter().map(ToString::to_string).collect();
            parts.push(format!("width bound exceeded at bags {}", nodes.join(",")));
        }
        if self.tree_mismatch {
            parts.push("report and decomposition disagree on the node count".into());
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Re-validates the output decomposition against the formula's primal graph
/// and re-checks the width bound with the bag sizes actually present.
pub fn verify_guided(output: &DgReductionOutput) -> GuidanceReport {
    let graph = PrimalGraph::of_cnf(&output.formula);
    let validation = validate(&output.output_td, &graph);
    let td = &output.output_td;
    let tree_mismatch = td.node_count() != output.rows.len();
    let c = output.certificate.constant;
    let width_violations = output
        .rows
        .iter()
        .filter(|row| {
            let actual = td.sorted_bag(row.node - 1).len();
            let checked = WidthRow {
                output_bag_size: actual,
                ..**row
            };
            row.node - 1 >= td.node_count() || !checked.holds(c)
        })
        .map(|row| row.node)
        .collect();
    GuidanceReport {
        validation,
        width_violations,
        tree_mismatch,
    }
}

/// Literals stating that the `bits`-bit number on `vars` differs from `value`.
pub(crate) fn differs_from(vars: &[usize], value: usize) -> impl Iterator<Item = Lit> + '_ {
    vars.iter()
        .enumerate()
        .map(move |(j, &v)| Lit::new(Var::from_index(v), value >> j & 1 == 1))
}

pub(crate) fn lit(v: usize, positive: bool) -> Lit {
    Lit::new(Var::from_index(v), !positive)
}
