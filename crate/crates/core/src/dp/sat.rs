use std::collections::HashMap;
use std::convert::Infallible;

use num_bigint::BigUint;
use num_traits::Zero;

use super::{bit, insert_bit, remove_bit, DpError, DpStats, Presence, RowValue};
use crate::model::{Clause, CnfFormula, PrimalGraph};
use crate::td::{decompose_vertices, make_nice, validate_covering, Heuristic, NiceKind, NiceTreeDecomposition};

/// Extra per-row work at selected nodes, run after the node's clauses are checked.
pub trait RowHook<V> {
    type Error;

    fn applies(&self, node: usize) -> bool;

    /// Multiplier for the row; `None` drops it.
    fn factor(&mut self, node: usize, bag: &[usize], assignment: u64) -> Result<Option<V>, Self::Error>;
}

pub struct NoHook;

impl<V> RowHook<V> for NoHook {
    type Error = Infallible;

    fn applies(&self, _: usize) -> bool {
        false
    }

    fn factor(&mut self, _: usize, _: &[usize], _: u64) -> Result<Option<V>, Infallible> {
        unreachable!("NoHook applies nowhere")
    }
}

/// Clause checks compiled against a nice decomposition.
///
/// Each clause is checked once, at the shallowest node whose bag holds all of
/// its variables (smallest id on ties).
pub struct SatDp<'a> {
    ntd: &'a NiceTreeDecomposition,
    /// Per node: `(positive mask, negative mask)` over bag positions.
    checks: Vec<Vec<(u64, u64)>>,
}

impl<'a> SatDp<'a> {
    pub fn new(clauses: &[Clause], ntd: &'a NiceTreeDecomposition) -> Result<Self, DpError> {
        if ntd.max_bag_size() > 63 {
            return Err(DpError::BagTooLarge(ntd.max_bag_size()));
        }
        let sets: Vec<Vec<usize>> = clauses
            .iter()
            .map(|c| {
                let mut s: Vec<usize> = c.iter().map(|l| l.var().index()).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let attach = ntd.attachment_nodes(&sets).map_err(|i| {
            DpError::DecompositionMismatch(format!("clause {} is not covered by any bag", i + 1))
        })?;
        let mut checks = vec![Vec::new(); ntd.node_count()];
        for (clause, &t) in clauses.iter().zip(&attach) {
            let bag = &ntd.node(t).bag;
            let (mut pos, mut neg) = (0u64, 0u64);
            for lit in clause {
                let at = bag.binary_search(&lit.var().index()).expect("attached bag covers clause");
                if lit.is_negated() {
                    neg |= 1 << at;
                } else {
                    pos |= 1 << at;
                }
            }
            checks[t].push((pos, neg));
        }
        Ok(SatDp { ntd, checks })
    }

    /// Runs the bottom-up pass and returns the value of the root's empty row,
    /// or `None` once some table runs empty.
    pub fn run<V, H>(&self, hook: &mut H, mut stats: Option<&mut DpStats>) -> Result<Option<V>, H::Error>
    where
        V: RowValue,
        H: RowHook<V>,
    {
        let ntd = self.ntd;
        let mut tables: Vec<Option<HashMap<u64, V>>> = (0..ntd.node_count()).map(|_| None).collect();
        for id in 0..ntd.node_count() {
            let node = ntd.node(id);
            let mut table: HashMap<u64, V> = match node.kind {
                NiceKind::Leaf => HashMap::from([(0, V::one())]),
                NiceKind::Introduce(v) => {
                    let child = tables[node.children[0]].take().expect("child computed");
                    let at = node.bag.binary_search(&v).expect("introduced vertex in bag");
                    let mut out = HashMap::with_capacity(child.len() * 2);
                    for (a, val) in child {
                        out.insert(insert_bit(a, at, false), val.clone());
                        out.insert(insert_bit(a, at, true), val);
                    }
                    out
                }
                NiceKind::Forget(v) => {
                    let child_id = node.children[0];
                    let child = tables[child_id].take().expect("child computed");
                    let at = ntd.node(child_id).bag.binary_search(&v).expect("forgotten vertex in child");
                    let mut out: HashMap<u64, V> = HashMap::with_capacity(child.len());
                    for (a, val) in child {
                        match out.entry(remove_bit(a, at)) {
                            std::collections::hash_map::Entry::Occupied(mut e) => e.get_mut().add_assign(&val),
                            std::collections::hash_map::Entry::Vacant(e) => {
                                e.insert(val);
                            }
                        }
                    }
                    out
                }
                NiceKind::Join => {
                    let left = tables[node.children[0]].take().expect("child computed");
                    let right = tables[node.children[1]].take().expect("child computed");
                    let (small, large) = if left.len() <= right.len() { (left, right) } else { (right, left) };
                    small
                        .into_iter()
                        .filter_map(|(a, val)| large.get(&a).map(|other| (a, val.mul(other))))
                        .collect()
                }
            };

            let checks = &self.checks[id];
            if !checks.is_empty() {
                table.retain(|&a, _| checks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0));
            }
            if hook.applies(id) {
                let mut keys: Vec<u64> = table.keys().copied().collect();
                keys.sort_unstable();
                for a in keys {
                    match hook.factor(id, &node.bag, a)? {
                        None => {
                            table.remove(&a);
                        }
                        Some(f) => {
                            let val = table.get_mut(&a).expect("row present");
                            *val = val.mul(&f);
                        }
                    }
                }
            }

            assert!(
                (table.len() as u128) <= 1u128 << node.bag.len(),
                "node {id}: {} rows exceed 2^{}",
                table.len(),
                node.bag.len()
            );
            if let Some(s) = stats.as_deref_mut() {
                s.tables.push((node.bag.len(), table.len()));
            }
            if table.is_empty() {
                return Ok(None);
            }
            tables[id] = Some(table);
        }
        Ok(tables[ntd.root()].take().and_then(|mut t| t.remove(&0)))
    }

    /// Number of variables below `num_vars` that occur in no bag.
    pub fn unbagged(&self, num_vars: usize) -> usize {
        let mut seen = vec![false; num_vars];
        for node in self.ntd.nodes() {
            for &v in &node.bag {
                if v < num_vars {
                    seen[v] = true;
                }
            }
        }
        seen.iter().filter(|&&s| !s).count()
    }
}

fn check_decomposition(cnf: &CnfFormula, ntd: &NiceTreeDecomposition) -> Result<(), DpError> {
    if ntd.num_vertices() != cnf.num_vars() {
        return Err(DpError::DecompositionMismatch(format!(
            "decomposition has {} vertices, formula has {} variables",
            ntd.num_vertices(),
            cnf.num_vars()
        )));
    }
    ntd.check_structure().map_err(DpError::DecompositionMismatch)?;
    let graph = PrimalGraph::of_cnf(cnf);
    let report = validate_covering(&ntd.to_tree_decomposition(), &graph, Some(&cnf.occurring_vars()));
    if !report.is_valid() {
        return Err(DpError::mismatch(&report));
    }
    Ok(())
}

/// Exact number of satisfying assignments over all `num_vars` variables.
///
/// Variables that occur in no clause may be left out of the decomposition;
/// each such variable doubles the count.
pub fn count_models(cnf: &CnfFormula, ntd: &NiceTreeDecomposition) -> Result<BigUint, DpError> {
    count_models_with_stats(cnf, ntd).map(|(count, _)| count)
}

pub fn count_models_with_stats(
    cnf: &CnfFormula,
    ntd: &NiceTreeDecomposition,
) -> Result<(BigUint, DpStats), DpError> {
    check_decomposition(cnf, ntd)?;
    let dp = SatDp::new(cnf.clauses(), ntd)?;
    let mut stats = DpStats::default();
    let root: Option<BigUint> = match dp.run(&mut NoHook, Some(&mut stats)) {
        Ok(root) => root,
        Err(never) => match never {},
    };
    let count = root.map_or_else(BigUint::zero, |c| c << dp.unbagged(cnf.num_vars()));
    Ok((count, stats))
}

/// Satisfiability with counts elided.
pub fn solve_sat(cnf: &CnfFormula, ntd: &NiceTreeDecomposition) -> Result<bool, DpError> {
    check_decomposition(cnf, ntd)?;
    let dp = SatDp::new(cnf.clauses(), ntd)?;
    let root: Option<Presence> = match dp.run(&mut NoHook, None) {
        Ok(root) => root,
        Err(never) => match never {},
    };
    Ok(root.is_some())
}

/// Nice decomposition of the primal graph restricted to variables that occur in clauses.
pub fn decompose_formula(cnf: &CnfFormula, heuristic: Heuristic, seed: u64) -> NiceTreeDecomposition {
    let graph = PrimalGraph::of_cnf(cnf);
    let td = decompose_vertices(&graph, &cnf.occurring_vars(), heuristic, seed);
    make_nice(&td).expect("heuristic decompositions are valid")
}

pub fn count_with_heuristic(cnf: &CnfFormula, heuristic: Heuristic, seed: u64) -> Result<BigUint, DpError> {
    count_models(cnf, &decompose_formula(cnf, heuristic, seed))
}

pub fn solve_with_heuristic(cnf: &CnfFormula, heuristic: Heuristic, seed: u64) -> Result<bool, DpError> {
    solve_sat(cnf, &decompose_formula(cnf, heuristic, seed))
}

/// Values of the bag vertices encoded in a row key.
pub fn row_values(bag: &[usize], assignment: u64) -> Vec<(usize, bool)> {
    bag.iter().enumerate().map(|(i, &v)| (v, bit(assignment, i))).collect()
}
