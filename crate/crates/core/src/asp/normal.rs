use std::collections::{HashMap, HashSet};

use super::AspError;
use crate::dp::{bit, insert_bit, remove_bit, DpStats};
use crate::model::{PrimalGraph, Program};
use crate::td::{decompose_vertices, make_nice, validate_covering, Heuristic, NiceKind, NiceTreeDecomposition};

/// Largest bag the normal-program DP accepts (orders are packed in nibbles).
pub const ASP_MAX_BAG: usize = 16;

/// One row of the normal-program DP. Bit `i` of `assignment` and `proven`
/// refers to the `i`-th smallest atom of the bag; `order` lists the bag
/// positions of the true atoms from lowest to highest level, four bits each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AspRow {
    pub assignment: u32,
    pub proven: u32,
    pub order: u64,
}

impl AspRow {
    fn new(assignment: u32, proven: u32, seq: &[usize]) -> Self {
        let order = seq.iter().enumerate().fold(0u64, |o, (i, &p)| o | (p as u64) << (4 * i));
        AspRow {
            assignment,
            proven,
            order,
        }
    }

    pub fn order_positions(&self) -> Vec<usize> {
        (0..self.assignment.count_ones() as usize)
            .map(|i| (self.order >> (4 * i) & 0xf) as usize)
            .collect()
    }

    fn check_local(&self, bag_len: usize) {
        let seq = self.order_positions();
        let ranked = seq.iter().fold(0u32, |m, &p| m | 1 << p);
        assert!(
            seq.iter().all(|&p| p < bag_len) && ranked == self.assignment && self.proven & !self.assignment == 0,
            "row {self:?} ranks atoms outside its bag's true atoms"
        );
    }
}

struct RuleCheck {
    head: Option<usize>,
    pos: u32,
    neg: u32,
    pos_positions: Vec<usize>,
}

/// Answer-set existence for a normal program over a nice decomposition of
/// its primal graph.
pub fn solve_normal_asp(program: &Program, ntd: &NiceTreeDecomposition) -> Result<bool, AspError> {
    solve_normal_asp_with_stats(program, ntd).map(|(answer, _)| answer)
}

pub fn solve_normal_asp_with_stats(
    program: &Program,
    ntd: &NiceTreeDecomposition,
) -> Result<(bool, DpStats), AspError> {
    check_decomposition(program, ntd)?;
    let checks = compile_rules(program, ntd)?;
    let mut stats = DpStats::default();
    let mut tables: Vec<Option<HashSet<AspRow>>> = (0..ntd.node_count()).map(|_| None).collect();

    for id in 0..ntd.node_count() {
        let node = ntd.node(id);
        let mut table: HashSet<AspRow> = match node.kind {
            NiceKind::Leaf => HashSet::from([AspRow::new(0, 0, &[])]),
            NiceKind::Introduce(v) => {
                let child = tables[node.children[0]].take().expect("child computed");
                let at = node.bag.binary_search(&v).expect("introduced atom in bag");
                introduce(child, at)
            }
            NiceKind::Forget(v) => {
                let child_id = node.children[0];
                let child = tables[child_id].take().expect("child computed");
                let at = ntd.node(child_id).bag.binary_search(&v).expect("forgotten atom in child");
                forget(child, at)
            }
            NiceKind::Join => {
                let left = tables[node.children[0]].take().expect("child computed");
                let right = tables[node.children[1]].take().expect("child computed");
                join(left, right)
            }
        };
        if !checks[id].is_empty() {
            table = table.into_iter().filter_map(|row| apply_rules(row, &checks[id])).collect();
        }

        let k = node.bag.len();
        assert!(
            table.len() as u128 <= row_bound(k),
            "node {id}: {} rows exceed 2^{k} * 2^{k} * {k}!",
            table.len()
        );
        for row in &table {
            row.check_local(k);
        }
        stats.tables.push((k, table.len()));
        if table.is_empty() {
            return Ok((false, stats));
        }
        tables[id] = Some(table);
    }
    Ok((true, stats))
}

/// Nice decomposition of the primal graph restricted to atoms that occur in rules.
pub fn decompose_program(program: &Program, heuristic: Heuristic, seed: u64) -> NiceTreeDecomposition {
    let td = decompose_vertices(&PrimalGraph::of_program(program), &occurring_atoms(program), heuristic, seed);
    make_nice(&td).expect("heuristic decompositions are valid")
}

pub fn solve_normal_with_heuristic(program: &Program, heuristic: Heuristic, seed: u64) -> Result<bool, AspError> {
    solve_normal_asp(program, &decompose_program(program, heuristic, seed))
}

/// `2^k * 2^k * k!`, the row universe of a bag of `k` atoms.
pub(crate) fn row_bound(k: usize) -> u128 {
    let factorial: u128 = (1..=k as u128).product();
    (1u128 << (2 * k)) * factorial
}

fn check_decomposition(program: &Program, ntd: &NiceTreeDecomposition) -> Result<(), AspError> {
    if ntd.num_vertices() != program.num_atoms() {
        return Err(AspError::DecompositionMismatch(format!(
            "decomposition has {} vertices, program has {} atoms",
            ntd.num_vertices(),
            program.num_atoms()
        )));
    }
    if ntd.max_bag_size() > ASP_MAX_BAG {
        return Err(AspError::BagTooLarge {
            size: ntd.max_bag_size(),
            limit: ASP_MAX_BAG,
        });
    }
    ntd.check_structure().map_err(AspError::DecompositionMismatch)?;
    let report = validate_covering(
        &ntd.to_tree_decomposition(),
        &PrimalGraph::of_program(program),
        Some(&occurring_atoms(program)),
    );
    if !report.is_valid() {
        return Err(AspError::DecompositionMismatch(report.to_string()));
    }
    Ok(())
}

pub(crate) fn occurring_atoms(program: &Program) -> Vec<bool> {
    let mut seen = vec![false; program.num_atoms()];
    for rule in program.rules() {
        for a in rule.atoms() {
            seen[a.index()] = true;
        }
    }
    seen
}

fn compile_rules(program: &Program, ntd: &NiceTreeDecomposition) -> Result<Vec<Vec<RuleCheck>>, AspError> {
    let sets: Vec<Vec<usize>> = program
        .rules()
        .iter()
        .map(|r| r.atoms().iter().map(|a| a.index()).collect())
        .collect();
    let attach = ntd.attachment_nodes(&sets).map_err(|i| {
        AspError::DecompositionMismatch(format!("rule {} is not covered by any bag", i + 1))
    })?;
    let mut checks: Vec<Vec<RuleCheck>> = (0..ntd.node_count()).map(|_| Vec::new()).collect();
    for (rule, &t) in program.rules().iter().zip(&attach) {
        let bag = &ntd.node(t).bag;
        let at = |a: crate::Var| bag.binary_search(&a.index()).expect("attached bag covers rule");
        let pos_positions: Vec<usize> = rule.pos.iter().map(|&a| at(a)).collect();
        checks[t].push(RuleCheck {
            head: rule.head.map(at),
            pos: pos_positions.iter().fold(0, |m, &p| m | 1 << p),
            neg: rule.neg.iter().fold(0, |m, &a| m | 1 << at(a)),
            pos_positions,
        });
    }
    Ok(checks)
}

fn introduce(child: HashSet<AspRow>, at: usize) -> HashSet<AspRow> {
    let mut out = HashSet::with_capacity(child.len() * 2);
    for row in child {
        let seq: Vec<usize> = row
            .order_positions()
            .into_iter()
            .map(|p| if p >= at { p + 1 } else { p })
            .collect();
        let proven = insert_bit(row.proven as u64, at, false) as u32;
        out.insert(AspRow::new(insert_bit(row.assignment as u64, at, false) as u32, proven, &seq));
        let assignment = insert_bit(row.assignment as u64, at, true) as u32;
        for slot in 0..=seq.len() {
            let mut with = seq.clone();
            with.insert(slot, at);
            out.insert(AspRow::new(assignment, proven, &with));
        }
    }
    out
}

fn forget(child: HashSet<AspRow>, at: usize) -> HashSet<AspRow> {
    child
        .into_iter()
        .filter(|row| !bit(row.assignment as u64, at) || bit(row.proven as u64, at))
        .map(|row| {
            let seq: Vec<usize> = row
                .order_positions()
                .into_iter()
                .filter(|&p| p != at)
                .map(|p| if p > at { p - 1 } else { p })
                .collect();
            AspRow::new(
                remove_bit(row.assignment as u64, at) as u32,
                remove_bit(row.proven as u64, at) as u32,
                &seq,
            )
        })
        .collect()
}

/// Rows combine when assignment and order coincide; proven flags are united.
fn join(left: HashSet<AspRow>, right: HashSet<AspRow>) -> HashSet<AspRow> {
    let mut by_key: HashMap<(u32, u64), Vec<u32>> = HashMap::new();
    for row in left {
        by_key.entry((row.assignment, row.order)).or_default().push(row.proven);
    }
    let mut out = HashSet::new();
    for row in right {
        if let Some(provens) = by_key.get(&(row.assignment, row.order)) {
            for &p in provens {
                out.insert(AspRow {
                    proven: p | row.proven,
                    ..row
                });
            }
        }
    }
    out
}

/// Classical satisfaction of the attached rules, then support: a true head
/// becomes proven when the body holds and every positive body atom is
/// ordered strictly before it.
fn apply_rules(mut row: AspRow, checks: &[RuleCheck]) -> Option<AspRow> {
    let seq = row.order_positions();
    let rank = |p: usize| seq.iter().position(|&q| q == p);
    for rule in checks {
        let body_holds = rule.pos & !row.assignment == 0 && rule.neg & row.assignment == 0;
        if !body_holds {
            continue;
        }
        let head = rule.head?;
        if !bit(row.assignment as u64, head) {
            return None;
        }
        let head_rank = rank(head).expect("true atoms are ranked");
        if rule
            .pos_positions
            .iter()
            .all(|&p| rank(p).expect("true atoms are ranked") < head_rank)
        {
            row.proven |= 1 << head;
        }
    }
    Some(row)
}
