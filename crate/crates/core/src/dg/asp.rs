//! Normal programs to SAT, guided by a tree decomposition of the primal graph.
//!
//! Output variables `0..n` are the atoms. Per node `t` and bag atom `a`:
//! a counter `L_t(a)` of `b(t) = ceil(log2(|bag|+1))` bits (zero for false
//! atoms) and a flag `pr_t(a)` claiming that `a` has a supporting rule
//! attached somewhere in the subtree of `t`. Each rule with a head gets a body
//! variable `s_r` at its attachment node: `s_r` forces the body true and every
//! positive body atom's counter below the head's.
//!
//! Counters of neighbouring nodes are linked per tree edge by a table
//! `F: child values -> parent values` held in the parent's bag. `F` is weakly
//! increasing and strictly increasing into every value used by a true shared
//! atom, and `L_parent(a) = F(L_child(a))` for every true shared atom. This
//! carries the comparisons between shared true atoms unchanged across the
//! edge, so the counters of all bags describe one consistent preorder and the
//! support relation is well-founded. At an atom's topmost node, truth
//! requires `pr`.
//!
//! Tight programs need no counters; [`AspSupportEncoder`] emits only the
//! support part.

use super::{
    differs_from, lit, run_guided, DgError, DgReductionOutput, NodeEncoder, NodeEncoderOutput, NodeView, VarKey,
    VarPool, WidthCertificate, DG_WIDTH_CONSTANT,
};
use crate::model::{Clause, PrimalGraph, Program, Rule};
use crate::td::{validate, TreeDecomposition};

const LEVEL: u8 = 0;
const PROVEN: u8 = 1;
const MAP: u8 = 2;
const USED: u8 = 3;
const BODY: u8 = 4;

pub(crate) fn counter_bits(bag_size: usize) -> usize {
    (usize::BITS - bag_size.leading_zeros()) as usize
}

struct Shared<'p> {
    program: &'p Program,
    /// Rules attached at each node.
    attached: Vec<Vec<usize>>,
}

impl Shared<'_> {
    fn proven(&self, vars: &mut VarPool, node: usize, atom: usize) -> usize {
        vars.var(VarKey {
            node,
            role: PROVEN,
            index: atom,
            bit: 0,
        })
    }

    fn body(&self, vars: &mut VarPool, node: usize, rule: usize) -> usize {
        vars.var(VarKey {
            node,
            role: BODY,
            index: rule,
            bit: 0,
        })
    }

    /// Classical rule clauses, body variables and the provenness chain; the
    /// ordering part is supplied by `order` for every (rule, body variable).
    fn encode_support(
        &self,
        node: &NodeView<'_>,
        vars: &mut VarPool,
        out: &mut NodeEncoderOutput,
        mut order: impl FnMut(&Rule, usize, &mut VarPool, &mut NodeEncoderOutput),
    ) {
        let t = node.id;
        out.output_bag.extend_from_slice(node.bag);
        let mut supports: Vec<Vec<usize>> = vec![Vec::new(); node.bag.len()];
        for &r in &self.attached[t] {
            let rule = &self.program.rules()[r];
            let mut classical: Clause = rule.pos.iter().map(|a| a.neg()).collect();
            classical.extend(rule.neg.iter().map(|a| a.pos()));
            if let Some(h) = rule.head {
                classical.push(h.pos());
                let s = self.body(vars, t, r);
                out.output_bag.push(s);
                for a in &rule.pos {
                    out.clauses.push(vec![lit(s, false), a.pos()]);
                }
                for a in &rule.neg {
                    out.clauses.push(vec![lit(s, false), a.neg()]);
                }
                order(rule, s, vars, out);
                let at = node.bag.binary_search(&h.index()).expect("head in attached bag");
                supports[at].push(s);
            }
            out.clauses.push(classical);
        }
        for (i, &a) in node.bag.iter().enumerate() {
            let pr = self.proven(vars, t, a);
            out.output_bag.push(pr);
            let mut clause = vec![lit(pr, false)];
            clause.extend(supports[i].iter().map(|&s| lit(s, true)));
            for &c in node.children {
                if node.bags[c].binary_search(&a).is_ok() {
                    let below = self.proven(vars, c, a);
                    out.output_bag.push(below);
                    clause.push(lit(below, true));
                }
            }
            out.clauses.push(clause);
            if node.is_top(a) {
                out.clauses.push(vec![lit(a, false), lit(pr, true)]);
            }
        }
    }
}

/// Support-only encoder; sound and complete for tight programs.
pub struct AspSupportEncoder<'p> {
    shared: Shared<'p>,
}

impl NodeEncoder for AspSupportEncoder<'_> {
    fn encode(&mut self, node: &NodeView<'_>, vars: &mut VarPool) -> NodeEncoderOutput {
        let mut out = NodeEncoderOutput::default();
        self.shared.encode_support(node, vars, &mut out, |_, _, _, _| {});
        out
    }
}

/// Encoder with per-node level counters; sound and complete for normal programs.
pub struct AspLevelEncoder<'p> {
    shared: Shared<'p>,
}

fn level_vars(vars: &mut VarPool, node: usize, atom: usize, bits: usize) -> Vec<usize> {
    (0..bits)
        .map(|bit| {
            vars.var(VarKey {
                node,
                role: LEVEL,
                index: atom,
                bit,
            })
        })
        .collect()
}

/// Clauses `premise -> not (lhs >= rhs)` i.e. `lhs < rhs`, or `lhs <= rhs`
/// when `strict` is false, by excluding every violating value pair.
fn compare(premise: &[crate::Lit], lhs: &[usize], rhs: &[usize], strict: bool, out: &mut Vec<Clause>) {
    for u in 0..1usize << lhs.len() {
        for w in 0..1usize << rhs.len() {
            let violates = if strict { u >= w } else { u > w };
            if violates {
                let mut clause: Clause = premise.to_vec();
                clause.extend(differs_from(lhs, u));
                clause.extend(differs_from(rhs, w));
                out.push(clause);
            }
        }
    }
}

impl NodeEncoder for AspLevelEncoder<'_> {
    fn encode(&mut self, node: &NodeView<'_>, vars: &mut VarPool) -> NodeEncoderOutput {
        let t = node.id;
        let bits = counter_bits(node.bag.len());
        let mut out = NodeEncoderOutput {
            bits,
            ..Default::default()
        };
        let levels: Vec<Vec<usize>> = node.bag.iter().map(|&a| level_vars(vars, t, a, bits)).collect();
        for (&a, l) in node.bag.iter().zip(&levels) {
            out.output_bag.extend_from_slice(l);
            for &v in l {
                out.clauses.push(vec![lit(a, true), lit(v, false)]);
            }
        }

        let bag = node.bag;
        self.shared.encode_support(node, vars, &mut out, |rule, s, _, out| {
            let h = rule.head.expect("support only for rules with a head").index();
            let lh = &levels[bag.binary_search(&h).expect("head in bag")];
            for p in &rule.pos {
                let lp = &levels[bag.binary_search(&p.index()).expect("body atom in bag")];
                compare(&[lit(s, false)], lp, lh, true, &mut out.clauses);
            }
        });

        for &c in node.children {
            let shared = node.shared_with(c);
            if shared.is_empty() {
                continue;
            }
            let child_bits = counter_bits(node.bags[c].len());
            let values = 1usize << child_bits;
            let table: Vec<Vec<usize>> = (0..values)
                .map(|v| {
                    (0..bits)
                        .map(|bit| {
                            vars.var(VarKey {
                                node: c,
                                role: MAP,
                                index: v,
                                bit,
                            })
                        })
                        .collect()
                })
                .collect();
            let used: Vec<usize> = (0..values)
                .map(|v| {
                    vars.var(VarKey {
                        node: c,
                        role: USED,
                        index: v,
                        bit: 0,
                    })
                })
                .collect();
            out.output_bag.extend(table.iter().flatten());
            out.output_bag.extend_from_slice(&used);
            for v in 0..values - 1 {
                compare(&[], &table[v], &table[v + 1], false, &mut out.clauses);
                compare(&[lit(used[v + 1], false)], &table[v], &table[v + 1], true, &mut out.clauses);
            }
            for &a in &shared {
                let below = level_vars(vars, c, a, child_bits);
                out.output_bag.extend_from_slice(&below);
                let here = &levels[bag.binary_search(&a).expect("shared atom in bag")];
                for v in 0..values {
                    let guard: Vec<crate::Lit> =
                        std::iter::once(lit(a, false)).chain(differs_from(&below, v)).collect();
                    let mut mark = guard.clone();
                    mark.push(lit(used[v], true));
                    out.clauses.push(mark);
                    for (&f, &l) in table[v].iter().zip(here) {
                        let mut up = guard.clone();
                        up.extend([lit(f, false), lit(l, true)]);
                        out.clauses.push(up);
                        let mut down = guard.clone();
                        down.extend([lit(f, true), lit(l, false)]);
                        out.clauses.push(down);
                    }
                }
            }
        }
        out
    }
}

/// Reduces with counters unless the program is tight.
pub fn reduce_asp_to_sat(program: &Program, td: &TreeDecomposition) -> Result<DgReductionOutput, DgError> {
    reduce_asp_to_sat_with(program, td, !program.is_tight())
}

/// Reduces with (`levels = true`) or without level counters. Without them the
/// result is only equivalent for tight programs.
pub fn reduce_asp_to_sat_with(
    program: &Program,
    td: &TreeDecomposition,
    levels: bool,
) -> Result<DgReductionOutput, DgError> {
    let graph = PrimalGraph::of_program(program);
    let mut input = td.clone();
    input.set_num_vertices(program.num_atoms());
    let report = validate(&input, &graph);
    if !report.is_valid() {
        return Err(DgError::InvalidInputDecomposition(report));
    }
    let tree = input
        .rooted()
        .expect("validated decompositions are trees");
    let bags: Vec<Vec<usize>> = (0..input.node_count()).map(|t| input.sorted_bag(t)).collect();

    let mut attached = vec![Vec::new(); bags.len()];
    for (r, rule) in program.rules().iter().enumerate() {
        let atoms: Vec<usize> = rule.atoms().iter().map(|a| a.index()).collect();
        let t = (0..bags.len())
            .filter(|&t| atoms.iter().all(|a| bags[t].binary_search(a).is_ok()))
            .min_by_key(|&t| (tree.depth[t], t))
            .expect("rule atoms form a clique, so some bag covers them");
        attached[t].push(r);
    }
    let shared = Shared { program, attached };
    let (formula, output_td, rows) = if levels {
        run_guided(&tree, &bags, program.num_atoms(), &mut AspLevelEncoder { shared })
    } else {
        run_guided(&tree, &bags, program.num_atoms(), &mut AspSupportEncoder { shared })
    };
    let certificate = WidthCertificate::from_rows(&rows, DG_WIDTH_CONSTANT);
    Ok(DgReductionOutput {
        formula,
        output_td,
        rows,
        certificate,
    })
}
