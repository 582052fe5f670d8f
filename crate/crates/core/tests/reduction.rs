mod common;

use std::collections::BTreeSet;

use treewise::asp::enumerate_answer_sets;
use treewise::dg::{reduce_asp_to_sat, reduce_asp_to_sat_with, verify_guided, DgReductionOutput, DG_WIDTH_CONSTANT};
use treewise::{decompose, make_nice, Heuristic, PrimalGraph, Program, TreeDecomposition};

fn nice_td(p: &Program, h: Heuristic, seed: u64) -> TreeDecomposition {
    let td = decompose(&PrimalGraph::of_program(p), h, seed);
    make_nice(&td).unwrap().to_tree_decomposition()
}

fn has_answer_set(p: &Program) -> bool {
    !enumerate_answer_sets(p).unwrap().answer_sets.is_empty()
}

fn undirected(td: &TreeDecomposition) -> BTreeSet<(usize, usize)> {
    td.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()
}

#[test]
fn satisfiability_matches_answer_set_existence() {
    for seed in 0..250 {
        let p = common::random_small_program(&mut common::rng(seed));
        let expected = has_answer_set(&p);
        for h in Heuristic::ALL {
            let out = reduce_asp_to_sat(&p, &nice_td(&p, h, seed % 3)).unwrap();
            assert_eq!(common::sat_oracle(&out.formula), expected, "seed {seed} {h:?}");
            let report = verify_guided(&out);
            assert!(report.is_ok(), "seed {seed}: {report}");
        }
    }
}

#[test]
fn arbitrary_decompositions_stay_sound_and_valid() {
    for seed in 0..150 {
        let p = common::random_small_program(&mut common::rng(10_000 + seed));
        let td = decompose(&PrimalGraph::of_program(&p), Heuristic::MinDegree, seed);
        let out = reduce_asp_to_sat(&p, &td).unwrap();
        assert_eq!(common::sat_oracle(&out.formula), has_answer_set(&p), "seed {seed}");
        assert!(verify_guided(&out).validation.is_valid());
    }
}

#[test]
fn output_tree_is_the_input_tree() {
    for seed in 0..50 {
        let p = common::random_small_program(&mut common::rng(20_000 + seed));
        let td = nice_td(&p, Heuristic::MinFill, 0);
        let out = reduce_asp_to_sat(&p, &td).unwrap();
        assert_eq!(out.output_td.node_count(), td.node_count());
        assert_eq!(out.output_td.root(), td.root());
        assert_eq!(undirected(&out.output_td), undirected(&td));
        assert_eq!(out.rows.len(), td.node_count());
    }
}

#[test]
fn atoms_in_output_bags_come_from_the_input_bag() {
    for seed in 0..50 {
        let p = common::random_small_program(&mut common::rng(30_000 + seed));
        let td = nice_td(&p, Heuristic::MinDegree, 1);
        let out = reduce_asp_to_sat(&p, &td).unwrap();
        for t in 0..td.node_count() {
            let input = td.sorted_bag(t);
            for v in out.output_td.sorted_bag(t) {
                if v < p.num_atoms() {
                    assert!(input.binary_search(&v).is_ok(), "seed {seed} node {t} atom {v}");
                }
            }
            let row = out.rows[t];
            assert_eq!(row.input_bag_size, input.len());
            assert_eq!(row.output_bag_size, out.output_td.sorted_bag(t).len());
        }
    }
}

#[test]
fn reduction_is_deterministic() {
    for seed in 0..20 {
        let p = common::random_small_program(&mut common::rng(40_000 + seed));
        let td = nice_td(&p, Heuristic::MinFill, 0);
        assert_eq!(reduce_asp_to_sat(&p, &td).unwrap(), reduce_asp_to_sat(&p, &td).unwrap());
    }
}

fn non_tight_sample() -> DgReductionOutput {
    let p = Program::parse("a :- b.\nb :- a.\na :- not c.\nc :- not a.\nd :- a, not b.").unwrap();
    assert!(!p.is_tight());
    reduce_asp_to_sat(&p, &nice_td(&p, Heuristic::MinFill, 0)).unwrap()
}

#[test]
fn dropping_a_variable_from_its_bags_is_caught() {
    let out = non_tight_sample();
    let victim = out.formula.clauses().iter().find(|c| c.len() >= 2).unwrap()[0].var().index();
    let mut broken = out.clone();
    for t in 0..broken.output_td.node_count() {
        broken.output_td.bag_mut(t).retain(|&v| v != victim);
    }
    let report = verify_guided(&broken);
    assert!(!report.validation.is_valid());
    assert!(!report.is_ok());
}

#[test]
fn oversized_bags_are_caught() {
    let out = non_tight_sample();
    let mut broken = out.clone();
    let t = (0..out.rows.len()).find(|&t| out.rows[t].input_bag_size > 0).unwrap();
    let bound = out.rows[t].bound(DG_WIDTH_CONSTANT);
    let existing = broken.output_td.sorted_bag(t);
    // The padding may also break connectedness; only the width report is checked.
    let mut extra: Vec<usize> = (0..out.formula.num_vars()).filter(|v| !existing.contains(v)).collect();
    extra.truncate(bound + 1 - existing.len().min(bound + 1));
    broken.output_td.bag_mut(t).extend(extra);
    let report = verify_guided(&broken);
    assert_eq!(report.width_violations, vec![t + 1]);
}

#[test]
fn truncated_report_is_caught() {
    let mut broken = non_tight_sample();
    broken.rows.pop();
    assert!(verify_guided(&broken).tree_mismatch);
}

#[test]
fn tight_programs_need_no_counters() {
    for seed in 0..100 {
        let p = common::random_small_program(&mut common::rng(50_000 + seed));
        if !p.is_tight() {
            continue;
        }
        let out = reduce_asp_to_sat(&p, &nice_td(&p, Heuristic::MinFill, 0)).unwrap();
        assert_eq!(out.certificate.bits_per_atom, 0);
        assert!(out.rows.iter().all(|r| r.bits == 0));
        assert_eq!(common::sat_oracle(&out.formula), has_answer_set(&p));
    }
}

#[test]
fn support_alone_accepts_unfounded_loops() {
    let p = Program::parse("a :- b.\nb :- a.\n:- not a.").unwrap();
    let td = nice_td(&p, Heuristic::MinFill, 0);
    assert!(!has_answer_set(&p));
    assert!(common::sat_oracle(&reduce_asp_to_sat_with(&p, &td, false).unwrap().formula));
    assert!(!common::sat_oracle(&reduce_asp_to_sat_with(&p, &td, true).unwrap().formula));
}

#[test]
fn invalid_input_decomposition_is_rejected() {
    let p = Program::parse("a :- b, c.").unwrap();
    let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![2]], vec![(0, 1)], 0);
    assert!(reduce_asp_to_sat(&p, &td).is_err());
}
