mod common;

use proptest::prelude::*;
use treewise::td::{decompose_vertices, validate_covering};
use treewise::{decompose, make_nice, validate, CnfFormula, Heuristic, PrimalGraph, Program, TreeDecomposition};

fn graph_strategy() -> impl Strategy<Value = PrimalGraph> {
    (0usize..16).prop_flat_map(|n| {
        let edges = if n == 0 {
            Just(Vec::new()).boxed()
        } else {
            prop::collection::vec((0..n, 0..n), 0..40).boxed()
        };
        edges.prop_map(move |es| PrimalGraph::from_edges(n, es.into_iter().filter(|(u, v)| u != v)))
    })
}

fn heuristic_strategy() -> impl Strategy<Value = Heuristic> {
    prop_oneof![Just(Heuristic::MinFill), Just(Heuristic::MinDegree)]
}

proptest! {
    #[test]
    fn primal_graph_of_cnf_is_symmetric_with_clause_cliques(seed in any::<u64>()) {
        let f = common::random_small_cnf(&mut common::rng(seed));
        let g = PrimalGraph::of_cnf(&f);
        for v in 0..g.vertex_count() {
            prop_assert!(!g.has_edge(v, v));
            for &u in g.neighbors(v) {
                prop_assert!(g.has_edge(u, v));
            }
        }
        for clause in f.clauses() {
            for a in clause {
                for b in clause {
                    if a.var() != b.var() {
                        prop_assert!(g.has_edge(a.var().index(), b.var().index()));
                    }
                }
            }
        }
    }

    #[test]
    fn primal_graph_of_program_has_rule_cliques(seed in any::<u64>()) {
        let p = common::random_small_program(&mut common::rng(seed));
        let g = PrimalGraph::of_program(&p);
        for rule in p.rules() {
            let atoms = rule.atoms();
            for (i, a) in atoms.iter().enumerate() {
                for b in &atoms[i + 1..] {
                    prop_assert!(g.has_edge(a.index(), b.index()));
                }
            }
        }
    }

    #[test]
    fn dimacs_round_trip(seed in any::<u64>()) {
        let f = common::random_small_cnf(&mut common::rng(seed));
        let again = CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap();
        prop_assert_eq!(again.num_vars(), f.num_vars());
        prop_assert_eq!(again.clauses(), f.clauses());
    }

    #[test]
    fn program_round_trip(seed in any::<u64>()) {
        let p = common::random_small_program(&mut common::rng(seed));
        let again = Program::parse(&p.to_text()).unwrap();
        prop_assert_eq!(again.to_text(), p.to_text());
        prop_assert_eq!(again.rules().len(), p.rules().len());
    }

    #[test]
    fn gr_round_trip(g in graph_strategy()) {
        prop_assert_eq!(PrimalGraph::parse_pace(&g.to_pace()).unwrap(), g);
    }

    #[test]
    fn decompositions_are_valid(g in graph_strategy(), h in heuristic_strategy(), seed in 0u64..4) {
        let td = decompose(&g, h, seed);
        prop_assert!(validate(&td, &g).is_valid(), "{}", validate(&td, &g));
        let again = TreeDecomposition::parse_pace(&td.to_pace()).unwrap();
        prop_assert_eq!(again.to_pace(), td.to_pace());
    }

    #[test]
    fn restricted_decompositions_cover_members(
        g in graph_strategy(),
        h in heuristic_strategy(),
        mask in any::<u16>(),
    ) {
        let members: Vec<bool> = (0..g.vertex_count()).map(|v| mask >> v & 1 == 1).collect();
        let td = decompose_vertices(&g, &members, h, 0);
        let induced = g.induced(&members);
        prop_assert!(validate_covering(&td, &induced, Some(&members)).is_valid());
        for bag in td.bags() {
            prop_assert!(bag.iter().all(|&v| members[v]));
        }
    }

    #[test]
    fn nice_form_keeps_width_and_validity(g in graph_strategy(), h in heuristic_strategy(), seed in 0u64..4) {
        let td = decompose(&g, h, seed);
        let nice = make_nice(&td).unwrap();
        prop_assert_eq!(nice.width(), td.width());
        prop_assert!(nice.check_structure().is_ok());
        prop_assert!(validate(&nice.to_tree_decomposition(), &g).is_valid());
        prop_assert!(nice.node(nice.root()).bag.is_empty());
    }

    #[test]
    fn decomposition_is_deterministic(g in graph_strategy(), h in heuristic_strategy(), seed in any::<u64>()) {
        prop_assert_eq!(decompose(&g, h, seed), decompose(&g, h, seed));
    }

    #[test]
    fn width_within_trivial_bounds(g in graph_strategy(), h in heuristic_strategy()) {
        let td = decompose(&g, h, 0);
        if g.edge_count() > 0 {
            prop_assert!(td.width() >= 1);
        }
        prop_assert!(td.width() < g.vertex_count().max(1) as isize);
    }
}
