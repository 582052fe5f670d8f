#![allow(dead_code)]

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treewise::{CnfFormula, Lit, PrimalGraph, Program, Rule, Var};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random CNF with clause lengths 1..=4 over `n` variables.
pub fn random_cnf(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CnfFormula {
    let mut f = CnfFormula::new(n);
    if n == 0 {
        return f;
    }
    for _ in 0..m {
        let len = rng.gen_range(1..=4.min(n));
        let lits: Vec<Lit> = (0..len)
            .map(|_| Lit::new(Var::from_index(rng.gen_range(0..n)), rng.gen_bool(0.5)))
            .collect();
        f.add_clause(lits);
    }
    f
}

pub fn random_small_cnf(rng: &mut ChaCha8Rng) -> CnfFormula {
    let n = rng.gen_range(0..=12);
    let m = rng.gen_range(0..=40);
    random_cnf(rng, n, m)
}

/// Random normal program; roughly one rule in ten is a constraint.
pub fn random_program(rng: &mut ChaCha8Rng, atoms: usize, rules: usize) -> Program {
    let mut p = Program::with_atoms(atoms);
    if atoms == 0 {
        return p;
    }
    let pick = |rng: &mut ChaCha8Rng, k: usize| -> Vec<Var> {
        (0..k).map(|_| Var::from_index(rng.gen_range(0..atoms))).collect()
    };
    for _ in 0..rules {
        let head = (!rng.gen_bool(0.1)).then(|| Var::from_index(rng.gen_range(0..atoms)));
        let np = rng.gen_range(0..=2);
        let nn = rng.gen_range(0..=2);
        let pos = pick(rng, np);
        let neg = pick(rng, nn);
        p.add_rule(Rule::new(head, pos, neg));
    }
    p
}

pub fn random_small_program(rng: &mut ChaCha8Rng) -> Program {
    let atoms = rng.gen_range(0..=10);
    let rules = rng.gen_range(0..=15);
    random_program(rng, atoms, rules)
}

/// Uniformly random labelled tree on `n` vertices (random parent per vertex).
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> PrimalGraph {
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(&mut order[..], rng);
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    PrimalGraph::from_edges(n, edges)
}

/// Exact model counter by DPLL with connected-component splitting; an oracle
/// for instances beyond brute-force range.
pub fn dpll_count(cnf: &CnfFormula) -> BigUint {
    let clauses: Vec<Vec<i64>> = cnf
        .clauses()
        .iter()
        .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
        .collect();
    let mentioned: std::collections::BTreeSet<i64> = clauses.iter().flatten().map(|l| l.abs()).collect();
    let free = cnf.num_vars() - mentioned.len();
    count_vars(clauses, mentioned.into_iter().collect()) << free
}

/// Models over exactly `vars`; every clause mentions only `vars`.
fn count_vars(clauses: Vec<Vec<i64>>, vars: Vec<i64>) -> BigUint {
    if clauses.iter().any(Vec::is_empty) {
        return BigUint::from(0u32);
    }
    if clauses.is_empty() {
        return BigUint::from(1u32) << vars.len();
    }
    // Components over variables linked by clauses.
    let index: std::collections::HashMap<i64, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for c in &clauses {
        let first = index[&c[0].abs()];
        for l in &c[1..] {
            let (a, b) = (find(&mut parent, first), find(&mut parent, index[&l.abs()]));
            parent[a] = b;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Vec<i64>, Vec<Vec<i64>>)> = Default::default();
    for (i, &v) in vars.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().0.push(v);
    }
    for c in clauses {
        let r = find(&mut parent, index[&c[0].abs()]);
        groups.get_mut(&r).unwrap().1.push(c);
    }
    if groups.len() > 1 {
        return groups
            .into_values()
            .map(|(vs, cs)| count_vars(cs, vs))
            .fold(BigUint::from(1u32), |acc, c| acc * c);
    }
    let (vs, cs) = groups.into_values().next().unwrap();
    // Branch on the most frequent variable.
    let mut freq: std::collections::HashMap<i64, usize> = Default::default();
    for c in &cs {
        for l in c {
            *freq.entry(l.abs()).or_default() += 1;
        }
    }
    let var = *vs.iter().max_by_key(|v| (freq.get(v).copied().unwrap_or(0), -**v)).unwrap();
    let mut total = BigUint::from(0u32);
    for lit in [var, -var] {
        let reduced: Vec<Vec<i64>> = cs
            .iter()
            .filter(|c| !c.contains(&lit))
            .map(|c| c.iter().copied().filter(|&l| l != -lit).collect())
            .collect();
        let rest: Vec<i64> = vs.iter().copied().filter(|&v| v != var).collect();
        let mentioned: std::collections::BTreeSet<i64> = reduced.iter().flatten().map(|l| l.abs()).collect();
        let unconstrained = rest.len() - mentioned.len();
        total += count_vars(reduced, mentioned.into_iter().collect()) << unconstrained;
    }
    total
}

/// Satisfiability via an independent CDCL solver.
pub fn sat_oracle(cnf: &CnfFormula) -> bool {
    use varisat::ExtendFormula;
    let mut solver = varisat::Solver::new();
    for clause in cnf.clauses() {
        let lits: Vec<varisat::Lit> = clause
            .iter()
            .map(|l| varisat::Lit::from_dimacs(l.to_dimacs() as isize))
            .collect();
        solver.add_clause(&lits);
    }
    solver.solve().expect("in-memory solving does not fail")
}

/// High-width instance of at most 60 variables: a core of 31 to 33 variables
/// in which every pair shares a clause (clauses of length 3 to 5, polarities
/// chosen to satisfy a hidden assignment), plus a tree-shaped tail of binary
/// and ternary clauses hanging off one core variable.
pub fn high_width_instance(seed: u64) -> CnfFormula {
    let mut rng = rng(0x5eed_0000 + seed);
    let core = 31 + (seed % 3) as usize;
    let n = rng.gen_range(core + 15..=60);
    let hidden: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let mut f = CnfFormula::new(n);
    let planted = |v: usize, rng: &mut ChaCha8Rng| {
        // Each literal agrees with the hidden value with probability one half;
        // one literal per clause is flipped to agree afterwards.
        Lit::new(Var::from_index(v), rng.gen_bool(0.5))
    };
    let add = |f: &mut CnfFormula, vars: &[usize], rng: &mut ChaCha8Rng| {
        let mut lits: Vec<Lit> = vars.iter().map(|&v| planted(v, rng)).collect();
        if !lits.iter().any(|l| l.holds(hidden[l.var().index()])) {
            let k = rng.gen_range(0..lits.len());
            lits[k] = !lits[k];
        }
        f.add_clause(lits);
    };
    let mut covered = vec![vec![false; core]; core];
    for u in 0..core {
        for v in u + 1..core {
            if covered[u][v] {
                continue;
            }
            let len = rng.gen_range(3..=5);
            let mut vars = vec![u, v];
            while vars.len() < len {
                let w = rng.gen_range(0..core);
                if !vars.contains(&w) {
                    vars.push(w);
                }
            }
            for &a in &vars {
                for &b in &vars {
                    covered[a.min(b)][a.max(b)] = true;
                }
            }
            add(&mut f, &vars, &mut rng);
        }
    }
    for v in core..n {
        let parent = if v == core { core - 1 } else { rng.gen_range(core..v) };
        if rng.gen_bool(0.5) || v == core {
            add(&mut f, &[parent, v], &mut rng);
        } else {
            let other = rng.gen_range(core..v);
            let mut vars = vec![parent, v];
            if other != parent {
                vars.push(other);
            }
            add(&mut f, &vars, &mut rng);
        }
    }
    f
}
