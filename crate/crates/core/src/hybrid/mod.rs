//! Hybrid solving for formulas whose primal graph is too wide for plain DP.
//!
//! High-degree vertices are removed until the rest decomposes within the
//! width threshold. The DP runs over the retained part; every connected
//! component of removed vertices is solved separately for each assignment of
//! its boundary, at the one decomposition node whose bag holds that boundary.
//! Residual sub-instances are simplified and either solved again the same way
//! (up to a nesting depth) or handed to a sub-solver. An abstraction that is
//! no narrower than the plain decomposition is discarded.

mod abstraction;
mod subsolver;

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::dp::{DpError, NoHook, Presence, RowHook, RowValue, SatDp};
use crate::model::{Clause, CnfFormula, Lit, PrimalGraph, Var};
use crate::td::{decompose_vertices, make_nice, Heuristic};

pub use abstraction::{
    build_abstraction, build_abstraction_within, Abstraction, Component, MaxDegree, RemovalStrategy,
};
pub use subsolver::{parse_answer, Mode, SubSolver, INTERNAL_MAX_VARS, TMPDIR_ENV};

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("sub-solver failed: {0}")]
    SubSolverFailure(String),
    #[error("sub-instance with {vars} variables exceeds the internal sub-solver limit of {limit}")]
    DepthExhaustedWithoutSubSolver { vars: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Dp(#[from] DpError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest width solved by plain DP; at least 1.
    pub width_threshold: usize,
    /// Nesting levels allowed below the top-level abstraction.
    pub max_depth: usize,
    pub sub_solver: SubSolver,
    pub heuristic: Heuristic,
    pub seed: u64,
    /// Boundary assignments of one component are cached while
    /// `2^|boundary|` stays within this budget; beyond it every DP row makes
    /// its own conditioned call.
    pub boundary_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            width_threshold: 10,
            max_depth: 1,
            sub_solver: SubSolver::Internal,
            heuristic: Heuristic::MinFill,
            seed: 0,
            boundary_budget: 1 << 20,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), HybridError> {
        if self.width_threshold == 0 {
            return Err(HybridError::InvalidConfig("width threshold must be at least 1".into()));
        }
        Ok(())
    }
}

/// Run statistics of one hybrid solve.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HybridStats {
    /// Heuristic width of every (sub-)instance decomposed, in order.
    pub widths_seen: Vec<isize>,
    pub max_depth_used: usize,
    pub abstractions: usize,
    pub components: usize,
    pub sub_solver_calls: usize,
    pub nested_calls: usize,
    pub cache_hits: usize,
    pub wall_time_ms: u64,
    /// Projected model counting is not provided.
    pub projected_counting: &'static str,
}

pub fn hybrid_count(cnf: &CnfFormula, config: &SolverConfig) -> Result<BigUint, HybridError> {
    hybrid_count_with_stats(cnf, config).map(|(count, _)| count)
}

pub fn hybrid_count_with_stats(
    cnf: &CnfFormula,
    config: &SolverConfig,
) -> Result<(BigUint, HybridStats), HybridError> {
    let (value, stats) = run::<BigUint>(cnf, config)?;
    Ok((value.unwrap_or_else(BigUint::zero), stats))
}

pub fn hybrid_decide(cnf: &CnfFormula, config: &SolverConfig) -> Result<bool, HybridError> {
    hybrid_decide_with_stats(cnf, config).map(|(sat, _)| sat)
}

pub fn hybrid_decide_with_stats(cnf: &CnfFormula, config: &SolverConfig) -> Result<(bool, HybridStats), HybridError> {
    let (value, stats) = run::<Presence>(cnf, config)?;
    Ok((value.is_some(), stats))
}

fn run<V: Measure>(cnf: &CnfFormula, config: &SolverConfig) -> Result<(Option<V>, HybridStats), HybridError> {
    config.validate()?;
    let start = Instant::now();
    let mut stats = HybridStats {
        projected_counting: "unsupported",
        ..HybridStats::default()
    };
    let value = Solver { config, stats: &mut stats }.solve::<V>(cnf, 0)?;
    stats.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok((value, stats))
}

/// Values the hybrid pass can compute; `None` stands for zero models.
trait Measure: RowValue {
    const MODE: Mode;
    fn from_count(count: BigUint) -> Option<Self>;
    fn doubled(self, times: usize) -> Self;
}

impl Measure for BigUint {
    const MODE: Mode = Mode::Count;

    fn from_count(count: BigUint) -> Option<Self> {
        (!count.is_zero()).then_some(count)
    }

    fn doubled(self, times: usize) -> Self {
        self << times
    }
}

impl Measure for Presence {
    const MODE: Mode = Mode::Decide;

    fn from_count(count: BigUint) -> Option<Self> {
        (!count.is_zero()).then_some(Presence)
    }

    fn doubled(self, _: usize) -> Self {
        self
    }
}

struct Solver<'a> {
    config: &'a SolverConfig,
    stats: &'a mut HybridStats,
}

impl Solver<'_> {
    fn solve<V: Measure>(&mut self, cnf: &CnfFormula, depth: usize) -> Result<Option<V>, HybridError> {
        assert!(depth <= self.config.max_depth, "nesting depth {depth} exceeds the limit");
        self.stats.max_depth_used = self.stats.max_depth_used.max(depth);
        if cnf.has_empty_clause() {
            return Ok(None);
        }
        let (h, seed, w) = (self.config.heuristic, self.config.seed, self.config.width_threshold);
        let graph = PrimalGraph::of_cnf(cnf);
        let occurring = cnf.occurring_vars();
        let td = decompose_vertices(&graph, &occurring, h, seed);
        self.stats.widths_seen.push(td.width());

        let abs = (td.width() > w as isize)
            .then(|| build_abstraction_within(&graph, &occurring, w, h, seed, &MaxDegree))
            // Injected boundaries can make the abstraction wider than the plain decomposition.
            .filter(|abs| abs.td.width() < td.width());
        let Some(abs) = abs else {
            let ntd = make_nice(&td).expect("heuristic decompositions are valid");
            let dp = SatDp::new(cnf.clauses(), &ntd)?;
            let root: Option<V> = match dp.run(&mut NoHook, None) {
                Ok(root) => root,
                Err(never) => match never {},
            };
            return Ok(root.map(|v| v.doubled(dp.unbagged(cnf.num_vars()))));
        };
        self.stats.abstractions += 1;
        self.stats.components += abs.components.len();
        let ntd = make_nice(&abs.td).expect("abstraction decompositions are valid");

        let mut owner = vec![usize::MAX; cnf.num_vars()];
        for (i, c) in abs.components.iter().enumerate() {
            for &v in &c.interior {
                owner[v] = i;
            }
        }
        let mut retained_clauses = Vec::new();
        let mut parts: Vec<Vec<Clause>> = vec![Vec::new(); abs.components.len()];
        for clause in cnf.clauses() {
            match clause.iter().map(|l| owner[l.var().index()]).find(|&o| o != usize::MAX) {
                Some(i) => parts[i].push(clause.clone()),
                None => retained_clauses.push(clause.clone()),
            }
        }

        let boundaries: Vec<Vec<usize>> = abs.components.iter().map(|c| c.boundary.clone()).collect();
        let hosts = ntd
            .attachment_nodes(&boundaries)
            .expect("every boundary lies in its host bag");
        let mut at_node: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &t) in hosts.iter().enumerate() {
            at_node.entry(t).or_default().push(i);
        }
        let interior_total: usize = abs.components.iter().map(|c| c.interior.len()).sum();
        let components = abs
            .components
            .iter()
            .zip(parts)
            .zip(&hosts)
            .map(|((c, clauses), &t)| {
                let bag = &ntd.node(t).bag;
                PendingComponent {
                    positions: c
                        .boundary
                        .iter()
                        .map(|v| bag.binary_search(v).expect("boundary in host bag"))
                        .collect(),
                    boundary: c.boundary.clone(),
                    interior: c.interior.clone(),
                    clauses,
                    cache: HashMap::new(),
                    cached: c.boundary.len() < 64 && 1u64 << c.boundary.len() <= self.config.boundary_budget,
                }
            })
            .collect();

        let dp = SatDp::new(&retained_clauses, &ntd)?;
        let mut hook = HostHook {
            solver: self,
            depth,
            at_node,
            components,
        };
        let root: Option<V> = dp.run(&mut hook, None)?;
        let free = dp.unbagged(cnf.num_vars()) - interior_total;
        Ok(root.map(|v| v.doubled(free)))
    }

    /// Solves a simplified residual: nested hybrid solving while depth allows,
    /// the sub-solver otherwise.
    fn solve_residual<V: Measure>(&mut self, cnf: &CnfFormula, depth: usize) -> Result<Option<V>, HybridError> {
        if depth < self.config.max_depth {
            let w = self.config.width_threshold as isize;
            let width = decompose_vertices(
                &PrimalGraph::of_cnf(cnf),
                &cnf.occurring_vars(),
                self.config.heuristic,
                self.config.seed,
            )
            .width();
            if width <= w || depth + 1 < self.config.max_depth {
                self.stats.nested_calls += 1;
                return self.solve(cnf, depth + 1);
            }
        }
        self.stats.sub_solver_calls += 1;
        Ok(V::from_count(self.config.sub_solver.solve(cnf, V::MODE)?))
    }
}

struct PendingComponent<V> {
    boundary: Vec<usize>,
    /// Bag positions of the boundary vertices at the host node.
    positions: Vec<usize>,
    interior: Vec<usize>,
    clauses: Vec<Clause>,
    cache: HashMap<u64, Option<V>>,
    cached: bool,
}

struct HostHook<'s, 'a, V> {
    solver: &'s mut Solver<'a>,
    depth: usize,
    at_node: HashMap<usize, Vec<usize>>,
    components: Vec<PendingComponent<V>>,
}

impl<V: Measure> RowHook<V> for HostHook<'_, '_, V> {
    type Error = HybridError;

    fn applies(&self, node: usize) -> bool {
        self.at_node.contains_key(&node)
    }

    fn factor(&mut self, node: usize, _bag: &[usize], assignment: u64) -> Result<Option<V>, HybridError> {
        let mut product = V::one();
        for &i in &self.at_node[&node] {
            let comp = &mut self.components[i];
            let key = comp
                .positions
                .iter()
                .enumerate()
                .fold(0u64, |k, (j, &p)| k | (assignment >> p & 1) << j);
            let value = match comp.cache.get(&key) {
                Some(v) => {
                    self.solver.stats.cache_hits += 1;
                    v.clone()
                }
                None => {
                    let value = match residual(&comp.clauses, &comp.boundary, &comp.interior, key) {
                        None => None,
                        Some(r) => self.solver.solve_residual::<V>(&r, self.depth)?,
                    };
                    if comp.cached {
                        comp.cache.insert(key, value.clone());
                    }
                    value
                }
            };
            match value {
                None => return Ok(None),
                Some(v) => product = product.mul(&v),
            }
        }
        Ok(Some(product))
    }
}

/// Conditions `clauses` on the boundary values in `key`, propagates unit
/// clauses and renumbers the interior variables left unassigned. `None` when
/// a clause is falsified. The model count over the interior is preserved.
fn residual(clauses: &[Clause], boundary: &[usize], interior: &[usize], key: u64) -> Option<CnfFormula> {
    let mut value: HashMap<usize, bool> = boundary
        .iter()
        .enumerate()
        .map(|(j, &v)| (v, key >> j & 1 == 1))
        .collect();
    let mut open: Vec<Vec<Lit>> = clauses.to_vec();
    loop {
        let mut next = Vec::with_capacity(open.len());
        let mut units = Vec::new();
        for clause in open {
            if clause.iter().any(|l| value.get(&l.var().index()).is_some_and(|&b| l.holds(b))) {
                continue;
            }
            let rest: Vec<Lit> = clause
                .into_iter()
                .filter(|l| !value.contains_key(&l.var().index()))
                .collect();
            match rest.len() {
                0 => return None,
                1 => units.push(rest[0]),
                _ => {}
            }
            next.push(rest);
        }
        open = next;
        if units.is_empty() {
            break;
        }
        for u in units {
            match value.get(&u.var().index()) {
                Some(&b) if !u.holds(b) => return None,
                _ => {
                    value.insert(u.var().index(), u.is_positive());
                }
            }
        }
    }
    let free: Vec<usize> = interior.iter().copied().filter(|v| !value.contains_key(v)).collect();
    let index: HashMap<usize, usize> = free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = CnfFormula::new(free.len());
    for clause in open {
        out.add_clause(
            clause
                .iter()
                .map(|l| Lit::new(Var::from_index(index[&l.var().index()]), l.is_negated())),
        );
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{brute_force_count, solve_with_heuristic};

    fn cnf(n: usize, clauses: &[&[i64]]) -> CnfFormula {
        let mut f = CnfFormula::new(n);
        for c in clauses {
            f.add_clause(c.iter().map(|&l| Lit::from_dimacs(l).unwrap()));
        }
        f
    }

    fn config(w: usize, d: usize) -> SolverConfig {
        SolverConfig {
            width_threshold: w,
            max_depth: d,
            ..SolverConfig::default()
        }
    }

    fn clique(n: usize) -> CnfFormula {
        let mut clauses = Vec::new();
        for u in 1..=n as i64 {
            for v in u + 1..=n as i64 {
                clauses.push(vec![u, -v]);
            }
        }
        let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
        cnf(n, &refs)
    }

    #[test]
    fn no_clauses() {
        for (w, d) in [(1, 0), (3, 2)] {
            assert_eq!(hybrid_count(&CnfFormula::new(7), &config(w, d)).unwrap(), BigUint::from(128u32));
        }
    }

    #[test]
    fn contradiction() {
        let f = cnf(1, &[&[1], &[-1]]);
        for (w, d) in [(1, 0), (2, 1)] {
            assert!(!hybrid_decide(&f, &config(w, d)).unwrap());
        }
    }

    #[test]
    fn clique_lands_in_one_component() {
        let f = clique(8);
        let (count, stats) = hybrid_count_with_stats(&f, &config(3, 0)).unwrap();
        assert_eq!(count, brute_force_count(&f).unwrap());
        assert_eq!(stats.components, 1);
        assert_eq!(stats.max_depth_used, 0);
        assert!(stats.sub_solver_calls > 0);
    }

    #[test]
    fn identity_abstraction_matches_dp() {
        let f = cnf(4, &[&[1, 2], &[-2, 3], &[3, -4]]);
        let (sat, stats) = hybrid_decide_with_stats(&f, &config(2, 1)).unwrap();
        assert_eq!(sat, solve_with_heuristic(&f, Heuristic::MinFill, 0).unwrap());
        assert_eq!(stats.abstractions, 0);
        assert_eq!(hybrid_count(&f, &config(2, 1)).unwrap(), brute_force_count(&f).unwrap());
    }

    #[test]
    fn nesting_respects_depth() {
        let f = clique(9);
        for d in 0..3 {
            let (count, stats) = hybrid_count_with_stats(&f, &config(1, d)).unwrap();
            assert_eq!(count, brute_force_count(&f).unwrap());
            assert!(stats.max_depth_used <= d);
        }
    }

    #[test]
    fn zero_threshold_rejected() {
        assert!(matches!(
            hybrid_count(&CnfFormula::new(1), &config(0, 0)),
            Err(HybridError::InvalidConfig(_))
        ));
    }

    #[test]
    fn residual_propagates_units() {
        // interior {0, 1}, boundary {2}: (x2 -> x0), (x0 -> x1), (x1 | x0 | x2)
        let clauses: Vec<Clause> = [[-3i64, 1], [-1, 2], [2, 1]]
            .iter()
            .map(|c| c.iter().map(|&l| Lit::from_dimacs(l).unwrap()).collect())
            .collect();
        let fixed = residual(&clauses, &[2], &[0, 1], 1).unwrap();
        assert_eq!(fixed.num_vars(), 0);
        let open = residual(&clauses, &[2], &[0, 1], 0).unwrap();
        assert_eq!(brute_force_count(&open).unwrap(), BigUint::from(2u32));
    }
}
