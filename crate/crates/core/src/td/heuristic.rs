use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TreeDecomposition;
use crate::model::PrimalGraph;

/// Greedy elimination-ordering heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Heuristic {
    #[default]
    MinFill,
    MinDegree,
}

impl Heuristic {
    pub const ALL: [Heuristic; 2] = [Heuristic::MinFill, Heuristic::MinDegree];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::MinFill => "min-fill",
            Heuristic::MinDegree => "min-degree",
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min-fill" => Ok(Heuristic::MinFill),
            "min-degree" => Ok(Heuristic::MinDegree),
            other => Err(format!("unknown heuristic `{other}` (expected min-fill or min-degree)")),
        }
    }
}

/// Decomposes the whole graph. See [`decompose_vertices`].
pub fn decompose(graph: &PrimalGraph, heuristic: Heuristic, seed: u64) -> TreeDecomposition {
    let all = vec![true; graph.vertex_count()];
    decompose_vertices(graph, &all, heuristic, seed)
}

/// Decomposes the subgraph induced by the vertices with `members[v] == true`.
///
/// Vertices are eliminated greedily; ties go to the smallest label, where
/// labels are the vertex ids for `seed == 0` and a seeded random relabeling
/// otherwise. Each eliminated vertex contributes the bag `{v} ∪ N(v)` and is
/// attached to its earliest-eliminated neighbour. Components are joined under
/// a fresh empty root bag. The result's vertex range is the full graph's.
pub fn decompose_vertices(
    graph: &PrimalGraph,
    members: &[bool],
    heuristic: Heuristic,
    seed: u64,
) -> TreeDecomposition {
    let n = graph.vertex_count();
    let vertices: Vec<usize> = (0..n).filter(|&v| members[v]).collect();
    if vertices.is_empty() {
        return TreeDecomposition::single_bag(n, Vec::new());
    }

    let mut label: Vec<usize> = (0..n).collect();
    if seed != 0 {
        let mut shuffled = vertices.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        for (rank, &v) in shuffled.iter().enumerate() {
            label[v] = rank;
        }
    }

    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|u| {
            if members[u] {
                graph
                    .neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&v| members[v])
                    .collect()
            } else {
                BTreeSet::new()
            }
        })
        .collect();
    let score_of = |adj: &[BTreeSet<usize>], v: usize| -> usize {
        match heuristic {
            Heuristic::MinDegree => adj[v].len(),
            Heuristic::MinFill => fill_in(adj, v),
        }
    };
    let mut score: Vec<usize> = (0..n).map(|v| if members[v] { score_of(&adj, v) } else { 0 }).collect();
    let mut alive = members.to_vec();
    let mut position = vec![usize::MAX; n];
    let mut bags: Vec<Vec<usize>> = Vec::with_capacity(vertices.len());
    let mut elim_order = Vec::with_capacity(vertices.len());

    for step in 0..vertices.len() {
        let v = vertices
            .iter()
            .copied()
            .filter(|&u| alive[u])
            .min_by_key(|&u| (score[u], label[u]))
            .expect("a live vertex remains");
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        let mut bag = nbrs.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        elim_order.push(v);
        position[v] = step;
        alive[v] = false;

        for (i, &a) in nbrs.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj[v].clear();

        let mut touched: BTreeSet<usize> = nbrs.iter().copied().collect();
        if heuristic == Heuristic::MinFill {
            for &a in &nbrs {
                touched.extend(adj[a].iter().copied());
            }
        }
        for u in touched {
            if alive[u] {
                score[u] = score_of(&adj, u);
            }
        }
    }

    // Parent of v's node: the node of v's earliest-eliminated later neighbour.
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (step, bag) in bags.iter().enumerate() {
        let parent = bag
            .iter()
            .filter(|&&u| position[u] > step)
            .map(|&u| position[u])
            .min();
        match parent {
            Some(p) => edges.push((step, p)),
            None => roots.push(step),
        }
    }
    let root = if roots.len() == 1 {
        roots[0]
    } else {
        let fresh = bags.len();
        bags.push(Vec::new());
        for r in roots {
            edges.push((r, fresh));
        }
        fresh
    };
    TreeDecomposition::new(n, bags, edges, root)
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}
