use std::collections::VecDeque;

use crate::model::PrimalGraph;
use crate::td::{decompose_vertices, Heuristic, TreeDecomposition};

/// A removed region of the primal graph, solved outside the main decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Removed vertices, sorted.
    pub interior: Vec<usize>,
    /// Retained neighbours of the interior, sorted.
    pub boundary: Vec<usize>,
    /// Node of [`Abstraction::td`] whose bag holds the whole boundary.
    pub host: usize,
}

/// Retained part of a primal graph with its decomposition, plus the removed components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abstraction {
    pub retained: Vec<bool>,
    /// Subgraph induced by the retained vertices (removed vertices isolated).
    pub abstract_graph: PrimalGraph,
    pub components: Vec<Component>,
    /// Decomposition of the retained vertices with every boundary injected into its host bag.
    pub td: TreeDecomposition,
}

impl Abstraction {
    pub fn is_identity(&self) -> bool {
        self.components.is_empty()
    }
}

/// Chooses which vertex to drop next from the retained set.
pub trait RemovalStrategy {
    fn pick(&self, graph: &PrimalGraph, retained: &[bool]) -> Option<usize>;
}

/// Highest degree within the retained subgraph, smallest id on ties.
pub struct MaxDegree;

impl RemovalStrategy for MaxDegree {
    fn pick(&self, graph: &PrimalGraph, retained: &[bool]) -> Option<usize> {
        (0..graph.vertex_count())
            .filter(|&v| retained[v])
            .max_by_key(|&v| {
                let degree = graph.neighbors(v).iter().filter(|&&u| retained[u]).count();
                (degree, std::cmp::Reverse(v))
            })
    }
}

pub fn build_abstraction(graph: &PrimalGraph, width: usize, heuristic: Heuristic, seed: u64) -> Abstraction {
    let all = vec![true; graph.vertex_count()];
    build_abstraction_within(graph, &all, width, heuristic, seed, &MaxDegree)
}

/// Removes vertices among `members` until the heuristic width of the rest is
/// at most `width`, groups the removed vertices into connected components and
/// places each component's boundary into a single bag.
pub fn build_abstraction_within(
    graph: &PrimalGraph,
    members: &[bool],
    width: usize,
    heuristic: Heuristic,
    seed: u64,
    strategy: &dyn RemovalStrategy,
) -> Abstraction {
    let n = graph.vertex_count();
    let mut retained = members.to_vec();
    let mut td = decompose_vertices(graph, &retained, heuristic, seed);
    while td.width() > width as isize {
        let Some(v) = strategy.pick(graph, &retained) else {
            break;
        };
        retained[v] = false;
        td = decompose_vertices(graph, &retained, heuristic, seed);
    }

    let removed: Vec<bool> = (0..n).map(|v| members[v] && !retained[v]).collect();
    let mut components = Vec::new();
    for interior in graph.components_within(&removed) {
        let mut boundary: Vec<usize> = interior
            .iter()
            .flat_map(|&v| graph.neighbors(v).iter().copied())
            .filter(|&u| retained[u])
            .collect();
        boundary.sort_unstable();
        boundary.dedup();
        let host = inject(&mut td, &boundary);
        components.push(Component {
            interior,
            boundary,
            host,
        });
    }
    Abstraction {
        abstract_graph: graph.induced(&retained),
        retained,
        components,
        td,
    }
}

/// Picks the shallowest bag holding the most boundary vertices (smallest id on
/// ties) and adds each missing boundary vertex along the tree path from that
/// bag to the nearest bag already holding it.
fn inject(td: &mut TreeDecomposition, boundary: &[usize]) -> usize {
    let tree = td.rooted().expect("heuristic decompositions are trees");
    let host = (0..td.node_count())
        .min_by_key(|&t| {
            let bag = td.bag(t);
            let share = boundary.iter().filter(|v| bag.contains(v)).count();
            (std::cmp::Reverse(share), tree.depth[t], t)
        })
        .expect("decompositions have a node");
    let adjacency = td.neighbors();
    for &v in boundary {
        if td.bag(host).contains(&v) {
            continue;
        }
        let mut previous = vec![usize::MAX; td.node_count()];
        previous[host] = host;
        let mut queue = VecDeque::from([host]);
        let mut found = None;
        while let Some(t) = queue.pop_front() {
            if td.bag(t).contains(&v) {
                found = Some(t);
                break;
            }
            for &s in &adjacency[t] {
                if previous[s] == usize::MAX {
                    previous[s] = t;
                    queue.push_back(s);
                }
            }
        }
        let mut t = previous[found.expect("retained vertices occur in some bag")];
        loop {
            td.bag_mut(t).push(v);
            if t == host {
                break;
            }
            t = previous[t];
        }
    }
    host
}
