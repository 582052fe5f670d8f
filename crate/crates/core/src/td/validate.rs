use std::collections::VecDeque;
use std::fmt;

use super::TreeDecomposition;
use crate::model::PrimalGraph;

/// A single violated decomposition property, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The node graph is not a tree (or the root is out of range).
    NotATree(String),
    /// A bag mentions a vertex the graph does not have.
    VertexOutOfRange { node: usize, vertex: usize },
    VertexUncovered(usize),
    EdgeUncovered(usize, usize),
    /// The nodes containing `vertex` are not connected; `first` and `second`
    /// both contain it but the path between them leaves the vertex's nodes.
    ConnectednessViolation {
        vertex: usize,
        first: usize,
        second: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree(reason) => write!(f, "not a tree: {reason}"),
            Violation::VertexOutOfRange { node, vertex } => {
                write!(f, "bag {} holds unknown vertex {}", node + 1, vertex + 1)
            }
            Violation::VertexUncovered(v) => write!(f, "vertex {} in no bag", v + 1),
            Violation::EdgeUncovered(u, v) => write!(f, "edge {{{},{}}} in no bag", u + 1, v + 1),
            Violation::ConnectednessViolation {
                vertex,
                first,
                second,
            } => write!(
                f,
                "vertex {} occurs in bags {} and {} but not on the path between them",
                vertex + 1,
                first + 1,
                second + 1
            ),
        }
    }
}

/// Outcome of [`validate`]; empty means the decomposition is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks the three decomposition properties against `graph`.
pub fn validate(td: &TreeDecomposition, graph: &PrimalGraph) -> ValidationReport {
    validate_covering(td, graph, None)
}

/// Like [`validate`], but vertex coverage is only demanded for vertices with
/// `required[v] == true` (edges and connectedness are always checked).
pub fn validate_covering(
    td: &TreeDecomposition,
    graph: &PrimalGraph,
    required: Option<&[bool]>,
) -> ValidationReport {
    let mut violations = Vec::new();
    let n = graph.vertex_count();

    let tree = match td.rooted() {
        Ok(tree) => Some(tree),
        Err(e) => {
            violations.push(Violation::NotATree(e.to_string()));
            None
        }
    };

    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (node, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if v >= n {
                violations.push(Violation::VertexOutOfRange { node, vertex: v });
            } else if occurrences[v].last() != Some(&node) {
                occurrences[v].push(node);
            }
        }
    }

    for (v, occ) in occurrences.iter().enumerate() {
        let needed = required.map_or(true, |r| r[v]);
        if needed && occ.is_empty() {
            violations.push(Violation::VertexUncovered(v));
        }
    }

    let sorted: Vec<Vec<usize>> = (0..td.node_count()).map(|t| td.sorted_bag(t)).collect();
    for (u, v) in graph.edges() {
        let covered = occurrences[u]
            .iter()
            .any(|&t| sorted[t].binary_search(&v).is_ok());
        if !covered {
            violations.push(Violation::EdgeUncovered(u, v));
        }
    }

    if tree.is_some() {
        let adj = td.neighbors();
        let mut in_set = vec![false; td.node_count()];
        let mut reached = vec![false; td.node_count()];
        for (v, occ) in occurrences.iter().enumerate() {
            if occ.len() < 2 {
                continue;
            }
            for &t in occ {
                in_set[t] = true;
            }
            let mut queue = VecDeque::from([occ[0]]);
            reached[occ[0]] = true;
            while let Some(t) = queue.pop_front() {
                for &s in &adj[t] {
                    if in_set[s] && !reached[s] {
                        reached[s] = true;
                        queue.push_back(s);
                    }
                }
            }
            if let Some(&second) = occ.iter().find(|&&t| !reached[t]) {
                violations.push(Violation::ConnectednessViolation {
                    vertex: v,
                    first: occ[0],
                    second,
                });
            }
            for &t in occ {
                in_set[t] = false;
            }
            for r in reached.iter_mut() {
                *r = false;
            }
        }
    }

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> PrimalGraph {
        PrimalGraph::from_edges(3, [(0, 1), (1, 2)])
    }

    #[test]
    fn valid_path_decomposition() {
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)], 0);
        assert!(validate(&td, &path3()).is_valid());
    }

    #[test]
    fn uncovered_edge() {
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![2]], vec![(0, 1)], 0);
        let report = validate(&td, &path3());
        assert_eq!(report.violations, vec![Violation::EdgeUncovered(1, 2)]);
    }

    #[test]
    fn connectedness_violation() {
        // bags {a},{b},{a} on a path; graph without edges so only connectedness fails
        let g = PrimalGraph::new(2);
        let td = TreeDecomposition::new(2, vec![vec![0], vec![1], vec![0]], vec![(0, 1), (1, 2)], 0);
        let report = validate(&td, &g);
        assert_eq!(
            report.violations,
            vec![Violation::ConnectednessViolation {
                vertex: 0,
                first: 0,
                second: 2
            }]
        );
    }

    #[test]
    fn uncovered_vertex_and_range() {
        let g = PrimalGraph::new(2);
        let td = TreeDecomposition::single_bag(2, vec![0, 5]);
        let report = validate(&td, &g);
        assert!(report.violations.contains(&Violation::VertexUncovered(1)));
        assert!(report
            .violations
            .contains(&Violation::VertexOutOfRange { node: 0, vertex: 5 }));
    }

    #[test]
    fn optional_coverage() {
        let g = PrimalGraph::new(2);
        let td = TreeDecomposition::single_bag(2, vec![0]);
        assert!(!validate(&td, &g).is_valid());
        assert!(validate_covering(&td, &g, Some(&[true, false])).is_valid());
    }

    #[test]
    fn broken_tree_reported() {
        let g = PrimalGraph::new(1);
        let td = TreeDecomposition::new(1, vec![vec![0], vec![0]], vec![], 0);
        let report = validate(&td, &g);
        assert!(matches!(report.violations[0], Violation::NotATree(_)));
    }
}
