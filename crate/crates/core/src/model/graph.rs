use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{CnfFormula, ParseError, Program};

/// Undirected simple graph on vertices `0..vertex_count`.
///
/// For instances, vertex `i` is the variable (atom) with index `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimalGraph {
    adj: Vec<Vec<usize>>,
}

impl PrimalGraph {
    pub fn new(vertex_count: usize) -> Self {
        PrimalGraph {
            adj: vec![Vec::new(); vertex_count],
        }
    }

    /// Builds a graph from an edge list; self-loops are ignored, duplicates collapse.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(vertex_count: usize, edges: I) -> Self {
        let mut sets = vec![BTreeSet::new(); vertex_count];
        for (u, v) in edges {
            assert!(u < vertex_count && v < vertex_count, "edge ({u},{v}) out of range");
            if u != v {
                sets[u].insert(v);
                sets[v].insert(u);
            }
        }
        PrimalGraph {
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    /// Builds the graph in which every group of vertices forms a clique.
    pub fn from_cliques<'a, I>(vertex_count: usize, groups: I) -> Self
    where
        I: IntoIterator<Item = &'a [usize]>,
    {
        let mut sets = vec![BTreeSet::new(); vertex_count];
        for group in groups {
            for (i, &u) in group.iter().enumerate() {
                for &v in &group[i + 1..] {
                    if u != v {
                        sets[u].insert(v);
                        sets[v].insert(u);
                    }
                }
            }
        }
        PrimalGraph {
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    /// Primal graph of a CNF: variables adjacent iff they share a clause.
    pub fn of_cnf(cnf: &CnfFormula) -> Self {
        let groups: Vec<Vec<usize>> = cnf
            .clauses()
            .iter()
            .map(|c| c.iter().map(|l| l.var().index()).collect())
            .collect();
        Self::from_cliques(cnf.num_vars(), groups.iter().map(Vec::as_slice))
    }

    /// Primal graph of a program: atoms adjacent iff they share a rule.
    pub fn of_program(program: &Program) -> Self {
        let groups: Vec<Vec<usize>> = program
            .rules()
            .iter()
            .map(|r| r.atoms().iter().map(|a| a.index()).collect())
            .collect();
        Self::from_cliques(program.num_atoms(), groups.iter().map(Vec::as_slice))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sorted neighbour list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Keeps the vertex range but drops every edge touching a vertex outside `keep`.
    pub fn induced(&self, keep: &[bool]) -> PrimalGraph {
        PrimalGraph {
            adj: self
                .adj
                .iter()
                .enumerate()
                .map(|(u, ns)| {
                    if keep[u] {
                        ns.iter().copied().filter(|&v| keep[v]).collect()
                    } else {
                        Vec::new()
                    }
                })
                .collect(),
        }
    }

    /// Connected components of the subgraph induced by `members`, each sorted.
    pub fn components_within(&self, members: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertex_count()];
        let mut components = Vec::new();
        for start in 0..self.vertex_count() {
            if !members[start] || seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if members[v] && !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Reads the PACE `.gr` format (`p tw <n> <m>` then 1-indexed edge lines).
    pub fn parse_pace(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut edges = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts[0] == "p" {
                if header.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                if parts.len() != 4 || parts[1] != "tw" {
                    return Err(ParseError::MalformedHeader {
                        line,
                        reason: "expected `p tw <vertices> <edges>`".into(),
                    });
                }
                let n = parse_count(parts[2], line)?;
                let m = parse_count(parts[3], line)?;
                header = Some((n, m, line));
                continue;
            }
            let Some((n, _, _)) = header else {
                return Err(ParseError::MissingHeader { line });
            };
            if parts.len() != 2 {
                return Err(ParseError::Syntax {
                    line,
                    reason: "edge line must contain exactly two vertices".into(),
                });
            }
            let u = parse_vertex(parts[0], n, line)?;
            let v = parse_vertex(parts[1], n, line)?;
            edges.push((u, v));
        }
        let Some((n, m, header_line)) = header else {
            return Err(ParseError::MissingHeader {
                line: last_line.max(1),
            });
        };
        if edges.len() != m {
            return Err(ParseError::EdgeCountMismatch {
                line: header_line,
                expected: m,
                found: edges.len(),
            });
        }
        Ok(PrimalGraph::from_edges(n, edges))
    }

    /// Writes the PACE `.gr` format.
    pub fn to_pace(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p tw {} {}", self.vertex_count(), self.edge_count()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", u + 1, v + 1).unwrap();
        }
        out
    }
}

pub(crate) fn parse_count(token: &str, line: usize) -> Result<usize, ParseError> {
    token.parse().map_err(|_| ParseError::MalformedHeader {
        line,
        reason: format!("`{token}` is not a non-negative integer"),
    })
}

pub(crate) fn parse_vertex(token: &str, declared: usize, line: usize) -> Result<usize, ParseError> {
    let value: i64 = token.parse().map_err(|_| ParseError::InvalidToken {
        line,
        token: token.to_string(),
    })?;
    if value < 1 || value as u64 > declared as u64 {
        return Err(ParseError::VertexOutOfRange {
            line,
            vertex: value,
            declared,
        });
    }
    Ok(value as usize - 1)
}
