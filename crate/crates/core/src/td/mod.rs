//! Tree decompositions: construction by elimination orderings, validation,
//! nice normal form and the PACE `.td` format.
//!
//! Widths follow the usual convention `max |bag| - 1`, so a decomposition
//! consisting of a single empty bag has width `-1`. Internal bounds are
//! phrased in terms of bag sizes instead.

mod heuristic;
mod nice;
mod pace;
mod validate;

use std::collections::VecDeque;

pub use heuristic::{decompose, decompose_vertices, Heuristic};
pub use nice::{NiceKind, NiceNode, NiceTreeDecomposition};
pub use validate::{validate, validate_covering, ValidationReport, Violation};

use thiserror::Error;

/// Converts a valid decomposition into nice form.
pub fn make_nice(td: &TreeDecomposition) -> Result<NiceTreeDecomposition, TdError> {
    NiceTreeDecomposition::from_td(td)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TdError {
    #[error("input decomposition is invalid: {0}")]
    InvalidInputDecomposition(ValidationReport),
    #[error("decomposition tree is malformed: {0}")]
    MalformedTree(String),
}

/// A tree decomposition `(T, χ)` with a designated root.
///
/// Bags keep the vertex order they were given in (PACE files are echoed
/// verbatim); use [`TreeDecomposition::sorted_bag`] when set semantics matter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    num_vertices: usize,
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    root: usize,
}

/// Parent/children view of a decomposition tree rooted at a chosen node.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    /// Every node after all of its descendants.
    pub postorder: Vec<usize>,
}

impl TreeDecomposition {
    pub fn new(
        num_vertices: usize,
        bags: Vec<Vec<usize>>,
        edges: Vec<(usize, usize)>,
        root: usize,
    ) -> Self {
        TreeDecomposition {
            num_vertices,
            bags,
            edges,
            root,
        }
    }

    /// A decomposition consisting of one bag holding `vertices`.
    pub fn single_bag(num_vertices: usize, vertices: Vec<usize>) -> Self {
        Self::new(num_vertices, vec![vertices], Vec::new(), 0)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, node: usize) -> &[usize] {
        &self.bags[node]
    }

    pub fn bag_mut(&mut self, node: usize) -> &mut Vec<usize> {
        &mut self.bags[node]
    }

    pub fn sorted_bag(&self, node: usize) -> Vec<usize> {
        let mut bag = self.bags[node].clone();
        bag.sort_unstable();
        bag.dedup();
        bag
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn set_root(&mut self, root: usize) {
        assert!(root < self.bags.len());
        self.root = root;
    }

    pub fn set_num_vertices(&mut self, n: usize) {
        self.num_vertices = n;
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `max |bag| - 1`; `-1` when every bag is empty.
    pub fn width(&self) -> isize {
        self.max_bag_size() as isize - 1
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            if a < adj.len() && b < adj.len() {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }

    /// Checks that the node graph is a tree and returns it rooted at [`Self::root`].
    pub fn rooted(&self) -> Result<RootedTree, TdError> {
        let n = self.bags.len();
        if n == 0 {
            return Err(TdError::MalformedTree("no nodes".into()));
        }
        if self.root >= n {
            return Err(TdError::MalformedTree(format!("root {} out of range", self.root)));
        }
        if self.edges.len() != n - 1 {
            return Err(TdError::MalformedTree(format!(
                "{} nodes but {} edges",
                n,
                self.edges.len()
            )));
        }
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                return Err(TdError::MalformedTree(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(TdError::MalformedTree(format!("self-loop at node {a}")));
            }
        }
        let adj = self.neighbors();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([self.root]);
        visited[self.root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &adj[u] {
                if !visited[v] {
                    visited[v] = true;
                    parent[v] = Some(u);
                    depth[v] = depth[u] + 1;
                    children[u].push(v);
                    queue.push_back(v);
                }
            }
        }
        if order.len() != n {
            return Err(TdError::MalformedTree("node graph is disconnected".into()));
        }
        for c in &mut children {
            c.sort_unstable();
        }
        order.reverse();
        Ok(RootedTree {
            root: self.root,
            parent,
            children,
            depth,
            postorder: order,
        })
    }
}
