use super::{validate_covering, TdError, TreeDecomposition};
use crate::model::PrimalGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NiceKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted vertex set.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// A nice tree decomposition. Nodes are stored so that every child precedes
/// its parent; the last node is the root, whose bag is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    num_vertices: usize,
    nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    /// Normalizes a valid decomposition.
    ///
    /// Adjacent equal bags are contracted first. Below every node, each child
    /// is brought to the node's bag by forgetting then introducing one vertex
    /// at a time (ascending ids); multiple children are combined by binary
    /// joins, and the root is closed by a forget chain down to the empty bag.
    pub fn from_td(td: &TreeDecomposition) -> Result<Self, TdError> {
        let graph = PrimalGraph::new(td.num_vertices());
        let none = vec![false; td.num_vertices()];
        let report = validate_covering(td, &graph, Some(&none));
        if !report.is_valid() {
            return Err(TdError::InvalidInputDecomposition(report));
        }
        let tree = td.rooted()?;
        let bags: Vec<Vec<usize>> = (0..td.node_count()).map(|t| td.sorted_bag(t)).collect();

        // Contract every child whose bag equals its parent's into the parent.
        let mut rep: Vec<usize> = (0..td.node_count()).collect();
        for &t in tree.postorder.iter().rev() {
            if let Some(p) = tree.parent[t] {
                if bags[t] == bags[p] {
                    rep[t] = rep[p];
                }
            }
        }
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); td.node_count()];
        for &t in &tree.postorder {
            if let Some(p) = tree.parent[t] {
                if rep[t] != rep[p] {
                    children[rep[p]].push(t);
                }
            }
        }

        let mut nice = NiceTreeDecomposition {
            num_vertices: td.num_vertices(),
            nodes: Vec::new(),
        };
        let mut top = vec![usize::MAX; td.node_count()];
        for &t in &tree.postorder {
            if rep[t] != t {
                continue;
            }
            let target = &bags[t];
            let mut branches = Vec::new();
            if children[t].is_empty() {
                let leaf = nice.push(NiceKind::Leaf, Vec::new(), Vec::new());
                branches.push(nice.transition(leaf, target));
            } else {
                let mut kids = children[t].clone();
                kids.sort_unstable();
                for c in kids {
                    branches.push(nice.transition(top[c], target));
                }
            }
            let mut current = branches[0];
            for &other in &branches[1..] {
                current = nice.push(NiceKind::Join, target.clone(), vec![current, other]);
            }
            top[t] = current;
        }
        let root_top = top[rep[tree.root]];
        nice.transition(root_top, &[]);
        Ok(nice)
    }

    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Forget/introduce chain from node `from` up to a node with bag `target`.
    fn transition(&mut self, from: usize, target: &[usize]) -> usize {
        let mut current = from;
        let start = self.nodes[from].bag.clone();
        for &v in start.iter().filter(|v| target.binary_search(v).is_err()) {
            let mut bag = self.nodes[current].bag.clone();
            bag.retain(|&u| u != v);
            current = self.push(NiceKind::Forget(v), bag, vec![current]);
        }
        for &v in target.iter().filter(|v| start.binary_search(v).is_err()) {
            let mut bag = self.nodes[current].bag.clone();
            let at = bag.binary_search(&v).unwrap_err();
            bag.insert(at, v);
            current = self.push(NiceKind::Introduce(v), bag, vec![current]);
        }
        current
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NiceNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn max_bag_size(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0)
    }

    pub fn width(&self) -> isize {
        self.max_bag_size() as isize - 1
    }

    /// Distance of every node from the root.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            for &c in &self.nodes[id].children {
                depth[c] = depth[id] + 1;
            }
        }
        depth
    }

    /// For every vertex set, the shallowest node whose bag contains it (smallest
    /// id on ties). Empty sets attach to the root. `Err(i)` names the first set
    /// that no bag covers.
    pub fn attachment_nodes(&self, sets: &[Vec<usize>]) -> Result<Vec<usize>, usize> {
        let depth = self.depths();
        let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); self.num_vertices];
        for (id, node) in self.nodes.iter().enumerate() {
            for &v in &node.bag {
                if v < self.num_vertices {
                    occurrences[v].push(id);
                }
            }
        }
        sets.iter()
            .enumerate()
            .map(|(i, set)| {
                let Some(&pivot) = set
                    .iter()
                    .min_by_key(|&&v| occurrences.get(v).map_or(0, Vec::len))
                else {
                    return Ok(self.root());
                };
                occurrences
                    .get(pivot)
                    .into_iter()
                    .flatten()
                    .copied()
                    .filter(|&t| {
                        let bag = &self.nodes[t].bag;
                        set.iter().all(|v| bag.binary_search(v).is_ok())
                    })
                    .min_by_key(|&t| (depth[t], t))
                    .ok_or(i)
            })
            .collect()
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(id, n)| n.children.iter().map(move |&c| (c, id)))
            .collect();
        TreeDecomposition::new(self.num_vertices, bags, edges, self.root())
    }

    /// Checks the nice-form invariants node by node.
    pub fn check_structure(&self) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("no nodes".into());
        }
        if !self.nodes[self.root()].bag.is_empty() {
            return Err("root bag is not empty".into());
        }
        let mut has_parent = vec![false; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if node.bag.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("node {id}: bag not sorted"));
            }
            for &c in &node.children {
                if c >= id {
                    return Err(format!("node {id}: child {c} does not precede it"));
                }
                if has_parent[c] {
                    return Err(format!("node {c} has two parents"));
                }
                has_parent[c] = true;
            }
            let child_bag = |i: usize| &self.nodes[node.children[i]].bag;
            match node.kind {
                NiceKind::Leaf => {
                    if !node.children.is_empty() || !node.bag.is_empty() {
                        return Err(format!("node {id}: leaf must be empty and childless"));
                    }
                }
                NiceKind::Introduce(v) => {
                    if node.children.len() != 1 {
                        return Err(format!("node {id}: introduce needs one child"));
                    }
                    let mut expected = child_bag(0).clone();
                    if expected.contains(&v) {
                        return Err(format!("node {id}: introduced vertex already present"));
                    }
                    expected.push(v);
                    expected.sort_unstable();
                    if expected != node.bag {
                        return Err(format!("node {id}: introduce changes more than one vertex"));
                    }
                }
                NiceKind::Forget(v) => {
                    if node.children.len() != 1 {
                        return Err(format!("node {id}: forget needs one child"));
                    }
                    let mut expected = child_bag(0).clone();
                    let Ok(at) = expected.binary_search(&v) else {
                        return Err(format!("node {id}: forgotten vertex not in child"));
                    };
                    expected.remove(at);
                    if expected != node.bag {
                        return Err(format!("node {id}: forget changes more than one vertex"));
                    }
                }
                NiceKind::Join => {
                    if node.children.len() != 2
                        || child_bag(0) != &node.bag
                        || child_bag(1) != &node.bag
                    {
                        return Err(format!("node {id}: join needs two children with its bag"));
                    }
                }
            }
        }
        if has_parent[..self.nodes.len() - 1].iter().any(|&p| !p) {
            return Err("a non-root node has no parent".into());
        }
        Ok(())
    }
}
