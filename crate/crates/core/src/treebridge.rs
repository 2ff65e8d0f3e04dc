//! Graph trees and their edge tree sets, in both directions.
//!
//! Oriented edges of a [`GraphTree`] are numbered from the edge list: edge `k`
//! given as `(u, v)` yields oriented index `2k` for `(u, v)` and `2k + 1` for
//! `(v, u)`. [`edge_tree_set`] uses the same numbering for its elements.

use std::collections::{BTreeMap, VecDeque};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::orient::{self, Limits, OrientError};
use crate::system::{Members, SeparationSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a tree needs at least one node")]
    Empty,
    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("loop at node {0}")]
    Loop(usize),
    #[error("{edges} edges on {nodes} nodes")]
    EdgeCount { nodes: usize, edges: usize },
    #[error("graph is not connected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Orient(#[from] OrientError),
    #[error("input is not a tree set")]
    NotATreeSet,
    #[error("input is not a regular tree set")]
    NotRegular,
    #[error("splitting stars do not match the oriented stars: {0}")]
    Mismatch(String),
}

/// A finite tree with labelled nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTree {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl GraphTree {
    pub fn new(labels: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self, TreeError> {
        let n = labels.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut seen = BTreeMap::new();
        for label in &labels {
            if seen.insert(label.as_str(), ()).is_some() {
                return Err(TreeError::DuplicateLabel(label.clone()));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            for x in [u, v] {
                if x >= n {
                    return Err(TreeError::UnknownNode(x.to_string()));
                }
            }
            if u == v {
                return Err(TreeError::Loop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        if edges.len() + 1 != n {
            return Err(TreeError::EdgeCount { nodes: n, edges: edges.len() });
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let tree = Self { labels, edges, adjacency };
        if tree.distances_from(0).contains(&usize::MAX) {
            return Err(TreeError::Disconnected);
        }
        Ok(tree)
    }

    /// Builds a tree from edges given by node label.
    pub fn from_labelled(labels: &[&str], edges: &[(&str, &str)]) -> Result<Self, TreeError> {
        let index: BTreeMap<&str, usize> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let lookup =
            |l: &str| index.get(l).copied().ok_or_else(|| TreeError::UnknownNode(l.into()));
        let edges = edges
            .iter()
            .map(|&(u, v)| Ok((lookup(u)?, lookup(v)?)))
            .collect::<Result<Vec<_>, TreeError>>()?;
        Self::new(labels.iter().map(|l| l.to_string()).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, t: usize) -> &str {
        &self.labels[t]
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbours(&self, t: usize) -> &[usize] {
        &self.adjacency[t]
    }

    pub fn degree(&self, t: usize) -> usize {
        self.adjacency[t].len()
    }

    pub fn oriented_count(&self) -> usize {
        2 * self.edges.len()
    }

    /// `(tail, head)` of an oriented edge index.
    pub fn oriented(&self, i: usize) -> (usize, usize) {
        let (u, v) = self.edges[i / 2];
        if i & 1 == 0 {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn oriented_index(&self, tail: usize, head: usize) -> Option<usize> {
        self.edges.iter().enumerate().find_map(|(k, &(u, v))| {
            if (u, v) == (tail, head) {
                Some(2 * k)
            } else if (v, u) == (tail, head) {
                Some(2 * k + 1)
            } else {
                None
            }
        })
    }

    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adjacency[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Nodes reachable from `start` without entering `blocked`.
    pub fn component_avoiding(&self, start: usize, blocked: usize) -> Vec<usize> {
        let mut seen = vec![false; self.node_count()];
        seen[blocked] = true;
        seen[start] = true;
        let mut stack = vec![start];
        let mut out = Vec::new();
        while let Some(x) = stack.pop() {
            out.push(x);
            for &y in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }
}

/// The edge tree set of a tree, with the oriented edge behind each element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeTreeSet {
    pub system: SeparationSystem,
    pub oriented_edges: Vec<(usize, usize)>,
}

/// Oriented edges of `tree` under the path ordering: `(x,y) < (u,v)` iff the
/// edges differ and the path between them runs from `y` to `u`.
pub fn edge_tree_set(tree: &GraphTree) -> EdgeTreeSet {
    let n = tree.node_count();
    let m = tree.oriented_count();
    let dist: Vec<Vec<usize>> = (0..n).map(|t| tree.distances_from(t)).collect();
    let to_edge = |x: usize, k: usize| {
        let (u, v) = tree.edges[k];
        dist[x][u].min(dist[x][v])
    };
    let oriented_edges: Vec<(usize, usize)> = (0..m).map(|i| tree.oriented(i)).collect();
    let mut le = vec![FixedBitSet::with_capacity(m); m];
    for i in 0..m {
        le[i].insert(i);
        let (x, y) = oriented_edges[i];
        for (j, &(u, v)) in oriented_edges.iter().enumerate() {
            if i / 2 == j / 2 {
                continue;
            }
            if to_edge(y, j / 2) < to_edge(x, j / 2) && to_edge(u, i / 2) < to_edge(v, i / 2) {
                le[i].insert(j);
            }
        }
    }
    let inv = (0..m).map(|i| i ^ 1).collect();
    let labels = oriented_edges
        .iter()
        .map(|&(x, y)| format!("({},{})", tree.label(x), tree.label(y)))
        .collect();
    let system = SeparationSystem::from_order(inv, le)
        .and_then(|s| s.with_labels(labels))
        .expect("path ordering of a tree is a separation system");
    debug_assert!(system.is_tree_set() && system.is_regular());
    EdgeTreeSet { system, oriented_edges }
}

fn check_node(tree: &GraphTree, t: usize) -> Result<(), TreeError> {
    if t < tree.node_count() {
        Ok(())
    } else {
        Err(TreeError::UnknownNode(t.to_string()))
    }
}

/// Oriented edges at `t` pointing towards `t`.
pub fn oriented_star_at(tree: &GraphTree, t: usize) -> Result<Members, TreeError> {
    check_node(tree, t)?;
    Ok((0..tree.oriented_count()).filter(|&i| tree.oriented(i).1 == t).collect())
}

/// The orientation of the edge tree set pointing every edge towards `t`.
pub fn node_orientation(tree: &GraphTree, t: usize) -> Result<Members, TreeError> {
    check_node(tree, t)?;
    let dist = tree.distances_from(t);
    Ok((0..tree.oriented_count())
        .filter(|&i| {
            let (x, y) = tree.oriented(i);
            dist[y] < dist[x]
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingReport {
    /// Oriented star at each node, by node index.
    pub stars: Vec<Members>,
}

/// Compares the splitting stars of the edge tree set with the oriented stars
/// at the nodes.
pub fn check_splitting_stars(
    tree: &GraphTree,
    limits: &Limits,
) -> Result<SplittingReport, BridgeError> {
    let ets = edge_tree_set(tree);
    let mut splitting: Vec<Members> =
        orient::splitting_stars(&ets.system, limits)?.into_iter().map(|s| s.star).collect();
    let stars =
        (0..tree.node_count()).map(|t| oriented_star_at(tree, t)).collect::<Result<Vec<_>, _>>()?;
    let mut expected = stars.clone();
    splitting.sort();
    expected.sort();
    if splitting != expected {
        return Err(BridgeError::Mismatch(format!(
            "{} splitting stars, {} nodes",
            splitting.len(),
            expected.len()
        )));
    }
    Ok(SplittingReport { stars })
}

/// The tree whose nodes are the consistent orientations of a tree set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFromSet {
    pub tree: GraphTree,
    /// Orientation at each node, by node index.
    pub orientations: Vec<Members>,
    /// Oriented tree-edge index of each element of the tree set.
    pub edge_of: Vec<usize>,
}

/// Builds `T(τ)`: nodes are the consistent orientations, and each separation
/// `s` is an edge from the orientation where `inv(s)` is maximal to the one
/// where `s` is maximal. The empty tree set gives a single node.
pub fn tree_from_treeset(tau: &SeparationSystem) -> Result<TreeFromSet, BridgeError> {
    if !tau.is_tree_set() {
        return Err(BridgeError::NotATreeSet);
    }
    let orientations = orient::tree_set_orientations(tau)?;
    let node_of = |members: &Members| {
        orientations.binary_search(members).expect("orientation with a given maximum is consistent")
    };
    let limits = Limits::default();
    let mut edges = Vec::new();
    let mut edge_of = vec![0; tau.len()];
    for (k, s) in tau.separations().into_iter().enumerate() {
        let head = node_of(&orient::orientation_with_max(tau, s, &limits)?);
        let tail = node_of(&orient::orientation_with_max(tau, tau.inv(s), &limits)?);
        edges.push((tail, head));
        edge_of[s] = 2 * k;
        edge_of[tau.inv(s)] = 2 * k + 1;
    }
    let labels = orientations.iter().map(|o| tau.fingerprint(o)).collect();
    let tree = GraphTree::new(labels, edges)?;
    Ok(TreeFromSet { tree, orientations, edge_of })
}

/// Checks that the identity is an isomorphism between a finite regular tree
/// set and the edge tree set of the tree built from it.
pub fn verify_identity_isomorphism(tau: &SeparationSystem) -> Result<bool, BridgeError> {
    if !tau.is_tree_set() || !tau.is_regular() {
        return Err(BridgeError::NotRegular);
    }
    let built = tree_from_treeset(tau)?;
    let ets = edge_tree_set(&built.tree);
    Ok(tau.is_isomorphism_onto(&ets.system, &built.edge_of))
}

/// Checks that `t ↦ O_t` is a graph isomorphism from `tree` onto the tree
/// rebuilt from its edge tree set.
pub fn verify_node_bijection(tree: &GraphTree) -> Result<bool, BridgeError> {
    let ets = edge_tree_set(tree);
    let built = tree_from_treeset(&ets.system)?;
    if built.tree.node_count() != tree.node_count() {
        return Ok(false);
    }
    let mut image = Vec::with_capacity(tree.node_count());
    for t in 0..tree.node_count() {
        let o = node_orientation(tree, t)?;
        match built.orientations.binary_search(&o) {
            Ok(pos) => image.push(pos),
            Err(_) => return Ok(false),
        }
    }
    let mut sorted = image.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != image.len() {
        return Ok(false);
    }
    for a in 0..tree.node_count() {
        for b in 0..tree.node_count() {
            if tree.adjacent(a, b) != built.tree.adjacent(image[a], image[b]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
