//! Tree-decompositions of finite graphs and the separations along their
//! tree edges.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::orient::Limits;
use crate::stree::{self, STree, STreeError, StarFamily};
use crate::system::{Members, SeparationSystem};
use crate::treebridge::GraphTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("loop at {0}")]
    Loop(String),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(String, String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("separations are not nested")]
    NotNested,
    #[error("separations contain a trivial or degenerate element")]
    NotEssential,
    #[error("not a set of separations of the graph: {0}")]
    NotSeparationsOfG(String),
    #[error(transparent)]
    STree(#[from] STreeError),
}

/// A finite simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut pairs = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= vertices.len() || v >= vertices.len() {
                return Err(GraphError::UnknownVertex(u.max(v).to_string()));
            }
            if u == v {
                return Err(GraphError::Loop(vertices[u].clone()));
            }
            if !pairs.insert((u.min(v), u.max(v))) {
                return Err(GraphError::ParallelEdge(vertices[u].clone(), vertices[v].clone()));
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn from_labelled(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let labels: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
        let index = |l: &str| {
            labels.iter().position(|v| v == l).ok_or_else(|| GraphError::UnknownVertex(l.into()))
        };
        let edges = edges
            .iter()
            .map(|&(u, v)| Ok((index(u)?, index(v)?)))
            .collect::<Result<_, GraphError>>()?;
        Self::new(labels, edges)
    }

    /// The `rows × cols` grid with vertex `r*cols + c` named `r,c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let vertices = (0..rows).flat_map(|r| (0..cols).map(move |c| format!("{r},{c}"))).collect();
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Self::new(vertices, edges).expect("grid is simple")
    }

    /// The path `v0 - v1 - ... - v(n-1)`.
    pub fn path(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("v{i}")).collect(), (1..n).map(|i| (i - 1, i)).collect())
            .expect("path is simple")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn all(&self) -> Members {
        (0..self.vertices.len()).collect()
    }

    pub fn side_label(&self, side: &Members) -> String {
        side.iter().map(|&v| self.vertices[v].as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// `A ∪ B = V` and no edge joins `A \ B` to `B \ A`.
pub fn is_graph_separation(graph: &Graph, a: &Members, b: &Members) -> bool {
    let covers = a.union(b).count() == graph.vertex_count()
        && a.iter().chain(b).all(|&v| v < graph.vertex_count());
    covers
        && graph.edges.iter().all(|&(u, v)| {
            let left = |x: usize| a.contains(&x) && !b.contains(&x);
            let right = |x: usize| b.contains(&x) && !a.contains(&x);
            !(left(u) && right(v) || left(v) && right(u))
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    graph: Graph,
    tree: GraphTree,
    parts: Vec<Members>,
}

impl TreeDecomposition {
    pub fn new(graph: Graph, tree: GraphTree, parts: Vec<Members>) -> Result<Self, GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidDecomposition(msg));
        if parts.len() != tree.node_count() {
            return bad(format!("{} parts for {} nodes", parts.len(), tree.node_count()));
        }
        if parts.iter().flatten().any(|&v| v >= graph.vertex_count()) {
            return bad("part holds an unknown vertex".into());
        }
        for v in 0..graph.vertex_count() {
            let holding: Vec<usize> = (0..parts.len()).filter(|&t| parts[t].contains(&v)).collect();
            if holding.is_empty() {
                return bad(format!("vertex {} is in no part", graph.vertices[v]));
            }
            if !connected_within(&tree, &holding) {
                return bad(format!("parts holding {} are not connected", graph.vertices[v]));
            }
        }
        for &(u, v) in &graph.edges {
            if !parts.iter().any(|p| p.contains(&u) && p.contains(&v)) {
                return bad(format!(
                    "edge {}-{} is in no part",
                    graph.vertices[u], graph.vertices[v]
                ));
            }
        }
        Ok(Self { graph, tree, parts })
    }

    /// The path decomposition with bags of `width + 1` consecutive vertices of
    /// `graph`, in vertex order.
    pub fn sliding(graph: Graph, width: usize) -> Result<Self, GraphError> {
        let n = graph.vertex_count();
        let bags = if n > width { n - width } else { 1 };
        let parts = (0..bags).map(|i| (i..(i + width + 1).min(n)).collect()).collect();
        let tree = GraphTree::new(
            (0..bags).map(|i| format!("t{i}")).collect(),
            (1..bags).map(|i| (i - 1, i)).collect(),
        )
        .map_err(|e| GraphError::InvalidDecomposition(e.to_string()))?;
        Self::new(graph, tree, parts)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn tree(&self) -> &GraphTree {
        &self.tree
    }

    pub fn parts(&self) -> &[Members] {
        &self.parts
    }

    /// Parts keyed by node label.
    pub fn parts_by_label(&self) -> BTreeMap<String, Members> {
        (0..self.parts.len())
            .map(|t| (self.tree.label(t).to_string(), self.parts[t].clone()))
            .collect()
    }
}

fn connected_within(tree: &GraphTree, nodes: &[usize]) -> bool {
    let inside: BTreeSet<usize> = nodes.iter().copied().collect();
    let mut seen = BTreeSet::from([nodes[0]]);
    let mut stack = vec![nodes[0]];
    while let Some(t) = stack.pop() {
        for &u in tree.neighbours(t) {
            if inside.contains(&u) && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen.len() == inside.len()
}

/// A system of oriented graph separations `(A, B)`, ordered by `A ⊆ C` and
/// `B ⊇ D`, with the swap as involution.
pub fn separation_system(
    graph: &Graph,
    seps: &[(Members, Members)],
) -> Result<SeparationSystem, GraphError> {
    let m = seps.len();
    let distinct: BTreeSet<&(Members, Members)> = seps.iter().collect();
    if distinct.len() != m {
        return Err(GraphError::NotSeparationsOfG("repeated separation".into()));
    }
    for (a, b) in seps {
        if !is_graph_separation(graph, a, b) {
            return Err(GraphError::NotSeparationsOfG(format!(
                "({} | {})",
                graph.side_label(a),
                graph.side_label(b)
            )));
        }
    }
    let inv = seps
        .iter()
        .map(|(a, b)| {
            seps.iter()
                .position(|(c, d)| c == b && d == a)
                .ok_or_else(|| GraphError::NotSeparationsOfG("not closed under inversion".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let le = (0..m)
        .map(|i| {
            let mut row = FixedBitSet::with_capacity(m);
            for j in 0..m {
                if seps[i].0.is_subset(&seps[j].0) && seps[i].1.is_superset(&seps[j].1) {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    let labels = seps
        .iter()
        .map(|(a, b)| format!("{}|{}", graph.side_label(a), graph.side_label(b)))
        .collect();
    SeparationSystem::from_order(inv, le)
        .and_then(|s| s.with_labels(labels))
        .map_err(|e| GraphError::NotSeparationsOfG(e.to_string()))
}

/// The S-tree of a decomposition, labelled by the distinct separations its
/// edges induce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extracted {
    pub stree: STree,
    /// The separation behind each element of the host system.
    pub separations: Vec<(Members, Members)>,
}

/// Labels each oriented tree edge `(t1, t2)` by `(U1, U2)`, the unions of
/// the parts on either side of the edge.
pub fn extract_separations(td: &TreeDecomposition) -> Result<Extracted, GraphError> {
    let tree = &td.tree;
    let side = |start: usize, blocked: usize| -> Members {
        tree.component_avoiding(start, blocked)
            .into_iter()
            .flat_map(|t| td.parts[t].iter().copied())
            .collect()
    };
    let mut separations: Vec<(Members, Members)> = Vec::new();
    let mut labels = Vec::with_capacity(tree.oriented_count());
    for i in 0..tree.oriented_count() {
        let (t1, t2) = tree.oriented(i);
        let sep = (side(t1, t2), side(t2, t1));
        let adhesion: Members = td.parts[t1].intersection(&td.parts[t2]).copied().collect();
        if adhesion != sep.0.intersection(&sep.1).copied().collect::<Members>() {
            return Err(GraphError::InvalidDecomposition(format!(
                "adhesion at {}-{} differs from the separator",
                tree.label(t1),
                tree.label(t2)
            )));
        }
        let index = match separations.iter().position(|s| *s == sep) {
            Some(k) => k,
            None => {
                separations.push(sep);
                separations.len() - 1
            }
        };
        labels.push(index);
    }
    let host = separation_system(&td.graph, &separations)?;
    let stree = STree::new(tree.clone(), labels, Arc::new(host))?;
    Ok(Extracted { stree, separations })
}

/// `V_t` as the intersection of the second sides of the separations at `t`,
/// or all of `V` if there are none.
pub fn parts_from_stree(
    graph: &Graph,
    st: &STree,
    separations: &[(Members, Members)],
) -> Vec<Members> {
    (0..st.tree().node_count())
        .map(|t| {
            st.node_image(t)
                .iter()
                .fold(graph.all(), |acc, &s| acc.intersection(&separations[s].1).copied().collect())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rebuilt {
    pub decomposition: TreeDecomposition,
    pub stree: STree,
}

/// Builds a tree-decomposition of `graph` whose tree edges induce exactly
/// the given tree set of separations.
pub fn decomposition_from_treeset(
    graph: &Graph,
    seps: &[(Members, Members)],
    limits: &Limits,
) -> Result<Rebuilt, GraphError> {
    let sys = separation_system(graph, seps)?;
    if !sys.is_nested() {
        return Err(GraphError::NotNested);
    }
    if !sys.is_essential() {
        return Err(GraphError::NotEssential);
    }
    let family = StarFamily::new(stree::splitting_sets(&sys, limits)?);
    let st = stree::stree_from_treeset(&sys, &family, limits)?;
    let parts = parts_from_stree(graph, &st, seps);
    let decomposition = TreeDecomposition::new(graph.clone(), st.tree().clone(), parts)?;
    let back = extract_separations(&decomposition)?;
    let mine: BTreeSet<&(Members, Members)> = seps.iter().collect();
    let theirs: BTreeSet<&(Members, Members)> = back.separations.iter().collect();
    if mine != theirs {
        return Err(GraphError::InvalidDecomposition(
            "rebuilt decomposition induces different separations".into(),
        ));
    }
    Ok(Rebuilt { decomposition, stree: st })
}

/// Parts keyed by the set of separations at their node, for comparing
/// decompositions whose trees are built independently.
pub fn parts_by_star(
    st: &STree,
    separations: &[(Members, Members)],
    parts: &[Members],
) -> BTreeMap<BTreeSet<(Members, Members)>, Members> {
    (0..st.tree().node_count())
        .map(|t| {
            let star = st.node_image(t).iter().map(|&s| separations[s].clone()).collect();
            (star, parts[t].clone())
        })
        .collect()
}

/// Extracts the separations of `td` and rebuilds a decomposition from them;
/// true if every node's separations and part reappear.
pub fn verify_decomposition_roundtrip(
    td: &TreeDecomposition,
    limits: &Limits,
) -> Result<bool, GraphError> {
    let extracted = extract_separations(td)?;
    let rebuilt = decomposition_from_treeset(&td.graph, &extracted.separations, limits)?;
    let before = parts_by_star(&extracted.stree, &extracted.separations, &td.parts);
    let after =
        parts_by_star(&rebuilt.stree, &extracted.separations, rebuilt.decomposition.parts());
    Ok(before == after && td.tree.node_count() == rebuilt.decomposition.tree.node_count())
}
