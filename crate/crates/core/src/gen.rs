//! Seeded generators for trees, order trees, nested systems and S-trees.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::orderbridge::{OrderTree, Poset};
use crate::stree::{STree, StarFamily};
use crate::system::{Members, SeparationSystem};
use crate::treebridge::{edge_tree_set, GraphTree};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn node_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i}")).collect()
}

/// A tree on `nodes` nodes, each attached to a uniformly chosen earlier one.
pub fn random_tree<R: Rng>(rng: &mut R, nodes: usize) -> GraphTree {
    let edges = (1..nodes.max(1)).map(|i| (rng.gen_range(0..i), i)).collect();
    GraphTree::new(node_labels(nodes.max(1)), edges).expect("random attachment gives a tree")
}

pub fn path_tree(nodes: usize) -> GraphTree {
    GraphTree::new(node_labels(nodes), (1..nodes).map(|i| (i - 1, i)).collect()).expect("path")
}

/// A centre `n0` with `leaves` leaves.
pub fn star_tree(leaves: usize) -> GraphTree {
    GraphTree::new(node_labels(leaves + 1), (1..=leaves).map(|i| (0, i)).collect()).expect("star")
}

/// A spine path with `legs` leaves hanging off every spine node.
pub fn caterpillar(spine: usize, legs: usize) -> GraphTree {
    let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
    let mut next = spine;
    for s in 0..spine {
        for _ in 0..legs {
            edges.push((s, next));
            next += 1;
        }
    }
    GraphTree::new(node_labels(next), edges).expect("caterpillar")
}

/// The complete binary tree of the given depth, with the root's two
/// subtrees joined through a root of degree 3 so that no node has degree 2.
pub fn cubic_tree(depth: usize) -> GraphTree {
    let mut edges = Vec::new();
    let mut frontier = vec![0];
    let mut next = 1;
    for level in 0..depth {
        let mut grown = Vec::new();
        for &t in &frontier {
            let children = if level == 0 { 3 } else { 2 };
            for _ in 0..children {
                edges.push((t, next));
                grown.push(next);
                next += 1;
            }
        }
        frontier = grown;
    }
    GraphTree::new(node_labels(next), edges).expect("cubic tree")
}

/// An order tree on `n` elements: a random forest, with each element above
/// its ancestors.
pub fn random_order_tree<R: Rng>(rng: &mut R, n: usize) -> OrderTree {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut generators = Vec::new();
    for k in 1..n {
        if rng.gen_bool(0.7) {
            generators.push((order[rng.gen_range(0..k)], order[k]));
        }
    }
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    OrderTree::new(Poset::new(labels, &generators).expect("forest order is acyclic"))
        .expect("forest order has chain down-sets")
}

/// Shape of a random nested system.
#[derive(Debug, Clone, Copy)]
pub struct NestedShape {
    pub nodes: usize,
    /// Chance that a leaf edge becomes small.
    pub small_leaf: f64,
    /// Number of trivial separations to plant.
    pub trivial: usize,
}

/// The edge tree set of a random tree, with some leaf edges made small and
/// some trivial separations planted below both orientations of an existing
/// separation. Indices `0..2|E|` are the oriented edges of the returned tree.
pub fn random_nested_system<R: Rng>(
    rng: &mut R,
    shape: NestedShape,
) -> (GraphTree, SeparationSystem) {
    let tree = random_tree(rng, shape.nodes);
    let base = edge_tree_set(&tree).system;
    let m = base.len();
    let mut generators = base.strict_pairs();
    let mut labels: Vec<String> = (0..m).map(|i| base.label(i)).collect();
    for i in 0..m {
        let (x, _) = tree.oriented(i);
        if tree.degree(x) == 1 && tree.edge_count() > 1 && rng.gen_bool(shape.small_leaf) {
            generators.push((i, i ^ 1));
        }
    }
    let mut inv: Vec<usize> = (0..m).map(|i| i ^ 1).collect();
    if m > 0 {
        for k in 0..shape.trivial {
            let r = m + 2 * k;
            let witness = rng.gen_range(0..inv.len());
            generators.push((r, witness));
            generators.push((r, inv[witness]));
            inv.extend([r + 1, r]);
            labels.extend([format!("r{k}"), format!("r{k}*")]);
        }
    }
    let sys = SeparationSystem::new(inv.len(), inv, &generators)
        .and_then(|s| s.with_labels(labels))
        .expect("planted relations keep a separation system");
    debug_assert!(sys.is_nested());
    (tree, sys)
}

/// Shape of a random S-tree.
#[derive(Debug, Clone, Copy)]
pub struct STreeShape {
    pub system: NestedShape,
    pub max_nodes: usize,
    pub injections: usize,
}

/// An S-tree over stars: the identity labelling of a random tree into a
/// nested system grown from it, then damaged by duplicating branches,
/// subdividing edges and hanging trivially labelled pendants. Returns the
/// family of its node images.
pub fn random_stree<R: Rng>(rng: &mut R, shape: STreeShape) -> (STree, StarFamily) {
    let (tree, host) = random_nested_system(rng, shape.system);
    let alpha: Vec<usize> = (0..tree.oriented_count()).collect();
    let host = Arc::new(host);
    let mut labels: Vec<String> = tree.labels().to_vec();
    let mut edges: Vec<((usize, usize), usize)> =
        (0..tree.edge_count()).map(|k| (tree.edges()[k], alpha[2 * k])).collect();
    let trivial: Vec<usize> = (0..host.len()).filter(|&r| host.is_trivial(r)).collect();
    let build = |labels: &[String], edges: &[((usize, usize), usize)]| {
        let tree = GraphTree::new(labels.to_vec(), edges.iter().map(|&(e, _)| e).collect())
            .expect("injections keep a tree");
        let alpha = edges.iter().flat_map(|&(_, s)| [s, host.inv(s)]).collect();
        STree::new(tree, alpha, Arc::clone(&host)).expect("injections keep alpha involutive")
    };
    for _ in 0..shape.injections {
        let st = build(&labels, &edges);
        let current = st.tree();
        if current.edge_count() == 0 {
            break;
        }
        let n = current.node_count();
        let i = rng.gen_range(0..current.oriented_count());
        let (t, towards) = current.oriented(i);
        match rng.gen_range(0..3) {
            0 => {
                let branch = current.component_avoiding(towards, t);
                if n + branch.len() > shape.max_nodes {
                    continue;
                }
                let copy = |x: usize| n + branch.iter().position(|&b| b == x).expect("in branch");
                for &x in &branch {
                    labels.push(format!("{}'{}", current.label(x), labels.len()));
                }
                edges.push(((t, copy(towards)), st.label_of(t, towards).expect("edge")));
                for &((a, b), s) in edges.clone().iter() {
                    if branch.contains(&a) && branch.contains(&b) {
                        edges.push(((copy(a), copy(b)), s));
                    }
                }
            }
            1 => {
                if n + 1 > shape.max_nodes {
                    continue;
                }
                let k = i / 2;
                let ((a, b), s) = edges[k];
                labels.push(format!("w{}", labels.len()));
                edges[k] = ((a, n), s);
                edges.push(((n, b), s));
            }
            _ => {
                let Some(&r) = trivial.choose(rng) else { continue };
                let mut image = st.node_image(t);
                image.insert(r);
                if n + 1 > shape.max_nodes || !host.is_star(&image) {
                    continue;
                }
                labels.push(format!("p{}", labels.len()));
                edges.push(((n, t), r));
            }
        }
    }
    let st = build(&labels, &edges);
    let family = StarFamily::of(&st);
    debug_assert!(family.stars_only(&host));
    (st, family)
}

/// Random stars of a system, for padding families.
pub fn random_stars<R: Rng>(rng: &mut R, sys: &SeparationSystem, count: usize) -> Vec<Members> {
    let mut out = Vec::new();
    for _ in 0..count * 4 {
        if out.len() == count || sys.is_empty() {
            break;
        }
        let size = rng.gen_range(1..=3.min(sys.len()));
        let candidate: Members = (0..size).map(|_| rng.gen_range(0..sys.len())).collect();
        if sys.is_star(&candidate) {
            out.push(candidate);
        }
    }
    out
}
