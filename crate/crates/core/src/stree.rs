//! S-trees: trees whose oriented edges are labelled by a separation system,
//! compatibly with the involution.
//!
//! Canonicalization runs prune, tighten and essentialize, each to a fixed
//! point, always acting on the least witness first.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::orient::{self, Limits, OrientError};
use crate::system::{Induced, Members, SeparationSystem, SystemError};
use crate::treebridge::{self, edge_tree_set, BridgeError, GraphTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum STreeError {
    #[error("alpha has {got} labels for {expected} oriented edges")]
    AlphaLength { expected: usize, got: usize },
    #[error("label {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("alpha does not commute with inversion on oriented edge {0}")]
    NotInvolutive(usize),
    #[error("system has a degenerate element {0}")]
    DegenerateElement(usize),
    #[error("system is not nested")]
    NotNested,
    #[error("family contains a set that is not a star")]
    NotStars,
    #[error("splitting set {0} is not in the family")]
    NotOverF(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("violation found: {0}")]
    ViolationFound(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Orient(#[from] OrientError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// A tree with its oriented edges labelled by a host system. `alpha[i]` is
/// the label of oriented edge `i` of `tree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct STree {
    tree: GraphTree,
    alpha: Vec<usize>,
    host: Arc<SeparationSystem>,
}

impl STree {
    pub fn new(
        tree: GraphTree,
        alpha: Vec<usize>,
        host: Arc<SeparationSystem>,
    ) -> Result<Self, STreeError> {
        if alpha.len() != tree.oriented_count() {
            return Err(STreeError::AlphaLength {
                expected: tree.oriented_count(),
                got: alpha.len(),
            });
        }
        if let Some(&a) = alpha.iter().find(|&&a| a >= host.len()) {
            return Err(STreeError::IndexOutOfRange(a));
        }
        if let Some(i) = (0..alpha.len()).find(|&i| alpha[i ^ 1] != host.inv(alpha[i])) {
            return Err(STreeError::NotInvolutive(i));
        }
        Ok(Self { tree, alpha, host })
    }

    /// The S-tree of a tree labelled by its own edge tree set.
    pub fn identity(tree: GraphTree) -> Self {
        let ets = edge_tree_set(&tree);
        let alpha = (0..tree.oriented_count()).collect();
        Self { tree, alpha, host: Arc::new(ets.system) }
    }

    pub fn tree(&self) -> &GraphTree {
        &self.tree
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn host(&self) -> &SeparationSystem {
        &self.host
    }

    pub fn host_arc(&self) -> &Arc<SeparationSystem> {
        &self.host
    }

    /// Label of the oriented edge `(a, b)`.
    pub fn label_of(&self, a: usize, b: usize) -> Option<usize> {
        self.tree.oriented_index(a, b).map(|i| self.alpha[i])
    }

    /// The image of the oriented star at `t`.
    pub fn node_image(&self, t: usize) -> Members {
        (0..self.alpha.len())
            .filter(|&i| self.tree.oriented(i).1 == t)
            .map(|i| self.alpha[i])
            .collect()
    }

    pub fn node_images(&self) -> Vec<Members> {
        (0..self.tree.node_count()).map(|t| self.node_image(t)).collect()
    }

    pub fn image(&self) -> Members {
        self.alpha.iter().copied().collect()
    }

    /// Keeps the nodes in `keep` and the given edges, each with the label of
    /// its first orientation.
    fn rebuild(&self, keep: &Members, edges: &[((usize, usize), usize)]) -> Self {
        let position = |t: usize| keep.iter().position(|&k| k == t).expect("kept node");
        let labels = keep.iter().map(|&t| self.tree.label(t).to_string()).collect();
        let new_edges = edges.iter().map(|&((a, b), _)| (position(a), position(b))).collect();
        let tree = GraphTree::new(labels, new_edges).expect("rebuilt S-tree is a tree");
        let alpha = edges.iter().flat_map(|&(_, s)| [s, self.host.inv(s)]).collect();
        Self { tree, alpha, host: Arc::clone(&self.host) }
    }

    fn labelled_edges(&self) -> Vec<((usize, usize), usize)> {
        (0..self.tree.edge_count()).map(|k| (self.tree.edges()[k], self.alpha[2 * k])).collect()
    }

    fn labels_of(&self, nodes: &[usize]) -> Vec<String> {
        nodes.iter().map(|&t| self.tree.label(t).to_string()).collect()
    }

    /// Removes the nodes in `drop` and every edge touching them.
    fn without(&self, drop: &BTreeSet<usize>) -> Self {
        let keep: Members = (0..self.tree.node_count()).filter(|t| !drop.contains(t)).collect();
        let edges: Vec<_> = self
            .labelled_edges()
            .into_iter()
            .filter(|&((a, b), _)| !drop.contains(&a) && !drop.contains(&b))
            .collect();
        self.rebuild(&keep, &edges)
    }
}

/// A set of subsets of a host system.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StarFamily {
    members: BTreeSet<Members>,
}

impl StarFamily {
    pub fn new(members: impl IntoIterator<Item = Members>) -> Self {
        Self { members: members.into_iter().collect() }
    }

    /// The family of node images of an S-tree.
    pub fn of(st: &STree) -> Self {
        Self::new(st.node_images())
    }

    pub fn contains(&self, set: &Members) -> bool {
        self.members.contains(set)
    }

    pub fn insert(&mut self, set: Members) -> bool {
        self.members.insert(set)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Members> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn stars_only(&self, sys: &SeparationSystem) -> bool {
        self.members.iter().all(|m| sys.is_star(m))
    }

    /// Every member with its trivial elements deleted.
    pub fn core(&self, sys: &SeparationSystem) -> Self {
        Self::new(
            self.members
                .iter()
                .map(|m| m.iter().copied().filter(|&x| !sys.is_trivial(x)).collect()),
        )
    }
}

pub fn is_over(st: &STree, family: &StarFamily) -> bool {
    (0..st.tree.node_count()).all(|t| family.contains(&st.node_image(t)))
}

/// Whether `family` holds every co-trivial singleton of `sys`.
pub fn is_standard(sys: &SeparationSystem, family: &StarFamily) -> bool {
    (0..sys.len())
        .filter(|&r| sys.is_co_trivial(r))
        .all(|r| family.contains(&[r].into_iter().collect()))
}

/// One step of canonicalization. Nodes are named by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// `node` had two outgoing edges with equal labels; the branch through
    /// `removed[0]` went.
    Pruned { node: String, kept: String, removed: Vec<String> },
    /// `node` sat between two edges with the same label and was contracted
    /// away with its other branches; `from` is now joined to `to`.
    Contracted { node: String, from: String, to: String, removed: Vec<String> },
    /// The edge from `tail` to `head` had a trivial label; `tail` went.
    Deleted { tail: String, head: String, label: usize },
}

/// Least `(t, t', t'')` with `α(t,t') = α(t,t'')` and `t' < t''`.
fn redundancy(st: &STree) -> Option<(usize, usize, usize)> {
    let tree = &st.tree;
    (0..tree.node_count()).find_map(|t| {
        let mut nbrs = tree.neighbours(t).to_vec();
        nbrs.sort_unstable();
        nbrs.iter().enumerate().find_map(|(k, &a)| {
            nbrs[k + 1..]
                .iter()
                .find(|&&b| st.label_of(t, a) == st.label_of(t, b))
                .map(|&b| (t, a, b))
        })
    })
}

pub fn is_redundant(st: &STree) -> bool {
    redundancy(st).is_some()
}

/// Deletes redundant branches until none are left.
pub fn prune(st: &STree) -> (STree, Vec<Step>) {
    let mut current = st.clone();
    let mut log = Vec::new();
    while let Some((t, kept, dropped)) = redundancy(&current) {
        let branch = current.tree.component_avoiding(dropped, t);
        log.push(Step::Pruned {
            node: current.tree.label(t).to_string(),
            kept: current.tree.label(kept).to_string(),
            removed: current.labels_of(&branch),
        });
        current = current.without(&branch.into_iter().collect());
    }
    (current, log)
}

/// Least `(t, t', t'')` with `α(t',t) = α(t,t'')`.
fn slack(st: &STree) -> Option<(usize, usize, usize)> {
    let tree = &st.tree;
    (0..tree.node_count()).find_map(|t| {
        let mut nbrs = tree.neighbours(t).to_vec();
        nbrs.sort_unstable();
        nbrs.iter().find_map(|&a| {
            nbrs.iter()
                .find(|&&b| a != b && st.label_of(a, t) == st.label_of(t, b))
                .map(|&b| (t, a, b))
        })
    })
}

pub fn is_tight(st: &STree) -> bool {
    (0..st.tree.node_count()).all(|t| {
        let image = st.node_image(t);
        image.iter().all(|&s| s == st.host.inv(s) || !image.contains(&st.host.inv(s)))
    })
}

/// Contracts slack nodes until the S-tree is tight; prunes first.
pub fn tighten(st: &STree) -> (STree, Vec<Step>) {
    let (mut current, mut log) = prune(st);
    while let Some((t, from, to)) = slack(&current) {
        let tree = &current.tree;
        let mut removed = vec![t];
        for &x in tree.neighbours(t) {
            if x != from && x != to {
                removed.extend(tree.component_avoiding(x, t));
            }
        }
        removed.sort_unstable();
        let drop: BTreeSet<usize> = removed.iter().copied().collect();
        let s = current.label_of(from, t).expect("edge");
        let old = tree.oriented_index(from, t).expect("edge") / 2;
        let keep: Members = (0..tree.node_count()).filter(|x| !drop.contains(x)).collect();
        let edges: Vec<_> = current
            .labelled_edges()
            .into_iter()
            .enumerate()
            .filter_map(|(k, ((a, b), label))| {
                if k == old {
                    Some(((from, to), s))
                } else if drop.contains(&a) || drop.contains(&b) {
                    None
                } else {
                    Some(((a, b), label))
                }
            })
            .collect();
        log.push(Step::Contracted {
            node: tree.label(t).to_string(),
            from: tree.label(from).to_string(),
            to: tree.label(to).to_string(),
            removed: current.labels_of(&removed),
        });
        current = current.rebuild(&keep, &edges);
    }
    (current, log)
}

pub fn is_essential(st: &STree) -> bool {
    !is_redundant(st) && is_tight(st) && st.alpha.iter().all(|&s| !st.host.is_trivial(s))
}

/// The essential S-tree obtained by pruning, tightening, and deleting every
/// edge with a trivial label together with its tail, and the core of the
/// family it is over.
pub fn essentialize(
    st: &STree,
    family: &StarFamily,
) -> Result<(STree, StarFamily, Vec<Step>), STreeError> {
    let (current, mut log) = tighten(st);
    let tree = &current.tree;
    let mut tails = BTreeSet::new();
    for i in 0..current.alpha.len() {
        if current.host.is_trivial(current.alpha[i]) {
            let (tail, head) = tree.oriented(i);
            tails.insert(tail);
            log.push(Step::Deleted {
                tail: tree.label(tail).to_string(),
                head: tree.label(head).to_string(),
                label: current.alpha[i],
            });
        }
    }
    let remaining = tree.node_count() - tails.len();
    let kept_edges = current
        .labelled_edges()
        .iter()
        .filter(|((a, b), _)| !tails.contains(a) && !tails.contains(b))
        .count();
    if remaining == 0 || kept_edges + 1 != remaining {
        return Err(STreeError::ViolationFound(
            "trivially labelled edges are not closed down".into(),
        ));
    }
    let out = current.without(&tails);
    Ok((out, family.core(&current.host), log))
}

fn over_stars(st: &STree) -> bool {
    (0..st.tree.node_count()).all(|t| st.host.is_star(&st.node_image(t)))
}

/// Exceptions met while checking that `α` reflects strict inequalities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderReport {
    pub pairs_checked: usize,
    /// `α(e) = α(inv f)` is small.
    pub small_equal: usize,
    /// `α(e)` is trivial.
    pub trivial_e: usize,
    /// `α(inv f)` is trivial.
    pub trivial_f: usize,
}

impl OrderReport {
    pub fn exceptions(&self) -> usize {
        self.small_equal + self.trivial_e + self.trivial_f
    }
}

fn require_irredundant_over_stars(st: &STree) -> Result<(), STreeError> {
    if is_redundant(st) {
        return Err(STreeError::PreconditionViolated("S-tree is redundant".into()));
    }
    if !over_stars(st) {
        return Err(STreeError::PreconditionViolated("S-tree is not over stars".into()));
    }
    Ok(())
}

/// Checks that `α` preserves the order of oriented edges, that its image is
/// nested, and that `α(e) < α(f)` forces `e < f` outside the known
/// exceptions.
pub fn check_order_preserving(st: &STree) -> Result<OrderReport, STreeError> {
    require_irredundant_over_stars(st)?;
    let ets = edge_tree_set(&st.tree);
    let edges = &ets.system;
    let host = &st.host;
    let alpha = &st.alpha;
    let mut report = OrderReport::default();
    for e in 0..alpha.len() {
        for f in 0..alpha.len() {
            report.pairs_checked += 1;
            let (ae, af) = (alpha[e], alpha[f]);
            if edges.le(e, f) && !host.le(ae, af) {
                return Err(STreeError::ViolationFound(format!(
                    "oriented edges {e} <= {f} but labels {ae}, {af} are not"
                )));
            }
            if !host.nested_pair(ae, af) {
                return Err(STreeError::ViolationFound(format!("labels {ae} and {af} cross")));
            }
            if host.lt(ae, af) && !edges.lt(e, f) {
                let af_inv = alpha[f ^ 1];
                if ae == af_inv && host.is_small(ae) {
                    report.small_equal += 1;
                } else if host.is_trivial(ae) {
                    report.trivial_e += 1;
                } else if host.is_trivial(af_inv) {
                    report.trivial_f += 1;
                } else {
                    return Err(STreeError::ViolationFound(format!(
                        "labels {ae} < {af} but oriented edges {e}, {f} are not"
                    )));
                }
            }
        }
    }
    Ok(report)
}

/// Counts pairs of edges pointing towards each other with equal labels, and
/// checks each such label is trivial.
pub fn check_no_facing_duplicates(st: &STree) -> Result<usize, STreeError> {
    require_irredundant_over_stars(st)?;
    let edges = edge_tree_set(&st.tree).system;
    let mut facing = 0;
    for e in 0..st.alpha.len() {
        for f in 0..st.alpha.len() {
            if e / 2 != f / 2 && edges.lt(e, f ^ 1) && st.alpha[e] == st.alpha[f] {
                if !st.host.is_trivial(st.alpha[e]) {
                    return Err(STreeError::ViolationFound(format!(
                        "facing edges {e}, {f} share the nontrivial label {}",
                        st.alpha[e]
                    )));
                }
                facing += 1;
            }
        }
    }
    Ok(facing)
}

pub fn check_injective(st: &STree) -> Result<bool, STreeError> {
    if !is_essential(st) || !over_stars(st) {
        return Err(STreeError::PreconditionViolated("S-tree is not essential over stars".into()));
    }
    let distinct: BTreeSet<usize> = st.alpha.iter().copied().collect();
    if distinct.len() != st.alpha.len() {
        return Err(STreeError::ViolationFound("alpha is not injective".into()));
    }
    Ok(true)
}

/// The sets splitting a nested system: maxima of its consistent orientations.
pub fn splitting_sets(sys: &SeparationSystem, limits: &Limits) -> Result<Vec<Members>, STreeError> {
    let mut out: Vec<Members> = orient::enumerate_consistent(sys, limits)?
        .iter()
        .map(|o| orient::maximal_elements(sys, o))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Represents a finite nested system over a family of stars by an essential
/// S-tree: the tree of the regularized essential core, labelled by the
/// identity.
pub fn stree_from_treeset(
    sys: &SeparationSystem,
    family: &StarFamily,
    limits: &Limits,
) -> Result<STree, STreeError> {
    if let Some(s) = (0..sys.len()).find(|&s| sys.is_degenerate(s)) {
        return Err(STreeError::DegenerateElement(s));
    }
    if !sys.is_nested() {
        return Err(STreeError::NotNested);
    }
    if !family.stars_only(sys) {
        return Err(STreeError::NotStars);
    }
    let splitting = splitting_sets(sys, limits)?;
    if let Some(missing) = splitting.iter().find(|s| !family.contains(s)) {
        return Err(STreeError::NotOverF(sys.fingerprint(missing)));
    }
    let core = sys.essential_core();
    let tau = core.system.regularization()?;
    let built = treebridge::tree_from_treeset(&tau)?;
    if !tau.is_isomorphism_onto(&edge_tree_set(&built.tree).system, &built.edge_of) {
        return Err(STreeError::ViolationFound("tree of the core is not isomorphic".into()));
    }
    let mut alpha = vec![0; tau.len()];
    for (x, &edge) in built.edge_of.iter().enumerate() {
        alpha[edge] = core.origin[x];
    }
    let st = STree::new(built.tree, alpha, Arc::new(sys.clone()))?;
    let mut images = st.node_images();
    images.sort();
    if images != splitting {
        return Err(STreeError::ViolationFound("node images are not the splitting sets".into()));
    }
    Ok(st)
}

/// The tree set an essential S-tree over stars spans in its host.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannedTreeSet {
    /// The regularized image, with the host index of each element.
    pub image: Induced,
    /// Position in `image` of the label of each oriented edge.
    pub map: Vec<usize>,
}

pub fn treeset_from_stree(st: &STree) -> Result<SpannedTreeSet, STreeError> {
    check_injective(st)?;
    let induced = st.host.induced(&st.image());
    if !induced.system.is_tree_set() {
        return Err(STreeError::ViolationFound("image is not a tree set".into()));
    }
    let system = induced.system.regularization()?;
    let map: Vec<usize> =
        st.alpha.iter().map(|&a| induced.position_of(a).expect("label in image")).collect();
    let edges = edge_tree_set(&st.tree).system;
    if !edges.is_isomorphism_onto(&system, &map) {
        return Err(STreeError::ViolationFound("alpha is not a tree set isomorphism".into()));
    }
    Ok(SpannedTreeSet { image: Induced { system, origin: induced.origin }, map })
}

/// The regularized essential core of `sys`, for comparison with
/// [`treeset_from_stree`].
pub fn regularized_core(sys: &SeparationSystem) -> Result<Induced, STreeError> {
    let core = sys.essential_core();
    let system = core.system.regularization()?;
    Ok(Induced { system, origin: core.origin })
}
