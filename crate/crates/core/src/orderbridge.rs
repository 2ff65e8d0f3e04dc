//! Order trees and consistently oriented regular tree sets.
//!
//! An order tree `(X, <)` extends to a tree set on `X ⊎ X*`; the element `x`
//! keeps index `i` and `x*` gets index `i + |X|`. Deleting a consistent
//! orientation from a regular tree set leaves an order tree.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::orient;
use crate::system::{Members, SeparationSystem, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("element {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("relation has a cycle through {0}")]
    NotAPoset(usize),
    #[error("down-set of {0} is not a chain")]
    NotAnOrderTree(usize),
    #[error("extended order is not a separation system: {0}")]
    System(#[from] SystemError),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// A finite poset stored as its strict order closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    lt: Vec<FixedBitSet>,
}

impl Poset {
    /// Strict order generated by `generators` (`(a, b)` meaning `a < b`).
    pub fn new(labels: Vec<String>, generators: &[(usize, usize)]) -> Result<Self, OrderError> {
        let n = labels.len();
        let mut lt = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in generators {
            if a >= n || b >= n {
                return Err(OrderError::IndexOutOfRange(a.max(b)));
            }
            lt[a].insert(b);
        }
        for k in 0..n {
            let row_k = lt[k].clone();
            for row in lt.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| lt[i].contains(i)) {
            return Err(OrderError::NotAPoset(i));
        }
        Ok(Self { labels, lt })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.lt[a].contains(b)
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        a == b || self.lt(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.le(a, b) || self.le(b, a)
    }

    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len()).flat_map(|a| self.lt[a].ones().map(move |b| (a, b))).collect()
    }

    /// First element whose strict down-set is not a chain.
    fn non_chain_down_set(&self) -> Option<usize> {
        (0..self.len()).find(|&t| {
            let below: Vec<usize> = (0..self.len()).filter(|&s| self.lt(s, t)).collect();
            below
                .iter()
                .enumerate()
                .any(|(k, &a)| below[k + 1..].iter().any(|&b| !self.comparable(a, b)))
        })
    }

    pub fn is_order_tree(&self) -> bool {
        self.non_chain_down_set().is_none()
    }

    /// An order tree in which any two elements have a common lower bound.
    pub fn is_connected_order_tree(&self) -> bool {
        self.is_order_tree()
            && (0..self.len()).all(|a| {
                (0..self.len()).all(|b| (0..self.len()).any(|c| self.le(c, a) && self.le(c, b)))
            })
    }
}

/// A poset whose strict down-sets are chains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderTree(Poset);

impl OrderTree {
    pub fn new(poset: Poset) -> Result<Self, OrderError> {
        match poset.non_chain_down_set() {
            Some(t) => Err(OrderError::NotAnOrderTree(t)),
            None => Ok(Self(poset)),
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A tree set together with a consistent orientation of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedTreeSet {
    pub system: SeparationSystem,
    pub orientation: Members,
}

/// Extends an order tree to the regular tree set on `X ⊎ X*`:
/// `x* < y*` iff `x > y`, and `x* < y` iff `x, y` are incomparable.
/// The orientation is `X*`.
///
/// The relation is handed over as a complete order, so its transitivity is
/// verified rather than forced by a closure.
pub fn treeset_from_order_tree(tree: &OrderTree) -> Result<OrientedTreeSet, OrderError> {
    let poset = tree.poset();
    let n = poset.len();
    let mut le = vec![FixedBitSet::with_capacity(2 * n); 2 * n];
    for x in 0..n {
        le[x].insert(x);
        le[x + n].insert(x + n);
        for y in 0..n {
            if poset.lt(x, y) {
                le[x].insert(y);
                le[y + n].insert(x + n);
            } else if x != y && !poset.comparable(x, y) {
                le[x + n].insert(y);
            }
        }
    }
    let inv = (0..2 * n).map(|i| if i < n { i + n } else { i - n }).collect();
    let labels = poset
        .labels()
        .iter()
        .cloned()
        .chain(poset.labels().iter().map(|l| format!("{l}*")))
        .collect();
    let system = SeparationSystem::from_order(inv, le)?.with_labels(labels)?;
    Ok(OrientedTreeSet { system, orientation: (n..2 * n).collect() })
}

fn check_oriented(tau: &SeparationSystem, orientation: &Members) -> Result<(), OrderError> {
    if !tau.is_tree_set() || !tau.is_regular() {
        return Err(OrderError::PreconditionViolated("not a regular tree set".into()));
    }
    if let Some(&i) = orientation.iter().find(|&&i| i >= tau.len()) {
        return Err(OrderError::IndexOutOfRange(i));
    }
    if !orient::is_full(tau, orientation) || !orient::is_consistent(tau, orientation) {
        return Err(OrderError::PreconditionViolated("not a full consistent orientation".into()));
    }
    Ok(())
}

/// An order tree carved out of a tree set, with the tree-set index of each
/// of its elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderTreeIn {
    pub tree: OrderTree,
    pub elements: Vec<usize>,
}

/// The subposet induced on the complement of a consistent orientation.
pub fn order_tree_from_oriented(
    tau: &SeparationSystem,
    orientation: &Members,
) -> Result<OrderTreeIn, OrderError> {
    check_oriented(tau, orientation)?;
    let elements: Vec<usize> = (0..tau.len()).filter(|i| !orientation.contains(i)).collect();
    let generators: Vec<(usize, usize)> = (0..elements.len())
        .flat_map(|a| (0..elements.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| tau.lt(elements[a], elements[b]))
        .collect();
    let labels = elements.iter().map(|&i| tau.label(i)).collect();
    let tree = OrderTree::new(Poset::new(labels, &generators)?)?;
    Ok(OrderTreeIn { tree, elements })
}

/// The canonization of a consistently oriented tree set: identity on the
/// complement of the orientation, `x ↦ (inv x)*` on the orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonization {
    /// Image in `target` of each element of the input tree set.
    pub map: Vec<usize>,
    pub target: OrientedTreeSet,
}

pub fn canonize(tau: &SeparationSystem, orientation: &Members) -> Result<Canonization, OrderError> {
    let carved = order_tree_from_oriented(tau, orientation)?;
    let target = treeset_from_order_tree(&carved.tree)?;
    let n = carved.elements.len();
    let position = |i: usize| {
        carved.elements.binary_search(&i).expect("complement of an orientation is its inverse")
    };
    let map: Vec<usize> = (0..tau.len())
        .map(|i| if orientation.contains(&i) { position(tau.inv(i)) + n } else { position(i) })
        .collect();
    if !tau.is_isomorphism_onto(&target.system, &map) {
        return Err(OrderError::PreconditionViolated("canonization is not an isomorphism".into()));
    }
    let image: Members = orientation.iter().map(|&i| map[i]).collect();
    if image != target.orientation {
        return Err(OrderError::PreconditionViolated(
            "canonization does not map the orientation onto X*".into(),
        ));
    }
    Ok(Canonization { map, target })
}

/// Extends an order tree and carves it back out; checks the identity on the
/// ground set is an order isomorphism.
pub fn verify_order_roundtrip(tree: &OrderTree) -> Result<bool, OrderError> {
    let extended = treeset_from_order_tree(tree)?;
    let back = order_tree_from_oriented(&extended.system, &extended.orientation)?;
    let n = tree.len();
    if back.elements != (0..n).collect::<Vec<_>>() {
        return Ok(false);
    }
    Ok((0..n).all(|a| (0..n).all(|b| tree.poset().lt(a, b) == back.tree.poset().lt(a, b))))
}

/// Checks that a regular tree set induces on `X ∪ X*` exactly the canonical
/// extension of the order tree `(X, ≤)`.
pub fn check_unique_extension(tau: &SeparationSystem, x: &Members) -> Result<bool, OrderError> {
    if !tau.is_tree_set() || !tau.is_regular() {
        return Err(OrderError::PreconditionViolated("not a regular tree set".into()));
    }
    if let Some(&i) = x.iter().find(|&&i| i >= tau.len()) {
        return Err(OrderError::IndexOutOfRange(i));
    }
    if !orient::is_antisymmetric(tau, x) {
        return Err(OrderError::PreconditionViolated("X is not antisymmetric".into()));
    }
    let elements: Vec<usize> = x.iter().copied().collect();
    let inverses: Members = elements.iter().map(|&i| tau.inv(i)).collect();
    if !orient::is_consistent(tau, &inverses) {
        return Err(OrderError::PreconditionViolated("X* is not consistent".into()));
    }
    let n = elements.len();
    let generators: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| tau.lt(elements[a], elements[b]))
        .collect();
    let labels = elements.iter().map(|&i| tau.label(i)).collect();
    let tree = OrderTree::new(Poset::new(labels, &generators)?)
        .map_err(|_| OrderError::PreconditionViolated("(X, <=) is not an order tree".into()))?;
    let extended = treeset_from_order_tree(&tree)?;
    let host = |k: usize| if k < n { elements[k] } else { tau.inv(elements[k - n]) };
    Ok((0..2 * n).all(|a| {
        (0..2 * n).all(|b| extended.system.le(a, b) == tau.le(host(a), host(b)))
            && host(extended.system.inv(a)) == tau.inv(host(a))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poset(n: usize, lt: &[(usize, usize)]) -> Poset {
        let labels = (0..n).map(|i| ((b'x' + i as u8) as char).to_string()).collect();
        Poset::new(labels, lt).unwrap()
    }

    #[test]
    fn order_tree_predicates() {
        let antichain = poset(2, &[]);
        assert!(antichain.is_order_tree());
        assert!(!antichain.is_connected_order_tree());
        let chain = poset(3, &[(0, 1), (1, 2)]);
        assert!(chain.is_connected_order_tree());
        let vee = poset(3, &[(0, 2), (1, 2)]);
        assert!(!vee.is_order_tree());
        assert_eq!(OrderTree::new(vee), Err(OrderError::NotAnOrderTree(2)));
        assert_eq!(
            Poset::new(vec!["a".into(), "b".into()], &[(0, 1), (1, 0)]).unwrap_err(),
            OrderError::NotAPoset(0)
        );
    }

    #[test]
    fn antichain_extension() {
        let tree = OrderTree::new(poset(2, &[])).unwrap();
        let ext = treeset_from_order_tree(&tree).unwrap();
        // x=0 y=1 x*=2 y*=3: x* < y and y* < x.
        assert_eq!(ext.system.strict_pairs(), vec![(2, 1), (3, 0)]);
        assert!(ext.system.is_tree_set() && ext.system.is_regular());
        assert!(orient::is_consistent(&ext.system, &ext.orientation));
    }

    #[test]
    fn chain_extension() {
        let tree = OrderTree::new(poset(2, &[(0, 1)])).unwrap();
        let ext = treeset_from_order_tree(&tree).unwrap();
        assert_eq!(ext.system.strict_pairs(), vec![(0, 1), (3, 2)]);
    }

    #[test]
    fn antichain_round_trip() {
        let tree = OrderTree::new(poset(2, &[])).unwrap();
        let ext = treeset_from_order_tree(&tree).unwrap();
        let back = order_tree_from_oriented(&ext.system, &ext.orientation).unwrap();
        assert_eq!(back.elements, vec![0, 1]);
        assert!(back.tree.poset().strict_pairs().is_empty());
        let canon = canonize(&ext.system, &ext.orientation).unwrap();
        assert_eq!(canon.map, vec![0, 1, 2, 3]);
        assert!(verify_order_roundtrip(&tree).unwrap());
    }

    #[test]
    fn chain_round_trip() {
        let tree = OrderTree::new(poset(5, &[(0, 1), (1, 2), (2, 3), (3, 4)])).unwrap();
        assert!(verify_order_roundtrip(&tree).unwrap());
        let ext = treeset_from_order_tree(&tree).unwrap();
        let canon = canonize(&ext.system, &ext.orientation).unwrap();
        assert_eq!(canon.target.system.strict_pairs().len(), ext.system.strict_pairs().len());
    }

    #[test]
    fn inconsistent_orientation_rejected() {
        let tree = OrderTree::new(poset(2, &[(0, 1)])).unwrap();
        let ext = treeset_from_order_tree(&tree).unwrap();
        // x < y, so x* and y point away from each other.
        let bad: Members = [2, 1].into_iter().collect();
        assert!(!orient::is_consistent(&ext.system, &bad));
        assert!(matches!(
            order_tree_from_oriented(&ext.system, &bad),
            Err(OrderError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn unique_extension() {
        let tree = OrderTree::new(poset(3, &[(0, 1)])).unwrap();
        let ext = treeset_from_order_tree(&tree).unwrap();
        let x: Members = (0..3).collect();
        assert!(check_unique_extension(&ext.system, &x).unwrap());
        let single: Members = [1].into_iter().collect();
        assert!(check_unique_extension(&ext.system, &single).unwrap());
        let inconsistent: Members = [0, 4].into_iter().collect();
        let inverses: Members = [3, 1].into_iter().collect();
        assert!(!orient::is_consistent(&ext.system, &inverses));
        assert!(matches!(
            check_unique_extension(&ext.system, &inconsistent),
            Err(OrderError::PreconditionViolated(_))
        ));
    }
}
