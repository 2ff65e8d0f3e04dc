//! Finite separation systems: a poset of oriented separations together with
//! an order-reversing involution.
//!
//! Oriented separations are dense indices `0..len()`. A separation is the
//! unordered pair `{i, inv(i)}`; it is represented by its smaller index.
//! The order is stored as a full reflexive-transitive closure, one bitset row
//! per element, so every order query is a single lookup.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// A set of oriented separation indices.
pub type Members = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("involution has {got} entries, expected {expected}")]
    InvolutionLength { expected: usize, got: usize },
    #[error("index {index} is out of range for a system of {count} elements")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("map is not an involution at index {0}")]
    BadInvolution(usize),
    #[error("relation is not antisymmetric: {0} and {1} lie below each other")]
    NotAPoset(usize, usize),
    #[error("relation is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("relation is not transitive: {0} <= {1} <= {2} but not {0} <= {2}")]
    NotTransitive(usize, usize, usize),
    #[error("involution does not reverse the order: {0} <= {1} but not inv({1}) <= inv({0})")]
    InvolutionNotOrderReversing(usize, usize),
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("system is not essential")]
    NotEssential,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationSystem {
    inv: Vec<usize>,
    le: Vec<FixedBitSet>,
    labels: Option<Vec<String>>,
}

fn check_involution(inv: &[usize]) -> Result<(), SystemError> {
    let count = inv.len();
    if let Some(&index) = inv.iter().find(|&&j| j >= count) {
        return Err(SystemError::IndexOutOfRange { index, count });
    }
    for (i, &j) in inv.iter().enumerate() {
        if inv[j] != i {
            return Err(SystemError::BadInvolution(i));
        }
    }
    Ok(())
}

fn check_pairs(count: usize, pairs: &[(usize, usize)]) -> Result<(), SystemError> {
    for &(a, b) in pairs {
        for index in [a, b] {
            if index >= count {
                return Err(SystemError::IndexOutOfRange { index, count });
            }
        }
    }
    Ok(())
}

fn transitive_closure(rows: &mut [FixedBitSet]) {
    let n = rows.len();
    for k in 0..n {
        let row_k = rows[k].clone();
        for row in rows.iter_mut() {
            if row.contains(k) {
                row.union_with(&row_k);
            }
        }
    }
}

impl SeparationSystem {
    /// Builds a system from an involution and arbitrary order generators.
    ///
    /// The dual `inv(j) <= inv(i)` of every generator `i <= j` is added before
    /// taking the reflexive-transitive closure, so the result is order-reversing
    /// whenever it is a poset at all.
    pub fn new(
        count: usize,
        inv: Vec<usize>,
        generators: &[(usize, usize)],
    ) -> Result<Self, SystemError> {
        if inv.len() != count {
            return Err(SystemError::InvolutionLength { expected: count, got: inv.len() });
        }
        check_involution(&inv)?;
        check_pairs(count, generators)?;
        let mut pairs = generators.to_vec();
        pairs.extend(generators.iter().map(|&(a, b)| (inv[b], inv[a])));
        Self::closed(inv, &pairs)
    }

    /// Builds a system whose order is the reflexive-transitive closure of
    /// `pairs`, without adding duals. Fails if the involution does not reverse
    /// the resulting order.
    pub fn from_relation(
        count: usize,
        inv: Vec<usize>,
        pairs: &[(usize, usize)],
    ) -> Result<Self, SystemError> {
        if inv.len() != count {
            return Err(SystemError::InvolutionLength { expected: count, got: inv.len() });
        }
        check_involution(&inv)?;
        check_pairs(count, pairs)?;
        Self::closed(inv, pairs)
    }

    fn closed(inv: Vec<usize>, pairs: &[(usize, usize)]) -> Result<Self, SystemError> {
        let n = inv.len();
        let mut le = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in le.iter_mut().enumerate() {
            row.insert(i);
        }
        for &(a, b) in pairs {
            le[a].insert(b);
        }
        transitive_closure(&mut le);
        Self::from_order(inv, le)
    }

    /// Wraps an order that is claimed to be complete already. Reflexivity,
    /// antisymmetry, transitivity and order reversal are all checked; nothing
    /// is added.
    pub fn from_order(inv: Vec<usize>, le: Vec<FixedBitSet>) -> Result<Self, SystemError> {
        let n = inv.len();
        check_involution(&inv)?;
        if le.len() != n {
            return Err(SystemError::InvolutionLength { expected: le.len(), got: n });
        }
        let mut le = le;
        for row in &mut le {
            row.grow(n);
            if row.len() > n {
                if let Some(index) = row.ones().find(|&j| j >= n) {
                    return Err(SystemError::IndexOutOfRange { index, count: n });
                }
            }
        }
        for (i, row) in le.iter().enumerate() {
            if !row.contains(i) {
                return Err(SystemError::NotReflexive(i));
            }
        }
        for i in 0..n {
            for j in le[i].ones() {
                if i != j && le[j].contains(i) {
                    return Err(SystemError::NotAPoset(i.min(j), i.max(j)));
                }
                if !le[j].is_subset(&le[i]) {
                    let k = le[j].difference(&le[i]).next().unwrap_or(j);
                    return Err(SystemError::NotTransitive(i, j, k));
                }
                if !le[inv[j]].contains(inv[i]) {
                    return Err(SystemError::InvolutionNotOrderReversing(i, j));
                }
            }
        }
        Ok(Self { inv, le, labels: None })
    }

    pub fn empty() -> Self {
        Self { inv: Vec::new(), le: Vec::new(), labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, SystemError> {
        if labels.len() != self.len() {
            return Err(SystemError::LabelCount { expected: self.len(), got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.inv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv.is_empty()
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inv[i]
    }

    pub fn involution(&self) -> &[usize] {
        &self.inv
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i].contains(j)
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.le[i].contains(j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.le(i, j) || self.le(j, i)
    }

    /// Elements above `i`, including `i`.
    pub fn up_set(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.le[i].ones()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The label of `i`, or its index when the system is unlabelled.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) => labels[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.inv[i] == i
    }

    /// Representative (smaller index) of the separation containing `i`.
    pub fn separation_of(&self, i: usize) -> usize {
        i.min(self.inv[i])
    }

    /// One representative per separation, ascending.
    pub fn separations(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| i <= self.inv[i]).collect()
    }

    /// All strict order pairs `(i, j)` with `i < j` in the order, sorted.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| self.le[i].ones().filter(move |&j| j != i).map(move |j| (i, j)))
            .collect()
    }

    pub fn is_small(&self, i: usize) -> bool {
        self.le(i, self.inv[i])
    }

    /// Least separation witnessing the triviality of `i`, if any.
    pub fn trivial_witness(&self, i: usize) -> Option<usize> {
        let own = self.separation_of(i);
        self.separations()
            .into_iter()
            .find(|&s| s != own && self.lt(i, s) && self.lt(i, self.inv[s]))
    }

    pub fn is_trivial(&self, i: usize) -> bool {
        self.trivial_witness(i).is_some()
    }

    pub fn is_co_trivial(&self, i: usize) -> bool {
        self.is_trivial(self.inv[i])
    }

    pub fn classify(&self) -> Classification {
        let n = self.len();
        let witness: Vec<Option<usize>> = (0..n).map(|i| self.trivial_witness(i)).collect();
        Classification {
            small: (0..n).map(|i| self.is_small(i)).collect(),
            degenerate: (0..n).map(|i| self.is_degenerate(i)).collect(),
            co_trivial: (0..n).map(|i| witness[self.inv[i]].is_some()).collect(),
            witness,
        }
    }

    /// Two separations are nested if they have comparable orientations.
    pub fn nested_pair(&self, r: usize, s: usize) -> bool {
        self.comparable(r, s) || self.comparable(r, self.inv[s])
    }

    pub fn is_nested(&self) -> bool {
        let seps = self.separations();
        seps.iter().enumerate().all(|(k, &r)| seps[k + 1..].iter().all(|&s| self.nested_pair(r, s)))
    }

    pub fn is_regular(&self) -> bool {
        (0..self.len()).all(|i| !self.is_small(i))
    }

    pub fn is_essential(&self) -> bool {
        (0..self.len()).all(|i| !self.is_degenerate(i) && !self.is_trivial(i))
    }

    pub fn is_tree_set(&self) -> bool {
        self.is_nested() && self.is_essential()
    }

    /// The subsystem on `keep`, which must be closed under the involution.
    ///
    /// # Panics
    /// If `keep` is not closed under the involution or holds an out-of-range
    /// index.
    pub fn induced(&self, keep: &Members) -> Induced {
        let origin: Vec<usize> = keep.iter().copied().collect();
        let position = |i: usize| {
            origin
                .binary_search(&i)
                .unwrap_or_else(|_| panic!("induced set is not closed under the involution at {i}"))
        };
        let n = origin.len();
        let inv = origin.iter().map(|&i| position(self.inv[i])).collect();
        let le = origin
            .iter()
            .map(|&i| {
                let mut row = FixedBitSet::with_capacity(n);
                for (k, &j) in origin.iter().enumerate() {
                    if self.le(i, j) {
                        row.insert(k);
                    }
                }
                row
            })
            .collect();
        let labels =
            self.labels.as_ref().map(|labels| origin.iter().map(|&i| labels[i].clone()).collect());
        Induced { system: SeparationSystem { inv, le, labels }, origin }
    }

    /// Deletes every separation that is degenerate, trivial or co-trivial.
    pub fn essential_core(&self) -> Induced {
        let keep = (0..self.len())
            .filter(|&i| !self.is_degenerate(i) && !self.is_trivial(i) && !self.is_co_trivial(i))
            .collect();
        self.induced(&keep)
    }

    /// Removes every relation `s <= inv(s)` from an essential system.
    pub fn regularization(&self) -> Result<SeparationSystem, SystemError> {
        if !self.is_essential() {
            return Err(SystemError::NotEssential);
        }
        let mut le = self.le.clone();
        for (i, row) in le.iter_mut().enumerate() {
            if self.inv[i] != i {
                row.set(self.inv[i], false);
            }
        }
        let mut out = SeparationSystem::from_order(self.inv.clone(), le)?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    /// Nondegenerate members pointing towards each other.
    pub fn is_star(&self, members: &Members) -> bool {
        members.iter().all(|&r| !self.is_degenerate(r))
            && members.iter().all(|&r| members.iter().all(|&s| r == s || self.le(r, self.inv[s])))
    }

    /// A star in which `r <= inv(s)` is the only relation between distinct members.
    pub fn is_proper_star(&self, members: &Members) -> bool {
        self.is_star(members)
            && members.iter().all(|&r| {
                members.iter().all(|&s| {
                    r == s || (!self.le(r, s) && !self.le(s, r) && !self.le(self.inv[s], r))
                })
            })
    }

    /// A proper star that is not a co-trivial singleton.
    pub fn is_proper_in(&self, members: &Members) -> bool {
        if !self.is_proper_star(members) {
            return false;
        }
        match members.iter().next() {
            Some(&only) if members.len() == 1 => !self.is_co_trivial(only),
            _ => true,
        }
    }

    /// `sigma <= tau`: everything in `sigma` lies below something in `tau`.
    pub fn star_le(&self, sigma: &Members, tau: &Members) -> bool {
        sigma.iter().all(|&s| tau.iter().any(|&t| self.le(s, t)))
    }

    /// A stable textual name for a subset, e.g. `{a,b}`.
    pub fn fingerprint(&self, members: &Members) -> String {
        let mut out = String::from("{");
        for (k, &i) in members.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", self.label(i));
        }
        out.push('}');
        out
    }

    /// Whether `map` (indexed by our elements) is an isomorphism onto `other`.
    pub fn is_isomorphism_onto(&self, other: &SeparationSystem, map: &[usize]) -> bool {
        if map.len() != self.len() || other.len() != self.len() {
            return false;
        }
        let image: BTreeSet<usize> = map.iter().copied().collect();
        if image.len() != map.len() || map.iter().any(|&m| m >= other.len()) {
            return false;
        }
        (0..self.len()).all(|i| {
            other.inv(map[i]) == map[self.inv[i]]
                && (0..self.len()).all(|j| self.le(i, j) == other.le(map[i], map[j]))
        })
    }
}

/// A subsystem together with the original index of each of its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Induced {
    pub system: SeparationSystem,
    pub origin: Vec<usize>,
}

impl Induced {
    pub fn position_of(&self, original: usize) -> Option<usize> {
        self.origin.binary_search(&original).ok()
    }
}

/// Per-element flags computed by [`SeparationSystem::classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub small: Vec<bool>,
    pub degenerate: Vec<bool>,
    pub co_trivial: Vec<bool>,
    /// Least witnessing separation (by representative index) for trivial elements.
    pub witness: Vec<Option<usize>>,
}

impl Classification {
    pub fn is_trivial(&self, i: usize) -> bool {
        self.witness[i].is_some()
    }

    pub fn trivial_elements(&self) -> Members {
        (0..self.witness.len()).filter(|&i| self.is_trivial(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[usize]) -> Members {
        items.iter().copied().collect()
    }

    // 0 <-> 1, 2 <-> 3, 0 < 2 and its dual 3 < 1.
    fn two_chain() -> SeparationSystem {
        SeparationSystem::new(4, vec![1, 0, 3, 2], &[(0, 2)]).unwrap()
    }

    #[test]
    fn build_adds_dual_generator() {
        let sys = two_chain();
        assert_eq!(sys.strict_pairs(), vec![(0, 2), (3, 1)]);
    }

    #[test]
    fn degenerate_singleton() {
        let sys = SeparationSystem::new(1, vec![0], &[]).unwrap();
        assert!(sys.is_degenerate(0));
        assert!(!sys.is_trivial(0));
        assert!(sys.is_nested());
        assert!(!sys.is_essential());
        assert!(!sys.is_tree_set());
        assert!(sys.essential_core().system.is_empty());
        assert_eq!(sys.regularization(), Err(SystemError::NotEssential));
    }

    #[test]
    fn antisymmetry_violation() {
        let err = SeparationSystem::new(2, vec![1, 0], &[(0, 1), (1, 0)]).unwrap_err();
        assert_eq!(err, SystemError::NotAPoset(0, 1));
    }

    #[test]
    fn bad_involution() {
        assert_eq!(
            SeparationSystem::new(3, vec![1, 2, 0], &[]).unwrap_err(),
            SystemError::BadInvolution(0)
        );
        assert!(matches!(
            SeparationSystem::new(2, vec![1, 5], &[]),
            Err(SystemError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn from_relation_detects_missing_dual() {
        let err = SeparationSystem::from_relation(4, vec![1, 0, 3, 2], &[(0, 2)]).unwrap_err();
        assert_eq!(err, SystemError::InvolutionNotOrderReversing(0, 2));
    }

    #[test]
    fn exhaustive_classification_of_two_chain() {
        let sys = two_chain();
        let c = sys.classify();
        // Brute force over all witness candidates.
        for i in 0..4 {
            assert!(!c.small[i]);
            for s in 0..4 {
                let other = sys.separation_of(s) != sys.separation_of(i);
                assert!(!(other && sys.lt(i, s) && sys.lt(i, sys.inv(s))));
            }
            assert!(!c.is_trivial(i));
        }
        assert!(sys.is_tree_set());
        assert!(sys.is_regular());
    }

    // 0 <-> 1, 2 <-> 3 with 0 < 2 and 0 < 3: 0 is trivial, witnessed by {2,3}.
    fn trivial_example() -> SeparationSystem {
        SeparationSystem::new(4, vec![1, 0, 3, 2], &[(0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn trivial_with_witness() {
        let sys = trivial_example();
        let c = sys.classify();
        assert_eq!(c.witness[0], Some(2));
        assert!(c.small[0]);
        assert!(c.co_trivial[1]);
        assert!(!c.is_trivial(1));
        assert!(!sys.is_essential());
    }

    #[test]
    fn essential_core_of_trivial_example() {
        let sys = trivial_example();
        let core = sys.essential_core();
        assert_eq!(core.origin, vec![2, 3]);
        assert_eq!(core.system.involution(), &[1, 0]);
        assert!(core.system.strict_pairs().is_empty());
        // Idempotent.
        let again = core.system.essential_core();
        assert_eq!(again.system, core.system);
    }

    #[test]
    fn essential_core_is_identity_on_essential_input() {
        let sys = two_chain();
        let core = sys.essential_core();
        assert_eq!(core.origin, vec![0, 1, 2, 3]);
        assert_eq!(core.system, sys);
    }

    #[test]
    fn regularization_removes_only_the_small_pair() {
        // 0 <-> 1, 2 <-> 3, 4 <-> 5 with 0 < 2 (and 3 < 1); additionally 4 <= 5.
        let sys = SeparationSystem::new(6, vec![1, 0, 3, 2, 5, 4], &[(0, 2), (4, 5)]).unwrap();
        assert!(sys.is_essential());
        assert!(!sys.is_regular());
        assert!(sys.is_small(4));
        let reg = sys.regularization().unwrap();
        assert!(reg.is_regular());
        let before: BTreeSet<_> = sys.strict_pairs().into_iter().collect();
        let after: BTreeSet<_> = reg.strict_pairs().into_iter().collect();
        let removed: Vec<_> = before.difference(&after).copied().collect();
        assert_eq!(removed, vec![(4, 5)]);
        assert!(after.is_subset(&before));
    }

    #[test]
    fn regularization_of_regular_is_identity() {
        let sys = two_chain();
        assert_eq!(sys.regularization().unwrap(), sys);
    }

    #[test]
    fn crossing_pair_is_not_nested() {
        let sys = SeparationSystem::new(4, vec![1, 0, 3, 2], &[]).unwrap();
        assert!(!sys.nested_pair(0, 2));
        assert!(!sys.is_nested());
    }

    #[test]
    fn stars() {
        let sys = two_chain();
        assert!(sys.is_star(&Members::new()));
        assert!(sys.is_proper_star(&Members::new()));
        // 0 < 2 is a comparable pair: not a star.
        assert!(!sys.is_star(&set(&[0, 2])));
        // 0 <= inv(3) = 2: {0, 3} points inwards.
        assert!(sys.is_proper_star(&set(&[0, 3])));
        assert!(sys.is_proper_in(&set(&[0, 3])));
    }

    #[test]
    fn co_trivial_singleton_is_not_proper_in() {
        let sys = trivial_example();
        assert!(sys.is_proper_star(&set(&[1])));
        assert!(!sys.is_proper_in(&set(&[1])));
        assert!(sys.is_proper_in(&set(&[2])));
    }

    #[test]
    fn star_le_is_not_antisymmetric_on_chains() {
        let sys = two_chain();
        let sigma = set(&[0, 2]);
        let tau = set(&[2]);
        assert!(sys.star_le(&sigma, &tau));
        assert!(sys.star_le(&tau, &sigma));
        assert_ne!(sigma, tau);
    }

    #[test]
    fn star_le_antichain_pair() {
        // Two incomparable maximal elements 2 and 0 of a 4-element antichain-like system.
        let sys = SeparationSystem::new(4, vec![1, 0, 3, 2], &[]).unwrap();
        let a = set(&[0]);
        let b = set(&[2]);
        assert!(!sys.star_le(&a, &b));
        assert!(!sys.star_le(&b, &a));
    }
}
