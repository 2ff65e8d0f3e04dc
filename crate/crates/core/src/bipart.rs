//! Tree sets of bipartitions of a ground set.
//!
//! A family stores ordered pairs `(A, B)` of subsets of its ground set,
//! ordered by inclusion of the first component. Embeddings built from a tree
//! set `τ` keep the pair for element `i` of `τ` at position `i`.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::orient::{self, Limits, OrientError};
use crate::system::{Members, SeparationSystem, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BipartError {
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("tree set is not regular")]
    NotRegular,
    #[error("unknown ground element {0}")]
    UnknownElement(String),
    #[error("{premise} premise failed: {detail}")]
    PremiseFailed { premise: Premise, detail: String },
    #[error("directed orientation {0} has no label")]
    MissingDirectedLabel(usize),
    #[error("embedding is not injective: elements {0} and {1} have the same image")]
    NotInjectiveEmbedding(usize, usize),
    #[error("map is not an isomorphism of tree sets: {0}")]
    NotAnIsomorphism(String),
    #[error(transparent)]
    Orient(#[from] OrientError),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Premise {
    /// Every two ground elements are separated by the family.
    First,
    /// Every consistent orientation is induced by a ground element.
    Second,
    EverBranching,
    /// Every directed orientation is induced by exactly one ground element.
    Uniqueness,
}

impl std::fmt::Display for Premise {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Premise::First => "first",
            Premise::Second => "second",
            Premise::EverBranching => "ever-branching",
            Premise::Uniqueness => "uniqueness",
        })
    }
}

fn premise(premise: Premise, detail: impl Into<String>) -> BipartError {
    BipartError::PremiseFailed { premise, detail: detail.into() }
}

/// A symmetric family of bipartitions of a labelled ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartitionFamily {
    ground: Vec<String>,
    pairs: Vec<(Members, Members)>,
}

impl BipartitionFamily {
    pub fn new(ground: Vec<String>, pairs: Vec<(Members, Members)>) -> Result<Self, BipartError> {
        let distinct: BTreeSet<&String> = ground.iter().collect();
        if distinct.len() != ground.len() {
            return Err(BipartError::InvalidFamily("duplicate ground label".into()));
        }
        let n = ground.len();
        let mut seen = BTreeSet::new();
        for (k, (a, b)) in pairs.iter().enumerate() {
            if a.iter().chain(b).any(|&x| x >= n) {
                return Err(BipartError::InvalidFamily(format!("pair {k} leaves the ground set")));
            }
            if a.is_empty() || b.is_empty() {
                return Err(BipartError::InvalidFamily(format!("pair {k} has an empty side")));
            }
            if !a.is_disjoint(b) || a.len() + b.len() != n {
                return Err(BipartError::InvalidFamily(format!("pair {k} is not a bipartition")));
            }
            if !seen.insert(a) {
                return Err(BipartError::InvalidFamily(format!("pair {k} is repeated")));
            }
        }
        if let Some(k) = pairs.iter().position(|(a, _)| {
            !pairs.iter().any(|(c, _)| c.len() + a.len() == n && c.is_disjoint(a))
        }) {
            return Err(BipartError::InvalidFamily(format!("pair {k} has no inverse")));
        }
        Ok(Self { ground, pairs })
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn pairs(&self) -> &[(Members, Members)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn element(&self, label: &str) -> Option<usize> {
        self.ground.iter().position(|g| g == label)
    }

    fn side_label(&self, side: &Members) -> String {
        side.iter().map(|&x| self.ground[x].as_str()).collect::<Vec<_>>().join(",")
    }

    /// The separation system of the pairs under inclusion of first
    /// components, with the swap as involution.
    pub fn system(&self) -> SeparationSystem {
        let m = self.pairs.len();
        let inv = (0..m)
            .map(|k| {
                let (a, b) = &self.pairs[k];
                self.pairs
                    .iter()
                    .position(|(c, d)| c == b && d == a)
                    .expect("validated family is symmetric")
            })
            .collect();
        let le = (0..m)
            .map(|k| {
                let mut row = FixedBitSet::with_capacity(m);
                for j in 0..m {
                    if self.pairs[k].0.is_subset(&self.pairs[j].0) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        let labels = self
            .pairs
            .iter()
            .map(|(a, b)| format!("{}|{}", self.side_label(a), self.side_label(b)))
            .collect();
        SeparationSystem::from_order(inv, le)
            .and_then(|s| s.with_labels(labels))
            .expect("inclusion of bipartitions is a separation system")
    }
}

fn require_regular(tau: &SeparationSystem) -> Result<(), BipartError> {
    if tau.is_tree_set() && tau.is_regular() {
        Ok(())
    } else {
        Err(BipartError::NotRegular)
    }
}

/// A family built from a tree set: pair `i` is the image of element `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub family: BipartitionFamily,
    /// For embeddings over orientations, the orientation behind each ground
    /// element.
    pub orientations: Vec<Members>,
}

fn verify_embedding(tau: &SeparationSystem, family: &BipartitionFamily) -> Result<(), BipartError> {
    let identity: Vec<usize> = (0..tau.len()).collect();
    if tau.is_isomorphism_onto(&family.system(), &identity) {
        Ok(())
    } else {
        Err(BipartError::NotAnIsomorphism("order or involution not preserved".into()))
    }
}

/// Represents `τ` by bipartitions of `τ` itself: `s` goes to `(X_s, X_inv(s))`
/// where `X_s` holds `s`, everything strictly below `s`, and their inverses
/// other than `inv(s)`.
pub fn simple_embed(tau: &SeparationSystem) -> Result<Embedding, BipartError> {
    require_regular(tau)?;
    let side = |s: usize| -> Members {
        let mut out: Members =
            (0..tau.len()).filter(|&r| tau.lt(r, s)).flat_map(|r| [r, tau.inv(r)]).collect();
        out.insert(s);
        out.remove(&tau.inv(s));
        out
    };
    let pairs = (0..tau.len()).map(|s| (side(s), side(tau.inv(s)))).collect();
    let ground = (0..tau.len()).map(|i| tau.label(i)).collect();
    let family = BipartitionFamily::new(ground, pairs)?;
    verify_embedding(tau, &family)?;
    Ok(Embedding { family, orientations: Vec::new() })
}

/// `(O_inv(s), O_s)` over the given orientations, one pair per element.
fn orientation_pairs(tau: &SeparationSystem, orientations: &[Members]) -> Vec<(Members, Members)> {
    let containing = |s: usize| -> Members {
        (0..orientations.len()).filter(|&k| orientations[k].contains(&s)).collect()
    };
    (0..tau.len()).map(|s| (containing(tau.inv(s)), containing(s))).collect()
}

fn first_collision(pairs: &[(Members, Members)]) -> Option<(usize, usize)> {
    let mut seen: BTreeMap<&Members, usize> = BTreeMap::new();
    for (k, (a, _)) in pairs.iter().enumerate() {
        if let Some(&first) = seen.get(a) {
            return Some((first, k));
        }
        seen.insert(a, k);
    }
    None
}

/// Represents `τ` by bipartitions of its consistent orientations:
/// `s ↦ (O_inv(s), O_s)`.
pub fn orientation_embed(tau: &SeparationSystem) -> Result<Embedding, BipartError> {
    require_regular(tau)?;
    let orientations = orient::tree_set_orientations(tau)?;
    let pairs = orientation_pairs(tau, &orientations);
    if let Some((a, b)) = first_collision(&pairs) {
        return Err(BipartError::NotInjectiveEmbedding(a, b));
    }
    let ground = orientations.iter().map(|o| tau.fingerprint(o)).collect();
    let family = BipartitionFamily::new(ground, pairs)?;
    verify_embedding(tau, &family)?;
    Ok(Embedding { family, orientations })
}

/// The map over directed orientations, which need not be injective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedEmbedding {
    pub orientations: Vec<Members>,
    /// Image of each element of `τ`, as sets of orientation indices.
    pub pairs: Vec<(Members, Members)>,
    /// Pairs of elements of `τ` with equal images.
    pub collisions: Vec<(usize, usize)>,
    /// The family, present when the map is injective.
    pub embedding: Option<Embedding>,
}

impl DirectedEmbedding {
    pub fn is_injective(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Represents `τ` by bipartitions of its directed orientations:
/// `s ↦ (O'_inv(s), O'_s)`.
pub fn directed_embed(tau: &SeparationSystem) -> Result<DirectedEmbedding, BipartError> {
    require_regular(tau)?;
    let orientations = orient::directed_orientations(tau, &Limits::default())?;
    let pairs = orientation_pairs(tau, &orientations);
    let collisions: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|a| (a + 1..pairs.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| pairs[a] == pairs[b])
        .collect();
    let embedding = if collisions.is_empty() {
        let ground = orientations.iter().map(|o| tau.fingerprint(o)).collect();
        let family = BipartitionFamily::new(ground, pairs.clone())?;
        verify_embedding(tau, &family)?;
        Some(Embedding { family, orientations: orientations.clone() })
    } else {
        None
    };
    Ok(DirectedEmbedding { orientations, pairs, collisions, embedding })
}

/// The first proper star of order two that extends to no proper star of
/// order three.
pub fn maximal_two_star(tau: &SeparationSystem) -> Result<Option<(usize, usize)>, BipartError> {
    require_regular(tau)?;
    let n = tau.len();
    for r in 0..n {
        for s in r + 1..n {
            let pair: Members = [r, s].into_iter().collect();
            if tau.separation_of(r) == tau.separation_of(s) || !tau.is_proper_star(&pair) {
                continue;
            }
            let extends = (0..n).any(|x| {
                let mut triple = pair.clone();
                triple.insert(x)
                    && tau.separation_of(x) != tau.separation_of(r)
                    && tau.separation_of(x) != tau.separation_of(s)
                    && tau.is_proper_star(&triple)
            });
            if !extends {
                return Ok(Some((r, s)));
            }
        }
    }
    Ok(None)
}

pub fn is_ever_branching(tau: &SeparationSystem) -> Result<bool, BipartError> {
    Ok(maximal_two_star(tau)?.is_none())
}

/// The pairs whose second side contains `x`.
pub fn induced_orientation(family: &BipartitionFamily, x: &str) -> Result<Members, BipartError> {
    let x = family.element(x).ok_or_else(|| BipartError::UnknownElement(x.to_string()))?;
    Ok(pairs_towards(family, x))
}

fn pairs_towards(family: &BipartitionFamily, x: usize) -> Members {
    (0..family.len()).filter(|&k| family.pairs[k].1.contains(&x)).collect()
}

/// Ground elements that no pair puts on different sides.
pub fn indistinguishable_pairs(family: &BipartitionFamily) -> Vec<(usize, usize)> {
    let n = family.ground.len();
    (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .filter(|&(x, y)| family.pairs.iter().all(|(a, _)| a.contains(&x) == a.contains(&y)))
        .collect()
}

/// Keeps the first element of every class of indistinguishable ground
/// elements.
pub fn dedupe(family: &BipartitionFamily) -> BipartitionFamily {
    let dropped: BTreeSet<usize> =
        indistinguishable_pairs(family).into_iter().map(|(_, y)| y).collect();
    let kept: Vec<usize> = (0..family.ground.len()).filter(|x| !dropped.contains(x)).collect();
    let restrict = |side: &Members| -> Members {
        kept.iter().enumerate().filter(|(_, x)| side.contains(x)).map(|(k, _)| k).collect()
    };
    let ground = kept.iter().map(|&x| family.ground[x].clone()).collect();
    let pairs = family.pairs.iter().map(|(a, b)| (restrict(a), restrict(b))).collect();
    BipartitionFamily::new(ground, pairs).expect("deleting clones keeps a valid family")
}

/// Ground elements mapped to orientations of `τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovery {
    /// The orientations `h` maps into, sorted.
    pub orientations: Vec<Members>,
    /// `h(x)` as an index into `orientations`, for each ground element in the
    /// domain; `None` outside it.
    pub h: Vec<Option<usize>>,
}

fn check_g(
    family: &BipartitionFamily,
    fam_sys: &SeparationSystem,
    tau: &SeparationSystem,
    g: &[usize],
) -> Result<(), BipartError> {
    require_regular(tau)?;
    if !fam_sys.is_tree_set() {
        return Err(BipartError::InvalidFamily("family is not nested".into()));
    }
    if g.len() != family.len() || !fam_sys.is_isomorphism_onto(tau, g) {
        return Err(BipartError::NotAnIsomorphism("g is not an isomorphism onto τ".into()));
    }
    Ok(())
}

fn image_of(g: &[usize], members: &Members) -> Members {
    members.iter().map(|&k| g[k]).collect()
}

/// Checks that mapping ground sets through `h` turns every pair into the
/// image of its `g`-partner under `pairs`.
fn check_action(
    family: &BipartitionFamily,
    g: &[usize],
    h: &[Option<usize>],
    pairs: &[(Members, Members)],
) -> Result<(), BipartError> {
    let push = |side: &Members| -> Members { side.iter().filter_map(|&x| h[x]).collect() };
    for (k, (a, b)) in family.pairs.iter().enumerate() {
        if (push(a), push(b)) != pairs[g[k]] {
            return Err(BipartError::NotAnIsomorphism(format!("action differs on pair {k}")));
        }
    }
    Ok(())
}

/// Given an isomorphism `g` from a family onto `τ` (`g[k]` is the image of
/// pair `k`), maps each ground element `x` to `g(O_x)`.
pub fn recover(
    family: &BipartitionFamily,
    tau: &SeparationSystem,
    g: &[usize],
) -> Result<Recovery, BipartError> {
    let fam_sys = family.system();
    check_g(family, &fam_sys, tau, g)?;
    if let Some(&(x, y)) = indistinguishable_pairs(family).first() {
        return Err(premise(
            Premise::First,
            format!("{} and {} are not distinguished", family.ground[x], family.ground[y]),
        ));
    }
    let induced: Vec<Members> =
        (0..family.ground.len()).map(|x| pairs_towards(family, x)).collect();
    for o in orient::tree_set_orientations(&fam_sys)? {
        if !induced.contains(&o) {
            return Err(premise(
                Premise::Second,
                format!("no ground element induces {}", fam_sys.fingerprint(&o)),
            ));
        }
    }
    let orientations = orient::tree_set_orientations(tau)?;
    let h = induced
        .iter()
        .map(|o| orientations.binary_search(&image_of(g, o)).ok())
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| BipartError::NotAnIsomorphism("g(O_x) is not an orientation".into()))?;
    let distinct: BTreeSet<usize> = h.iter().copied().collect();
    if distinct.len() != h.len() || distinct.len() != orientations.len() {
        return Err(BipartError::NotAnIsomorphism("h is not a bijection".into()));
    }
    let h: Vec<Option<usize>> = h.into_iter().map(Some).collect();
    check_action(family, g, &h, &orientation_pairs(tau, &orientations))?;
    Ok(Recovery { orientations, h })
}

/// The sparse variant: only directed orientations need to be induced, each
/// by a unique ground element, and `h` is defined on those elements.
pub fn recover_sparse(
    family: &BipartitionFamily,
    tau: &SeparationSystem,
    g: &[usize],
) -> Result<Recovery, BipartError> {
    let fam_sys = family.system();
    check_g(family, &fam_sys, tau, g)?;
    if let Some((r, s)) = maximal_two_star(&fam_sys)? {
        return Err(premise(
            Premise::EverBranching,
            format!("{{{},{}}} is a maximal proper star", fam_sys.label(r), fam_sys.label(s)),
        ));
    }
    let induced: Vec<Members> =
        (0..family.ground.len()).map(|x| pairs_towards(family, x)).collect();
    let mut h = vec![None; family.ground.len()];
    let orientations = orient::directed_orientations(tau, &Limits::default())?;
    for o in orient::directed_orientations(&fam_sys, &Limits::default())? {
        let inducing: Vec<usize> = (0..induced.len()).filter(|&x| induced[x] == o).collect();
        match inducing.as_slice() {
            [] => {
                return Err(premise(
                    Premise::Second,
                    format!("no ground element induces {}", fam_sys.fingerprint(&o)),
                ))
            }
            [x] => {
                let pos = orientations
                    .binary_search(&image_of(g, &o))
                    .map_err(|_| BipartError::NotAnIsomorphism("g(O_x) is not directed".into()))?;
                h[*x] = Some(pos);
            }
            many => {
                let names: Vec<&str> = many.iter().map(|&x| family.ground[x].as_str()).collect();
                return Err(premise(
                    Premise::Uniqueness,
                    format!("{} all induce {}", names.join(","), fam_sys.fingerprint(&o)),
                ));
            }
        }
    }
    check_action(family, g, &h, &orientation_pairs(tau, &orientations))?;
    Ok(Recovery { orientations, h })
}

/// Represents `τ` over a chosen set of orientations: `assignment[k]` labels
/// orientation `k` of `τ` (in sorted order) or leaves it out. Every directed
/// orientation must be labelled.
pub fn mixed_embed(
    tau: &SeparationSystem,
    assignment: &[Option<String>],
) -> Result<Embedding, BipartError> {
    require_regular(tau)?;
    let all = orient::tree_set_orientations(tau)?;
    if assignment.len() != all.len() {
        return Err(BipartError::InvalidFamily(format!(
            "{} labels for {} orientations",
            assignment.len(),
            all.len()
        )));
    }
    if let Some(k) =
        (0..all.len()).find(|&k| assignment[k].is_none() && orient::is_directed(tau, &all[k]))
    {
        return Err(BipartError::MissingDirectedLabel(k));
    }
    let chosen: Vec<usize> = (0..all.len()).filter(|&k| assignment[k].is_some()).collect();
    let orientations: Vec<Members> = chosen.iter().map(|&k| all[k].clone()).collect();
    let pairs = orientation_pairs(tau, &orientations);
    if let Some((a, b)) = first_collision(&pairs) {
        return Err(BipartError::NotInjectiveEmbedding(a, b));
    }
    let ground = chosen.iter().map(|&k| assignment[k].clone().expect("chosen")).collect();
    let family = BipartitionFamily::new(ground, pairs)?;
    verify_embedding(tau, &family)?;
    Ok(Embedding { family, orientations })
}
