//! Orientations of separation systems.
//!
//! General enumeration of consistent orientations is a backtracking search
//! with down-closure propagation, guarded by [`Limits`]. Finite tree sets have
//! a polynomial route: every consistent orientation is the unique one in which
//! some element is maximal, and that orientation is forced pointwise by
//! nestedness (see [`tree_set_orientations`]).

use thiserror::Error;

use crate::system::{Members, SeparationSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrientError {
    #[error("system has {oriented} oriented separations, limit is {limit}")]
    TooLarge { oriented: usize, limit: usize },
    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("set is not antisymmetric")]
    NotAntisymmetric,
    #[error("set is not consistent")]
    Inconsistent,
    #[error("partial orientation does not extend to a consistent orientation")]
    Unextendable,
    #[error("no consistent orientation has {0} as a maximal element")]
    NotFound(usize),
    #[error("more than one consistent orientation has {0} as a maximal element")]
    NotUnique(usize),
    #[error("system is not a tree set")]
    NotATreeSet,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Size guards for exponential searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of oriented separations for backtracking enumeration.
    pub max_oriented: usize,
    /// Maximum number of separations for the exhaustive `2^n` enumeration.
    pub max_brute_separations: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_oriented: 40, max_brute_separations: 20 }
    }
}

fn check_range(sys: &SeparationSystem, members: &Members) -> Result<(), OrientError> {
    match members.iter().find(|&&i| i >= sys.len()) {
        Some(&i) => Err(OrientError::IndexOutOfRange(i)),
        None => Ok(()),
    }
}

/// Contains the inverse of none of its nondegenerate elements.
pub fn is_antisymmetric(sys: &SeparationSystem, members: &Members) -> bool {
    members.iter().all(|&i| sys.is_degenerate(i) || !members.contains(&sys.inv(i)))
}

/// Contains exactly one orientation of every separation.
pub fn is_full(sys: &SeparationSystem, members: &Members) -> bool {
    is_antisymmetric(sys, members)
        && sys
            .separations()
            .into_iter()
            .all(|s| members.contains(&s) || members.contains(&sys.inv(s)))
}

/// No two orientations of distinct separations point away from each other.
pub fn is_consistent(sys: &SeparationSystem, members: &Members) -> bool {
    members.iter().all(|&a| {
        members
            .iter()
            .all(|&b| sys.separation_of(a) == sys.separation_of(b) || !sys.lt(sys.inv(a), b))
    })
}

pub fn down_closure(sys: &SeparationSystem, members: &Members) -> Members {
    (0..sys.len()).filter(|&r| members.iter().any(|&s| sys.le(r, s))).collect()
}

pub fn maximal_elements(sys: &SeparationSystem, members: &Members) -> Members {
    members.iter().copied().filter(|&r| !members.iter().any(|&s| sys.lt(r, s))).collect()
}

/// Directed: any two members have a common upper bound inside the set.
pub fn is_directed(sys: &SeparationSystem, members: &Members) -> bool {
    members
        .iter()
        .all(|&r| members.iter().all(|&s| members.iter().any(|&t| sys.le(r, t) && sys.le(s, t))))
}

/// Backtracking state: the chosen orientation per separation, plus a trail.
struct Search<'a> {
    sys: &'a SeparationSystem,
    seps: Vec<usize>,
    // chosen[sep representative] = chosen oriented index
    chosen: Vec<Option<usize>>,
    members: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(sys: &'a SeparationSystem) -> Self {
        Self { sys, seps: sys.separations(), chosen: vec![None; sys.len()], members: Vec::new() }
    }

    fn compatible(&self, x: usize) -> bool {
        let sys = self.sys;
        let sx = sys.separation_of(x);
        self.members.iter().all(|&y| {
            sys.separation_of(y) == sx || (!sys.lt(sys.inv(x), y) && !sys.lt(sys.inv(y), x))
        })
    }

    /// Chooses `x` and everything below it. Returns the trail length to undo
    /// to, or `None` after undoing a conflict.
    fn choose(&mut self, x: usize) -> Option<usize> {
        let mark = self.members.len();
        let sys = self.sys;
        let sx = sys.separation_of(x);
        let below = std::iter::once(x)
            .chain((0..sys.len()).filter(|&z| sys.lt(z, x) && sys.separation_of(z) != sx));
        for z in below {
            let sz = sys.separation_of(z);
            match self.chosen[sz] {
                Some(c) if c == z => {}
                Some(_) => {
                    self.undo(mark);
                    return None;
                }
                None => {
                    if !self.compatible(z) {
                        self.undo(mark);
                        return None;
                    }
                    self.chosen[sz] = Some(z);
                    self.members.push(z);
                }
            }
        }
        Some(mark)
    }

    fn undo(&mut self, mark: usize) {
        while self.members.len() > mark {
            let z = self.members.pop().expect("trail underflow");
            self.chosen[self.sys.separation_of(z)] = None;
        }
    }

    fn run(&mut self, next: usize, out: &mut Vec<Members>, first_only: bool) {
        if first_only && !out.is_empty() {
            return;
        }
        let Some(pos) = (next..self.seps.len()).find(|&k| self.chosen[self.seps[k]].is_none())
        else {
            out.push(self.members.iter().copied().collect());
            return;
        };
        let s = self.seps[pos];
        let options = if self.sys.is_degenerate(s) { vec![s] } else { vec![s, self.sys.inv(s)] };
        for x in options {
            if let Some(mark) = self.choose(x) {
                self.run(pos + 1, out, first_only);
                self.undo(mark);
            }
        }
    }
}

/// All full consistent orientations, sorted, by backtracking search.
pub fn enumerate_consistent(
    sys: &SeparationSystem,
    limits: &Limits,
) -> Result<Vec<Members>, OrientError> {
    if sys.len() > limits.max_oriented {
        return Err(OrientError::TooLarge { oriented: sys.len(), limit: limits.max_oriented });
    }
    let mut out = Vec::new();
    Search::new(sys).run(0, &mut out, false);
    out.sort();
    Ok(out)
}

/// All full consistent orientations, sorted, by testing every one of the
/// `2^n` orientations. Kept separate from the search so the two can be
/// compared.
pub fn enumerate_consistent_exhaustive(
    sys: &SeparationSystem,
    limits: &Limits,
) -> Result<Vec<Members>, OrientError> {
    let seps = sys.separations();
    let free: Vec<usize> = seps.iter().copied().filter(|&s| !sys.is_degenerate(s)).collect();
    if free.len() > limits.max_brute_separations {
        return Err(OrientError::TooLarge {
            oriented: sys.len(),
            limit: 2 * limits.max_brute_separations,
        });
    }
    let fixed: Members = seps.iter().copied().filter(|&s| sys.is_degenerate(s)).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        let mut candidate = fixed.clone();
        for (bit, &s) in free.iter().enumerate() {
            candidate.insert(if mask >> bit & 1 == 0 { s } else { sys.inv(s) });
        }
        if is_consistent(sys, &candidate) {
            out.push(candidate);
        }
    }
    out.sort();
    Ok(out)
}

/// Extends a consistent partial orientation of a nested system to a full
/// consistent orientation. Choices are made by ascending separation index,
/// preferring the lower-indexed orientation.
pub fn extend_partial(sys: &SeparationSystem, members: &Members) -> Result<Members, OrientError> {
    check_range(sys, members)?;
    if !is_antisymmetric(sys, members) {
        return Err(OrientError::NotAntisymmetric);
    }
    if !is_consistent(sys, members) {
        return Err(OrientError::Inconsistent);
    }
    if !sys.is_nested() {
        return Err(OrientError::PreconditionViolated("system is not nested".into()));
    }
    let mut search = Search::new(sys);
    for &x in members {
        if search.choose(x).is_none() {
            return Err(OrientError::Unextendable);
        }
    }
    let mut out = Vec::new();
    search.run(0, &mut out, true);
    out.pop().ok_or(OrientError::Unextendable)
}

/// The maxima of a consistent orientation together with that orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    pub star: Members,
    pub orientation: Members,
}

/// Every set of maximal elements of a full consistent orientation, with the
/// orientation it came from, sorted by star.
pub fn splitting_stars(
    sys: &SeparationSystem,
    limits: &Limits,
) -> Result<Vec<Splitting>, OrientError> {
    let mut out: Vec<Splitting> = enumerate_consistent(sys, limits)?
        .into_iter()
        .map(|orientation| {
            let star = maximal_elements(sys, &orientation);
            assert!(
                orientation.is_subset(&down_closure(sys, &star)),
                "finite orientation not covered by its maxima"
            );
            Splitting { star, orientation }
        })
        .collect();
    out.sort_by(|a, b| a.star.cmp(&b.star).then_with(|| a.orientation.cmp(&b.orientation)));
    out.dedup_by(|a, b| a.star == b.star);
    Ok(out)
}

/// In a nested essential system, the orientation in which `s` is maximal is
/// determined separation by separation: an orientation `x` of another
/// separation must be chosen iff `x < s` or `x < inv(s)`.
fn forced_orientation(sys: &SeparationSystem, s: usize) -> Result<Members, OrientError> {
    let own = sys.separation_of(s);
    let mut out = Members::new();
    out.insert(s);
    for r in sys.separations() {
        if r == own {
            continue;
        }
        let forced: Vec<usize> = [r, sys.inv(r)]
            .into_iter()
            .filter(|&x| sys.lt(x, s) || sys.lt(x, sys.inv(s)))
            .collect();
        match forced.as_slice() {
            [x] => {
                out.insert(*x);
            }
            [] => return Err(OrientError::NotUnique(s)),
            _ => return Err(OrientError::NotFound(s)),
        }
    }
    if !is_consistent(sys, &out) || !maximal_elements(sys, &out).contains(&s) {
        return Err(OrientError::NotFound(s));
    }
    Ok(out)
}

/// The unique full consistent orientation in which `s` is maximal.
pub fn orientation_with_max(
    sys: &SeparationSystem,
    s: usize,
    limits: &Limits,
) -> Result<Members, OrientError> {
    if s >= sys.len() {
        return Err(OrientError::IndexOutOfRange(s));
    }
    if sys.is_tree_set() {
        return forced_orientation(sys, s);
    }
    let mut hits = enumerate_consistent(sys, limits)?
        .into_iter()
        .filter(|o| o.contains(&s) && maximal_elements(sys, o).contains(&s));
    let first = hits.next().ok_or(OrientError::NotFound(s))?;
    if hits.next().is_some() {
        return Err(OrientError::NotUnique(s));
    }
    Ok(first)
}

/// All consistent orientations of a finite tree set, sorted, in polynomial
/// time.
pub fn tree_set_orientations(sys: &SeparationSystem) -> Result<Vec<Members>, OrientError> {
    if !sys.is_tree_set() {
        return Err(OrientError::NotATreeSet);
    }
    if sys.is_empty() {
        return Ok(vec![Members::new()]);
    }
    let mut out =
        (0..sys.len()).map(|s| forced_orientation(sys, s)).collect::<Result<Vec<_>, _>>()?;
    out.sort();
    out.dedup();
    debug_assert!(out.iter().all(|o| is_full(sys, o) && is_consistent(sys, o)));
    Ok(out)
}

/// Consistent orientations, via the tree-set route when it applies.
pub fn consistent_orientations(
    sys: &SeparationSystem,
    limits: &Limits,
) -> Result<Vec<Members>, OrientError> {
    if sys.is_tree_set() {
        tree_set_orientations(sys)
    } else {
        enumerate_consistent(sys, limits)
    }
}

pub fn directed_orientations(
    sys: &SeparationSystem,
    limits: &Limits,
) -> Result<Vec<Members>, OrientError> {
    Ok(consistent_orientations(sys, limits)?.into_iter().filter(|o| is_directed(sys, o)).collect())
}

/// A directed consistent orientation containing `s`: the down-closure of a
/// maximal chain through `s`, grown by least index.
pub fn directed_orientation_containing(
    sys: &SeparationSystem,
    s: usize,
) -> Result<Members, OrientError> {
    if s >= sys.len() {
        return Err(OrientError::IndexOutOfRange(s));
    }
    if !sys.is_tree_set() || !sys.is_regular() {
        return Err(OrientError::PreconditionViolated("system is not a regular tree set".into()));
    }
    let mut chain = Members::new();
    chain.insert(s);
    while let Some(x) =
        (0..sys.len()).find(|&x| !chain.contains(&x) && chain.iter().all(|&c| sys.comparable(x, c)))
    {
        chain.insert(x);
    }
    let out = down_closure(sys, &chain);
    if !(is_full(sys, &out) && is_consistent(sys, &out) && is_directed(sys, &out)) {
        return Err(OrientError::PreconditionViolated(
            "chain down-closure is not a directed orientation".into(),
        ));
    }
    Ok(out)
}
