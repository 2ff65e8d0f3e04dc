//! Brute-force oracles shared by the integration tests. They use only the
//! raw order, involution and tree distances, never the library's search.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use tressec_core::treebridge::GraphTree;
use tressec_core::{Members, SeparationSystem};

pub fn set(items: &[usize]) -> Members {
    items.iter().copied().collect()
}

/// Every full consistent orientation, found by trying all `2^|S|` choices.
pub fn consistent_orientations(sys: &SeparationSystem) -> Vec<Members> {
    let reps: Vec<usize> = (0..sys.len()).filter(|&i| i <= sys.inv(i)).collect();
    assert!(reps.len() <= 20, "oracle limited to 20 separations");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << reps.len()) {
        let chosen: Vec<usize> = reps
            .iter()
            .enumerate()
            .map(|(k, &r)| if mask >> k & 1 == 1 { sys.inv(r) } else { r })
            .collect();
        if reps.iter().enumerate().any(|(k, &r)| mask >> k & 1 == 1 && sys.inv(r) == r) {
            continue;
        }
        let consistent = chosen.iter().all(|&a| {
            chosen
                .iter()
                .all(|&b| a == b || sys.inv(a) == b || !(sys.le(sys.inv(a), b) && sys.inv(a) != b))
        });
        if consistent {
            out.push(chosen.into_iter().collect());
        }
    }
    out.sort();
    out
}

pub fn maxima(sys: &SeparationSystem, o: &Members) -> Members {
    o.iter().copied().filter(|&a| !o.iter().any(|&b| b != a && sys.le(a, b))).collect()
}

pub fn splitting_sets(sys: &SeparationSystem) -> BTreeSet<Members> {
    consistent_orientations(sys).iter().map(|o| maxima(sys, o)).collect()
}

pub fn distances(tree: &GraphTree) -> Vec<Vec<usize>> {
    (0..tree.node_count())
        .map(|s| {
            let mut d = vec![usize::MAX; tree.node_count()];
            d[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in tree.neighbours(x) {
                    if d[y] == usize::MAX {
                        d[y] = d[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            d
        })
        .collect()
}

/// `(a,b) <= (c,d)` for oriented tree edges: equal, or the path from `a` to
/// `d` runs through `b` and then `c`.
pub fn edge_le(d: &[Vec<usize>], (a, b): (usize, usize), (c, e): (usize, usize)) -> bool {
    (a, b) == (c, e) || (d[a][e] == d[b][c] + 2 && d[a][e] == d[a][c] + 1 && d[a][e] == d[b][e] + 1)
}

/// Splitting stars of a tree computed from distances alone: all `2^|E|`
/// orientations, kept when no two chosen edges point away from each other.
pub fn tree_splitting_stars(tree: &GraphTree) -> (usize, BTreeSet<Members>) {
    let d = distances(tree);
    let m = tree.edge_count();
    let oriented = |i: usize| tree.oriented(i);
    let mut count = 0;
    let mut stars = BTreeSet::new();
    for mask in 0u32..(1u32 << m) {
        let chosen: Vec<usize> = (0..m).map(|k| 2 * k + (mask >> k & 1) as usize).collect();
        let away = chosen.iter().any(|&a| {
            chosen.iter().any(|&b| {
                let (x, y) = oriented(a);
                a != b && edge_le(&d, (y, x), oriented(b))
            })
        });
        if away {
            continue;
        }
        count += 1;
        let star = chosen
            .iter()
            .copied()
            .filter(|&a| !chosen.iter().any(|&b| b != a && edge_le(&d, oriented(a), oriented(b))))
            .collect();
        stars.insert(star);
    }
    (count, stars)
}

/// Oriented edges pointing at each node.
pub fn node_stars(tree: &GraphTree) -> BTreeSet<Members> {
    (0..tree.node_count())
        .map(|t| (0..tree.oriented_count()).filter(|&i| tree.oriented(i).1 == t).collect())
        .collect()
}

/// Indices surviving deletion of degenerate, trivial and co-trivial elements,
/// by direct search for witnesses.
pub fn core_indices(sys: &SeparationSystem) -> Vec<usize> {
    let n = sys.len();
    let lt = |a: usize, b: usize| a != b && sys.le(a, b);
    let trivial =
        |r: usize| (0..n).any(|s| s != r && s != sys.inv(r) && lt(r, s) && lt(r, sys.inv(s)));
    (0..n).filter(|&i| sys.inv(i) != i && !trivial(i) && !trivial(sys.inv(i))).collect()
}

/// The order on `keep` with every relation `s <= inv(s)` removed.
pub fn regularized_le(sys: &SeparationSystem, keep: &[usize], a: usize, b: usize) -> bool {
    let (x, y) = (keep[a], keep[b]);
    sys.le(x, y) && (x == y || y != sys.inv(x))
}

/// Leaves of `tree` as ground set; oriented edge `i` becomes the pair of
/// leaves behind its tail and the leaves beyond its head.
pub fn leaf_family(tree: &GraphTree) -> (Vec<usize>, Vec<(Members, Members)>) {
    let leaves: Vec<usize> = (0..tree.node_count()).filter(|&t| tree.degree(t) == 1).collect();
    let d = distances(tree);
    let pairs = (0..tree.oriented_count())
        .map(|i| {
            let (x, y) = tree.oriented(i);
            let side = |near: usize, far: usize| -> Members {
                (0..leaves.len()).filter(|&k| d[leaves[k]][near] < d[leaves[k]][far]).collect()
            };
            (side(x, y), side(y, x))
        })
        .collect();
    (leaves, pairs)
}

/// A random system on `seps` separations: random relations closed with their
/// duals, occasionally with a degenerate element. `None` when the relations
/// close into a cycle.
pub fn random_system<R: rand::Rng>(rng: &mut R, seps: usize) -> Option<SeparationSystem> {
    let mut inv = Vec::new();
    for _ in 0..seps {
        let k = inv.len();
        if rng.gen_bool(0.1) {
            inv.push(k);
        } else {
            inv.extend([k + 1, k]);
        }
    }
    let n = inv.len();
    let generators: Vec<(usize, usize)> = (0..rng.gen_range(0..=n))
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .filter(|&(a, b)| a != b)
        .collect();
    SeparationSystem::new(n, inv, &generators).ok()
}
