mod common;

use tressec_core::bipart::{
    dedupe, indistinguishable_pairs, orientation_embed, recover, recover_sparse, BipartError,
    BipartitionFamily, Premise,
};
use tressec_core::gen::{self, NestedShape, STreeShape};
use tressec_core::graphdecomp::{
    decomposition_from_treeset, extract_separations, Graph, TreeDecomposition,
};
use tressec_core::orient::Limits;
use tressec_core::stree::{
    essentialize, splitting_sets, stree_from_treeset, treeset_from_stree, StarFamily,
};
use tressec_core::treebridge::{edge_tree_set, GraphTree};
use tressec_core::Members;

fn degree_two_free() -> GraphTree {
    GraphTree::from_labelled(
        &["A", "B", "l1", "l2", "l3", "l4", "l5"],
        &[("A", "B"), ("A", "l1"), ("A", "l2"), ("A", "l3"), ("B", "l4"), ("B", "l5")],
    )
    .unwrap()
}

/// The leaf family of `tree` with the first leaf cloned under `name`.
fn with_clone(tree: &GraphTree, name: &str) -> BipartitionFamily {
    let (leaves, pairs) = common::leaf_family(tree);
    let clone = leaves.len();
    let pairs = pairs
        .into_iter()
        .map(|(mut a, mut b)| {
            for side in [&mut a, &mut b] {
                if side.contains(&0) {
                    side.insert(clone);
                }
            }
            (a, b)
        })
        .collect();
    let mut ground: Vec<String> = leaves.iter().map(|&t| tree.label(t).to_string()).collect();
    ground.push(name.to_string());
    BipartitionFamily::new(ground, pairs).unwrap()
}

#[test]
fn clones_fail_the_first_premise() {
    let tree = gen::path_tree(3);
    let sys = edge_tree_set(&tree).system;
    let emb = orientation_embed(&sys).unwrap();
    let mut pairs = emb.family.pairs().to_vec();
    let clone = emb.family.ground().len();
    for (a, b) in &mut pairs {
        for side in [a, b] {
            if side.contains(&0) {
                side.insert(clone);
            }
        }
    }
    let mut ground = emb.family.ground().to_vec();
    ground.push("clone".into());
    let family = BipartitionFamily::new(ground, pairs).unwrap();
    assert_eq!(indistinguishable_pairs(&family), vec![(0, clone)]);
    let identity: Vec<usize> = (0..sys.len()).collect();
    assert!(matches!(
        recover(&family, &sys, &identity),
        Err(BipartError::PremiseFailed { premise: Premise::First, .. })
    ));
    assert!(recover(&dedupe(&family), &sys, &identity).is_ok());
}

#[test]
fn duplicated_leaf_fails_uniqueness_until_deduplicated() {
    let tree = degree_two_free();
    let sys = edge_tree_set(&tree).system;
    let identity: Vec<usize> = (0..sys.len()).collect();
    let family = with_clone(&tree, "l1'");
    assert!(matches!(
        recover_sparse(&family, &sys, &identity),
        Err(BipartError::PremiseFailed { premise: Premise::Uniqueness, .. })
    ));
    let rec = recover_sparse(&dedupe(&family), &sys, &identity).unwrap();
    assert_eq!(rec.h.iter().flatten().count(), 5);
}

#[test]
fn rebuilt_stree_is_canonically_isomorphic() {
    let mut rng = gen::seeded(21);
    let limits = Limits::default();
    for _ in 0..40 {
        let shape = STreeShape {
            system: NestedShape { nodes: 6, small_leaf: 0.0, trivial: 1 },
            max_nodes: 9,
            injections: 3,
        };
        let (st, family) = gen::random_stree(&mut rng, shape);
        let (essential, _, _) = essentialize(&st, &family).unwrap();
        let spanned = treeset_from_stree(&essential).unwrap();
        let tau = &spanned.image.system;
        let fam = StarFamily::new(splitting_sets(tau, &limits).unwrap());
        let rebuilt = stree_from_treeset(tau, &fam, &limits).unwrap();
        // alpha' maps the rebuilt tree's oriented edges to tau, alpha the
        // essential one's; compose through tau.
        let position = |x: usize| spanned.map.iter().position(|&y| y == x).unwrap();
        let map: Vec<usize> = rebuilt.alpha().iter().map(|&x| position(x)).collect();
        let a = edge_tree_set(rebuilt.tree()).system;
        let b = edge_tree_set(essential.tree()).system;
        assert!(a.is_isomorphism_onto(&b, &map));
    }
}

#[test]
fn grid_with_two_vertical_cuts() {
    let grid = Graph::grid(3, 3);
    let column = |c: usize| -> Members { (0..3).map(|r| r * 3 + c).collect() };
    let union = |a: &[usize]| -> Members { a.iter().flat_map(|&c| column(c)).collect() };
    let seps = vec![(union(&[0, 1]), union(&[1, 2])), (union(&[1, 2]), union(&[0, 1]))];
    let tree = GraphTree::from_labelled(&["L", "R"], &[("L", "R")]).unwrap();
    let td =
        TreeDecomposition::new(grid.clone(), tree, vec![union(&[0, 1]), union(&[1, 2])]).unwrap();
    let extracted = extract_separations(&td).unwrap();
    assert_eq!(extracted.separations, seps);

    let grid = Graph::grid(3, 5);
    let column = |c: usize| -> Members { (0..3).map(|r| r * 5 + c).collect() };
    let union = |a: &[usize]| -> Members { a.iter().flat_map(|&c| column(c)).collect() };
    let seps = vec![
        (union(&[0, 1]), union(&[1, 2, 3, 4])),
        (union(&[1, 2, 3, 4]), union(&[0, 1])),
        (union(&[0, 1, 2, 3]), union(&[3, 4])),
        (union(&[3, 4]), union(&[0, 1, 2, 3])),
    ];
    let rebuilt = decomposition_from_treeset(&grid, &seps, &Limits::default()).unwrap();
    let mut parts = rebuilt.decomposition.parts().to_vec();
    parts.sort();
    let mut expected = vec![union(&[0, 1]), union(&[1, 2, 3]), union(&[3, 4])];
    expected.sort();
    assert_eq!(parts, expected);
}
