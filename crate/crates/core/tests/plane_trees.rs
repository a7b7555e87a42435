use proptest::prelude::*;
use treeflip::claims::random_walk;
use treeflip::instances::random_instance;
use treeflip::plane_trees::{chords_cross, legal_flips, Chord, ConvexSet, FlipKind, PlaneTree};

fn tree() -> impl Strategy<Value = PlaneTree> {
    (4usize..=12, any::<u64>()).prop_map(|(n, seed)| random_instance(n, seed).t_initial)
}

proptest! {
    #[test]
    fn crossing_is_symmetric_and_ignores_shared_endpoints(n in 4usize..=32, a in 0usize..32, b in 0usize..32, c in 0usize..32, d in 0usize..32) {
        prop_assume!(a < n && b < n && c < n && d < n && a != b && c != d);
        let (x, y) = (Chord::new(a, b), Chord::new(c, d));
        prop_assert_eq!(chords_cross(n, x, y).unwrap(), chords_cross(n, y, x).unwrap());
        if x.shared_endpoint(y).is_some() {
            prop_assert!(!x.crosses(y));
        }
    }

    #[test]
    fn every_legal_flip_is_undone_by_its_reverse(t in tree()) {
        for f in legal_flips(&t) {
            let next = t.apply_flip(f.removed, f.inserted).unwrap();
            let back = legal_flips(&next);
            prop_assert!(back.iter().any(|g| g.removed == f.inserted && g.inserted == f.removed));
            prop_assert_eq!(next.apply_flip(f.inserted, f.removed).unwrap(), t);
            prop_assert_eq!(t.classify_flip(f.removed, f.inserted).unwrap(), f.kind);
        }
    }

    #[test]
    fn hull_edges_are_never_removed_by_a_crossing_flip(t in tree()) {
        let points = t.points();
        for f in legal_flips(&t) {
            if points.is_hull_edge(f.removed) {
                prop_assert_ne!(f.kind, FlipKind::Crossing);
            }
        }
    }

    #[test]
    fn keys_round_trip(t in tree(), len in 0usize..10, seed in any::<u64>()) {
        let end = random_walk(&t, len, seed).end().unwrap();
        prop_assert_eq!(PlaneTree::from_key(end.key().as_str()).unwrap(), end);
    }
}

#[test]
fn hull_edges_cross_nothing() {
    for n in 4..=10 {
        let p = ConvexSet::new(n).unwrap();
        for h in p.hull_edges() {
            assert!(p.chords().all(|c| !h.crosses(c)));
        }
    }
}
