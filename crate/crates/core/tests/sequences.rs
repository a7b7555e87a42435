use proptest::prelude::*;
use treeflip::claims::random_walk;
use treeflip::instances::random_instance;
use treeflip::sequences::{
    chain_decomposition, happy_edges, hull_parking_only, parking_edges, report, reverse_sequence, trace_length, FlipSequence,
};

fn walk() -> impl Strategy<Value = FlipSequence> {
    (4usize..=10, any::<u64>(), 0usize..16).prop_map(|(n, seed, len)| random_walk(&random_instance(n, seed).t_initial, len, seed))
}

proptest! {
    #[test]
    fn traces_add_up_to_the_length(seq in walk()) {
        let total: usize = seq.start.chords().map(|e| trace_length(&seq, e).unwrap()).sum();
        prop_assert_eq!(total, seq.len());
    }

    #[test]
    fn chains_partition_the_flips(seq in walk()) {
        let mut seen = vec![0usize; seq.len()];
        for c in chain_decomposition(&seq) {
            for i in c.flip_indices {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&k| k == 1));
    }

    #[test]
    fn report_is_consistent(seq in walk()) {
        let t_f = seq.end().unwrap();
        let r = report(&seq, &t_f).unwrap();
        let missing = t_f.chord_set().difference(seq.start.chord_set()).len();
        prop_assert!(r.length >= missing);
        let happy = happy_edges(&seq.start, &t_f).unwrap();
        for h in happy.iter() {
            prop_assert_eq!(r.fixed.contains(&h), trace_length(&seq, h).unwrap() == 0);
        }
        if hull_parking_only(&seq, &seq.start, &t_f).unwrap() {
            let points = seq.start.points();
            prop_assert!(parking_edges(&seq, &t_f).unwrap().iter().all(|c| points.is_hull_edge(c)));
        }
    }

    #[test]
    fn reversal_mirrors_the_sequence(seq in walk()) {
        let rev = reverse_sequence(&seq).unwrap();
        prop_assert_eq!(rev.len(), seq.len());
        prop_assert_eq!(rev.end().unwrap(), seq.start);
        prop_assert_eq!(&reverse_sequence(&rev).unwrap(), &seq);
        let mut a: Vec<usize> = chain_decomposition(&seq).iter().map(|c| c.trace_length()).collect();
        let mut b: Vec<usize> = chain_decomposition(&rev).iter().map(|c| c.trace_length()).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }
}
