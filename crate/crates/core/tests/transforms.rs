use treeflip::claims::random_walk;
use treeflip::instances::random_instance;
use treeflip::search::{shortest_sequences, SearchOptions};
use treeflip::sequences::{chain_decomposition, trace_length, FlipSequence};
use treeflip::transforms::{normalize, parks, relocate_parking_to_hull, split_diagonal_parking};

/// Shortest sequences (flagged `true`) and random walks on small random
/// instances.
fn corpus_sequences() -> Vec<(FlipSequence, bool)> {
    let opts = SearchOptions {
        max_sequences: 60,
        ..SearchOptions::default()
    };
    let mut out = Vec::new();
    for seed in 0..120u64 {
        let n = 5 + (seed % 4) as usize;
        let inst = random_instance(n, seed);
        let found = shortest_sequences(&inst.t_initial, &inst.t_final, &opts).unwrap();
        out.extend(found.sequences.into_iter().map(|s| (s, true)));
        out.push((random_walk(&inst.t_initial, 4 + (seed % 8) as usize, seed), false));
    }
    out
}

#[test]
fn park_rewrites_keep_their_contracts() {
    let (mut relocated, mut split) = (0, 0);
    for (seq, shortest) in corpus_sequences() {
        let end = seq.end().unwrap();
        for park in parks(&seq).unwrap().into_iter().filter(|p| p.diagonal) {
            if park.enter_compatible || park.leave_compatible {
                let out = relocate_parking_to_hull(&seq, park.enter).unwrap_or_else(|e| panic!("{e}: {seq:?} {park:?}"));
                assert!(out.length_delta == 0 || (!shortest && out.length_delta < 0));
                assert!(out.other_traces_unchanged());
                assert_eq!(out.sequence.end().unwrap(), end);
                relocated += 1;
            } else {
                let out = split_diagonal_parking(&seq, park.enter).unwrap_or_else(|e| panic!("{e}: {seq:?} {park:?}"));
                assert!(out.length_delta == 1 || (!shortest && out.length_delta < 1));
                assert!(out.other_traces_unchanged());
                assert_eq!(out.sequence.end().unwrap(), end);
                split += 1;
            }
        }
    }
    eprintln!("relocated {relocated}, split {split}");
    assert!(relocated > 0 && split > 0);
}

#[test]
fn normalization_flips_the_edge_at_most_once() {
    let mut applied = 0;
    for (seq, _) in corpus_sequences() {
        let trees = seq.replay().unwrap();
        for e in seq.start.chords() {
            if trees.iter().any(|t| t.chords().any(|c| c.crosses(e))) {
                continue;
            }
            let out = normalize(&seq, e).unwrap();
            assert!(out.length_delta <= 0);
            assert!(trace_length(&out.sequence, e).unwrap() <= 1);
            assert_eq!(out.sequence.end().unwrap(), seq.end().unwrap());
            let _ = chain_decomposition(&out.sequence);
            applied += 1;
        }
    }
    assert!(applied > 0);
}
