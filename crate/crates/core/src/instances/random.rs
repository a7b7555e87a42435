//! Seeded random instances.
//!
//! Up to [`UNIFORM_MAX_N`] points a tree is drawn by decoding a uniform
//! Prüfer sequence and rejecting trees with a crossing pair, which is
//! exactly uniform over plane spanning trees. Beyond that the acceptance
//! rate collapses, so trees are grown Kruskal-style from a shuffled list of
//! all chords, skipping chords that cross the partial tree or close a
//! cycle. This always ends in a plane spanning tree (hull edges never
//! cross anything) but is not uniform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Instance;
use crate::plane_trees::{validate_tree, Chord, ConvexSet, PlaneTree};

pub const UNIFORM_MAX_N: usize = 10;

/// Two independently sampled trees on `n` points, deterministic per seed.
///
/// # Panics
/// If `n` is outside the supported range `3..=32`.
pub fn random_instance(n: usize, seed: u64) -> Instance {
    let points = ConvexSet::new(n).expect("random_instance needs 3 <= n <= 32");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        if n <= UNIFORM_MAX_N {
            uniform_tree(n, rng)
        } else {
            kruskal_tree(points, rng)
        }
    };
    let t_initial = draw(&mut rng);
    let t_final = draw(&mut rng);
    Instance::new(format!("random-n{n}-s{seed}"), t_initial, t_final, format!("random_instance(n={n}, seed={seed})"))
        .expect("same point count")
}

fn uniform_tree(n: usize, rng: &mut impl Rng) -> PlaneTree {
    loop {
        let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        if let Ok(t) = validate_tree(&prufer_decode(n, &code), n) {
            return t;
        }
    }
}

fn prufer_decode(n: usize, code: &[usize]) -> Vec<Chord> {
    let mut degree = vec![1usize; n];
    for &x in code {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in code {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push(Chord::new(leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push(Chord::new(rest[0], rest[1]));
    edges
}

fn kruskal_tree(points: ConvexSet, rng: &mut impl Rng) -> PlaneTree {
    let n = points.n();
    let mut candidates: Vec<Chord> = points.chords().collect();
    candidates.shuffle(rng);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut chosen: Vec<Chord> = Vec::with_capacity(n - 1);
    for c in candidates {
        if chosen.iter().any(|d| c.crosses(*d)) {
            continue;
        }
        let (ra, rb) = (find(&mut parent, c.a()), find(&mut parent, c.b()));
        if ra == rb {
            continue;
        }
        parent[ra] = rb;
        chosen.push(c);
        if chosen.len() == n - 1 {
            break;
        }
    }
    PlaneTree::new(n, chosen).expect("greedy growth yields a plane spanning tree")
}
