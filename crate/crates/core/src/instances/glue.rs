//! Chains of parking12 blocks glued along happy hull edges.
//!
//! Block 0 is parking12 itself. Every further block is parking12 with its
//! labels rotated by one, which turns the happy edge `10-11` into the hull
//! edge `0-11`. That edge is identified with the happy hull edge `u-(u+1)`
//! of the previous block: ten new points are inserted after `u` and the
//! shared edge becomes a diagonal of the glued instance. The next block is
//! glued on the happy edge that was local `5-6` in the rotated block.

use super::{parking12, parking12_optimal, Instance, InstanceError};
use crate::plane_trees::{Chord, Move, PlaneTree, MAX_POINTS};
use crate::sequences::FlipSequence;

const BLOCK: usize = 12;

struct Glued {
    n: usize,
    /// Local-to-global label map of each block.
    maps: Vec<Vec<usize>>,
}

fn layout(k: usize) -> Result<Glued, InstanceError> {
    if k == 0 || 10 * k + 2 > MAX_POINTS {
        return Err(InstanceError::BadGlueCount { k });
    }
    let mut g = Glued {
        n: BLOCK,
        maps: vec![(0..BLOCK).collect()],
    };
    // Outgoing happy edge of the newest block, as global labels (u, u + 1).
    let mut u = 4;
    for _ in 1..k {
        for map in &mut g.maps {
            for x in map.iter_mut() {
                if *x > u {
                    *x += BLOCK - 2;
                }
            }
        }
        g.maps.push((0..BLOCK).map(|i| u + i).collect());
        g.n += BLOCK - 2;
        u += 5;
    }
    Ok(g)
}

fn rotate(c: Chord, block: usize) -> Chord {
    if block == 0 {
        c
    } else {
        Chord::new((c.a() + 1) % BLOCK, (c.b() + 1) % BLOCK)
    }
}

fn place(c: Chord, block: usize, map: &[usize]) -> Chord {
    let c = rotate(c, block);
    Chord::new(map[c.a()], map[c.b()])
}

fn glued_tree(g: &Glued, block_tree: &PlaneTree) -> PlaneTree {
    let mut chords: Vec<Chord> = g
        .maps
        .iter()
        .enumerate()
        .flat_map(|(b, map)| block_tree.chords().map(move |c| place(c, b, map)))
        .collect();
    chords.sort();
    chords.dedup();
    PlaneTree::new(g.n, chords).expect("glued blocks form a plane spanning tree")
}

/// `k` parking12 blocks on `10k + 2` points. `k` is limited to 3 by the
/// 32-point ceiling.
pub fn glue(k: usize) -> Result<Instance, InstanceError> {
    let g = layout(k)?;
    let p = parking12();
    Instance::new(
        format!("glue{k}"),
        glued_tree(&g, &p.t_initial),
        glued_tree(&g, &p.t_final),
        format!("{k} parking12 blocks glued along happy hull edges"),
    )
}

/// The block-optimal sequences of [`glue`]`(k)` played one block after the
/// other: length `8k`.
pub fn glue_sequence(k: usize) -> Result<FlipSequence, InstanceError> {
    let g = layout(k)?;
    let inst = glue(k)?;
    let block_moves = parking12_optimal().moves;
    let moves = g
        .maps
        .iter()
        .enumerate()
        .flat_map(|(b, map)| {
            block_moves
                .iter()
                .map(move |m| Move::new(place(m.removed, b, map), place(m.inserted, b, map)))
        })
        .collect();
    Ok(FlipSequence::new(inst.t_initial, moves))
}
