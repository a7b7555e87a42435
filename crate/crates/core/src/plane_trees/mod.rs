//! Convex-position geometry and the plane spanning tree value type.
//!
//! Points are abstract labels `0..n` on a circle. A chord `(a, b)` always
//! has `a < b`; the wraparound hull edge is `(0, n-1)`.

mod chord;
mod enumerate;
mod tree;

pub use chord::{chords_cross, crossed_by, is_hull_edge, Chord, ChordSet, ConvexSet, MAX_POINTS};
pub use enumerate::{count_trees, enumerate_all_trees};
pub use tree::{classify_flip, legal_flips, validate_tree, FlipKind, FlipMove, Move, PlaneTree, TreeKey};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("point count {n} outside 3..={max}", max = MAX_POINTS)]
    PointCount { n: usize },
    #[error("bad chord {u}-{v}")]
    BadChord { u: usize, v: usize },
    #[error("chord {chord} has a label outside 0..{n}")]
    LabelOutOfRange { chord: Chord, n: usize },
    #[error("duplicate chord {chord}")]
    Duplicate { chord: Chord },
    #[error("expected {expected} chords, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("chord {chord} closes a cycle")]
    Cycle { chord: Chord },
    #[error("label {label} is disconnected")]
    Disconnected { label: usize },
    #[error("crossing pair ({first})x({second})")]
    Crossing { first: Chord, second: Chord },
    #[error("flip removes and inserts the same chord {chord}")]
    SameChord { chord: Chord },
    #[error("removed chord {chord} is not in the tree")]
    RemovedAbsent { chord: Chord },
    #[error("inserted chord {chord} already present")]
    InsertedPresent { chord: Chord },
    #[error("inserting {inserted} after removing {removed} leaves a cycle and disconnects the tree")]
    FlipCycle { removed: Chord, inserted: Chord },
    #[error("{count} trees on {n} points exceed the cap of {cap}")]
    CapExceeded { n: usize, count: u64, cap: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}
