//! Flips between plane spanning trees on points in convex position.

pub mod claims;
pub mod conjecture_lab;
pub mod export;
pub mod instances;
mod par;
pub mod plane_trees;
pub mod search;
pub mod sequences;
pub mod transforms;

pub use par::is_parallel;
pub use plane_trees::{Chord, ChordSet, ConvexSet, FlipKind, FlipMove, Move, PlaneTree, TreeError, TreeKey};
