//! Exact flip distance and exhaustive shortest-sequence enumeration.
//!
//! [`shortest_sequences`] is an iterative-deepening DFS: for each length
//! bound `L` starting at [`lower_bound`], it extends paths while
//! `depth + |t_f \ T| <= L`, never revisits a tree already on the path and
//! stops at the first `L` admitting a sequence. [`flip_distance_bfs`] is the
//! independent breadth-first oracle used to cross-check it.

mod bfs;
mod dfs;
mod slice;

pub use bfs::{count_shortest_paths_bfs, diameter, flip_distance_bfs, Diameter};
pub use dfs::shortest_sequences;
pub use slice::{reachable_slice, FlipGraphSlice, SliceArc, SliceMode, SliceNode};

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_trees::{crossed_by, FlipMove, PlaneTree};
use crate::sequences::{FlipSequence, PerfectRule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("trees live on {left} and {right} points")]
    PointMismatch { left: usize, right: usize },
    #[error("search inconclusive: {what} cap of {cap} exceeded")]
    CapExceeded { what: &'static str, cap: u64 },
    #[error("no sequence of length <= {max_length} satisfies the options")]
    NoSequence { max_length: usize },
}

impl SearchError {
    pub fn is_cap(&self) -> bool {
        matches!(self, SearchError::CapExceeded { .. })
    }
}

/// Restriction on the first non-perfect flip of a sequence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstFlipFilter {
    #[default]
    Any,
    /// The first non-perfect flip must insert a hull edge.
    NonPerfectOnHull,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    /// Budget of non-perfect flips per sequence; `None` is unlimited.
    pub max_nonperfect: Option<usize>,
    /// Inserted chords must lie in `t_i`, `t_f` or on the hull.
    pub restrict_parking_to_hull: bool,
    /// Never remove a chord shared by both endpoint trees.
    pub forbid_flipping_happy: bool,
    pub first_flip_filter: FirstFlipFilter,
    /// Only compatible flips. Shortest then means shortest among compatible
    /// sequences.
    pub compatible_only: bool,
    pub perfect_rule: PerfectRule,
    /// How many sequences to keep; counting continues past the cap.
    pub max_sequences: usize,
    /// Longest length bound tried before giving up.
    pub max_length: usize,
    /// DFS expansions allowed before the search is declared inconclusive.
    pub node_cap: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_nonperfect: None,
            restrict_parking_to_hull: false,
            forbid_flipping_happy: false,
            first_flip_filter: FirstFlipFilter::Any,
            compatible_only: false,
            perfect_rule: PerfectRule::Strict,
            max_sequences: 10_000,
            max_length: 64,
            node_cap: 500_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub optimum: usize,
    /// Exact number of optimal sequences satisfying the options.
    pub count: u64,
    /// The first `max_sequences` of them in deterministic DFS order.
    pub sequences: Vec<FlipSequence>,
    pub lower_bound: usize,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn is_truncated(&self) -> bool {
        (self.sequences.len() as u64) < self.count
    }
}

pub(crate) fn check_same_n(t_i: &PlaneTree, t_f: &PlaneTree) -> Result<(), SearchError> {
    if t_i.n() != t_f.n() {
        return Err(SearchError::PointMismatch {
            left: t_i.n(),
            right: t_f.n(),
        });
    }
    Ok(())
}

/// Target chords still missing from `t`.
pub(crate) fn missing(t: &PlaneTree, t_f: &PlaneTree) -> usize {
    t_f.n() - 1 - t.chord_set().intersection_len(t_f.chord_set())
}

/// `m = |t_f \ t_i|`, plus one when no first flip in either direction can
/// insert a chord of the other tree (each such chord is crossed at least
/// twice by the other tree).
pub fn lower_bound(t_i: &PlaneTree, t_f: &PlaneTree) -> Result<usize, SearchError> {
    check_same_n(t_i, t_f)?;
    let m = missing(t_i, t_f);
    if m == 0 {
        return Ok(0);
    }
    let blocked = |from: &PlaneTree, to: &PlaneTree| {
        to.chord_set()
            .difference(from.chord_set())
            .iter()
            .all(|c| crossed_by(c, from.chord_set()).len() >= 2)
    };
    Ok(if blocked(t_i, t_f) && blocked(t_f, t_i) { m + 1 } else { m })
}

/// Per-move admissibility under `opts`, independent of search depth.
pub(crate) struct MoveFilter<'a> {
    pub t_i: &'a PlaneTree,
    pub t_f: &'a PlaneTree,
    pub opts: &'a SearchOptions,
}

impl MoveFilter<'_> {
    /// Whether `m` may be played given whether a non-perfect flip has
    /// happened yet. Budget is checked by the caller.
    pub fn allows(&self, m: &FlipMove, nonperfect_seen: bool) -> bool {
        let opts = self.opts;
        if opts.compatible_only && !m.kind.is_compatible() {
            return false;
        }
        if opts.forbid_flipping_happy && self.t_i.contains(m.removed) && self.t_f.contains(m.removed) {
            return false;
        }
        let points = self.t_f.points();
        if opts.restrict_parking_to_hull
            && !self.t_i.contains(m.inserted)
            && !self.t_f.contains(m.inserted)
            && !points.is_hull_edge(m.inserted)
        {
            return false;
        }
        if opts.first_flip_filter == FirstFlipFilter::NonPerfectOnHull
            && !nonperfect_seen
            && !self.is_perfect(m)
            && !points.is_hull_edge(m.inserted)
        {
            return false;
        }
        true
    }

    pub fn is_perfect(&self, m: &FlipMove) -> bool {
        self.opts.perfect_rule.is_perfect(m.as_move(), self.t_f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_trees::Chord;

    fn c(a: usize, b: usize) -> Chord {
        Chord::new(a, b)
    }

    #[test]
    fn lower_bound_examples() {
        let star = PlaneTree::new(4, [c(0, 1), c(0, 2), c(0, 3)]).unwrap();
        let path = PlaneTree::new(4, [c(0, 1), c(1, 2), c(2, 3)]).unwrap();
        assert_eq!(lower_bound(&star, &star).unwrap(), 0);
        assert_eq!(lower_bound(&star, &path).unwrap(), 2);
        let p5 = PlaneTree::new(5, [c(0, 1), c(1, 2), c(2, 3), c(3, 4)]).unwrap();
        assert!(lower_bound(&star, &p5).is_err());
    }
}
