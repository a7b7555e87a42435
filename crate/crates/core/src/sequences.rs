//! Flip sequences, replay, traces and sequence-level classifications.
//!
//! A trace follows one edge of the start tree through every position it is
//! flipped to. Traces are computed by [`chain_decomposition`]: each flip
//! `x -> y` extends the chain whose current tip is `x`, or opens a new chain
//! rooted at `x` when `x` is a start edge that has not moved yet.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_trees::{Chord, ChordSet, Move, PlaneTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("move {index} ({mv}) is invalid: {source}")]
    InvalidMove {
        index: usize,
        mv: Move,
        #[source]
        source: TreeError,
    },
    #[error("trees live on {left} and {right} points")]
    PointMismatch { left: usize, right: usize },
    #[error("sequence does not end at the given final tree")]
    EndpointMismatch,
    #[error("move index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("chord {chord} is not an edge of the start tree")]
    NotInStart { chord: Chord },
}

/// When a flip counts as perfect with respect to a target tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerfectRule {
    /// Inserts a target chord and removes a non-target chord, so every
    /// perfect flip grows the overlap with the target by one.
    #[default]
    Strict,
    /// Inserts a target chord, whatever it removes.
    InsertOnly,
}

impl PerfectRule {
    pub fn is_perfect(self, m: Move, target: &PlaneTree) -> bool {
        match self {
            PerfectRule::Strict => target.contains(m.inserted) && !target.contains(m.removed),
            PerfectRule::InsertOnly => target.contains(m.inserted),
        }
    }
}

/// A start tree and the moves applied to it, in order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlipSequence {
    pub start: PlaneTree,
    pub moves: Vec<Move>,
}

impl FlipSequence {
    pub fn new(start: PlaneTree, moves: Vec<Move>) -> Self {
        Self { start, moves }
    }

    pub fn empty(start: PlaneTree) -> Self {
        Self::new(start, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn replay(&self) -> Result<Vec<PlaneTree>, SequenceError> {
        replay(self)
    }

    pub fn end(&self) -> Result<PlaneTree, SequenceError> {
        Ok(*self.replay()?.last().expect("replay yields the start tree"))
    }
}

/// `T_0, ..., T_k`, failing at the first invalid move.
pub fn replay(seq: &FlipSequence) -> Result<Vec<PlaneTree>, SequenceError> {
    let mut trees = Vec::with_capacity(seq.moves.len() + 1);
    let mut cur = seq.start;
    trees.push(cur);
    for (index, &mv) in seq.moves.iter().enumerate() {
        cur = cur
            .apply_flip(mv.removed, mv.inserted)
            .map_err(|source| SequenceError::InvalidMove { index, mv, source })?;
        trees.push(cur);
    }
    Ok(trees)
}

/// The successive positions of one tracked edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    /// Full trace, starting with the root chord.
    pub links: Vec<Chord>,
    /// Sequence positions of the flips `links[i] -> links[i + 1]`.
    pub flip_indices: Vec<usize>,
}

impl Chain {
    pub fn root(&self) -> Chord {
        self.links[0]
    }

    pub fn tip(&self) -> Chord {
        *self.links.last().expect("chain has a root")
    }

    /// Number of flips in the chain.
    pub fn trace_length(&self) -> usize {
        self.flip_indices.len()
    }
}

/// Partitions the flips of `seq` into chains, ordered by first flip.
///
/// A start edge that is flipped away, later re-inserted by another chain
/// and removed again extends that other chain: removal always follows the
/// chain whose tip currently sits on the chord.
pub fn chain_decomposition(seq: &FlipSequence) -> Vec<Chain> {
    let mut chains: Vec<Chain> = Vec::new();
    let mut tip_owner: BTreeMap<Chord, usize> = BTreeMap::new();
    for (i, m) in seq.moves.iter().enumerate() {
        let id = match tip_owner.remove(&m.removed) {
            Some(id) => id,
            None => {
                chains.push(Chain {
                    links: vec![m.removed],
                    flip_indices: Vec::new(),
                });
                chains.len() - 1
            }
        };
        chains[id].links.push(m.inserted);
        chains[id].flip_indices.push(i);
        tip_owner.insert(m.inserted, id);
    }
    chains
}

/// Trace length of a start-tree edge: 0 if it never moves.
pub fn trace_length(seq: &FlipSequence, e: Chord) -> Result<usize, SequenceError> {
    if !seq.start.contains(e) {
        return Err(SequenceError::NotInStart { chord: e });
    }
    Ok(chain_decomposition(seq)
        .iter()
        .find(|c| c.root() == e)
        .map_or(0, Chain::trace_length))
}

/// Trace of a start-tree edge, `(e)` if it never moves.
pub fn trace(seq: &FlipSequence, e: Chord) -> Result<Vec<Chord>, SequenceError> {
    if !seq.start.contains(e) {
        return Err(SequenceError::NotInStart { chord: e });
    }
    Ok(chain_decomposition(seq)
        .into_iter()
        .find(|c| c.root() == e)
        .map_or_else(|| vec![e], |c| c.links))
}

fn same_n(a: &PlaneTree, b: &PlaneTree) -> Result<(), SequenceError> {
    if a.n() != b.n() {
        return Err(SequenceError::PointMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

pub fn happy_edges(t_i: &PlaneTree, t_f: &PlaneTree) -> Result<ChordSet, SequenceError> {
    same_n(t_i, t_f)?;
    Ok(t_i.chord_set().intersection(t_f.chord_set()))
}

fn replay_to(seq: &FlipSequence, t_f: &PlaneTree) -> Result<Vec<PlaneTree>, SequenceError> {
    same_n(&seq.start, t_f)?;
    let trees = replay(seq)?;
    if trees.last() != Some(t_f) {
        return Err(SequenceError::EndpointMismatch);
    }
    Ok(trees)
}

/// Chords in some tree along `seq` but in neither endpoint tree.
pub fn parking_edges(seq: &FlipSequence, t_f: &PlaneTree) -> Result<ChordSet, SequenceError> {
    replay_to(seq, t_f)?;
    let ends = seq.start.chord_set().union(t_f.chord_set());
    Ok(seq
        .moves
        .iter()
        .map(|m| m.inserted)
        .filter(|c| !ends.contains(*c))
        .collect())
}

/// Whether move `i` inserts a chord that is never removed afterwards.
pub fn is_final_flip(seq: &FlipSequence, i: usize) -> Result<bool, SequenceError> {
    let m = seq.moves.get(i).ok_or(SequenceError::IndexOutOfRange {
        index: i,
        len: seq.moves.len(),
    })?;
    Ok(!seq.moves[i + 1..].iter().any(|later| later.removed == m.inserted))
}

pub fn nonperfect_count(seq: &FlipSequence, t_f: &PlaneTree) -> usize {
    nonperfect_count_with(seq, t_f, PerfectRule::default())
}

pub fn nonperfect_count_with(seq: &FlipSequence, t_f: &PlaneTree, rule: PerfectRule) -> usize {
    seq.moves.iter().filter(|&&m| !rule.is_perfect(m, t_f)).count()
}

/// Whether every tree along `seq` uses only chords of `t_i`, `t_f` or the hull.
pub fn hull_parking_only(seq: &FlipSequence, t_i: &PlaneTree, t_f: &PlaneTree) -> Result<bool, SequenceError> {
    if seq.start != *t_i {
        return Err(SequenceError::EndpointMismatch);
    }
    let trees = replay_to(seq, t_f)?;
    let points = t_i.points();
    let allowed = t_i.chord_set().union(t_f.chord_set());
    Ok(trees
        .iter()
        .all(|t| t.chords().all(|c| allowed.contains(c) || points.is_hull_edge(c))))
}

/// The same path walked from its end back to its start.
pub fn reverse_sequence(seq: &FlipSequence) -> Result<FlipSequence, SequenceError> {
    let end = seq.end()?;
    Ok(FlipSequence::new(
        end,
        seq.moves.iter().rev().map(|m| m.reversed()).collect(),
    ))
}

/// Summary of a sequence against a final tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub length: usize,
    pub happy: Vec<Chord>,
    /// Happy edges with trace length zero.
    pub fixed: Vec<Chord>,
    pub parking: Vec<Chord>,
    /// Trace length of every start edge, in chord order.
    pub trace_lengths: BTreeMap<Chord, usize>,
    pub max_trace_length: usize,
    pub nonperfect: usize,
    pub hull_parking_only: bool,
}

pub fn report(seq: &FlipSequence, t_f: &PlaneTree) -> Result<SequenceReport, SequenceError> {
    let parking = parking_edges(seq, t_f)?;
    let happy = happy_edges(&seq.start, t_f)?;
    let chains = chain_decomposition(seq);
    let mut trace_lengths: BTreeMap<Chord, usize> = seq.start.chords().map(|c| (c, 0)).collect();
    for chain in &chains {
        // Chains rooted at mid-sequence chords cannot occur: every removed
        // chord is either an untouched start edge or a chain tip.
        *trace_lengths.get_mut(&chain.root()).expect("chain rooted at start edge") = chain.trace_length();
    }
    let moved: BTreeSet<Chord> = chains.iter().map(Chain::root).collect();
    Ok(SequenceReport {
        length: seq.len(),
        happy: happy.iter().collect(),
        fixed: happy.iter().filter(|c| !moved.contains(c)).collect(),
        parking: parking.iter().collect(),
        max_trace_length: trace_lengths.values().copied().max().unwrap_or(0),
        trace_lengths,
        nonperfect: nonperfect_count(seq, t_f),
        hull_parking_only: hull_parking_only(seq, &seq.start, t_f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: usize, b: usize) -> Chord {
        Chord::new(a, b)
    }

    fn m(a: (usize, usize), b: (usize, usize)) -> Move {
        Move::new(c(a.0, a.1), c(b.0, b.1))
    }

    fn star4() -> PlaneTree {
        PlaneTree::new(4, [c(0, 1), c(0, 2), c(0, 3)]).unwrap()
    }

    #[test]
    fn replay_examples() {
        assert_eq!(replay(&FlipSequence::empty(star4())).unwrap(), vec![star4()]);
        let seq = FlipSequence::new(star4(), vec![m((0, 2), (1, 2)), m((0, 3), (2, 3))]);
        let trees = replay(&seq).unwrap();
        assert_eq!(trees.len(), 3);
        assert_eq!(trees[2].to_vec(), vec![c(0, 1), c(1, 2), c(2, 3)]);
        let bad = FlipSequence::new(star4(), vec![m((0, 2), (0, 1))]);
        assert!(matches!(
            replay(&bad),
            Err(SequenceError::InvalidMove {
                index: 0,
                source: TreeError::InsertedPresent { .. },
                ..
            })
        ));
    }

    #[test]
    fn chains_follow_tips() {
        let t = PlaneTree::new(5, [c(0, 1), c(1, 2), c(2, 3), c(3, 4)]).unwrap();
        let seq = FlipSequence::new(t, vec![m((1, 2), (0, 2))]);
        let chains = chain_decomposition(&seq);
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].links, vec![c(1, 2), c(0, 2)]);
        assert_eq!(trace_length(&seq, c(0, 1)).unwrap(), 0);

        let seq = FlipSequence::new(t, vec![m((1, 2), (0, 2)), m((0, 2), (0, 3))]);
        seq.replay().unwrap();
        let chains = chain_decomposition(&seq);
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].links, vec![c(1, 2), c(0, 2), c(0, 3)]);
        assert_eq!(trace_length(&seq, c(1, 2)).unwrap(), 2);
        assert!(!is_final_flip(&seq, 0).unwrap());
        assert!(is_final_flip(&seq, 1).unwrap());
        assert!(is_final_flip(&seq, 2).is_err());
        assert!(trace_length(&seq, c(0, 4)).is_err());
    }

    #[test]
    fn reinserted_start_edge_extends_the_other_chain() {
        // Path 0-1-2-3-4. Chain A: 12 -> 13. Chain B: 23 -> 12 (re-inserts 12),
        // then 12 -> 23 extends B, not A.
        let t = PlaneTree::new(5, [c(0, 1), c(1, 2), c(2, 3), c(3, 4)]).unwrap();
        let seq = FlipSequence::new(
            t,
            vec![m((1, 2), (1, 3)), m((2, 3), (1, 2)), m((1, 2), (2, 3))],
        );
        seq.replay().unwrap();
        let chains = chain_decomposition(&seq);
        assert_eq!(chains.len(), 2);
        assert_eq!(chains[0].links, vec![c(1, 2), c(1, 3)]);
        assert_eq!(chains[1].links, vec![c(2, 3), c(1, 2), c(2, 3)]);
        assert_eq!(trace_length(&seq, c(1, 2)).unwrap(), 1);
        assert_eq!(trace_length(&seq, c(2, 3)).unwrap(), 2);
        let total: usize = t.chords().map(|e| trace_length(&seq, e).unwrap()).sum();
        assert_eq!(total, seq.len());
    }

    #[test]
    fn edge_sets() {
        let path = PlaneTree::new(4, [c(0, 1), c(1, 2), c(2, 3)]).unwrap();
        assert_eq!(happy_edges(&star4(), &star4()).unwrap().len(), 3);
        let other = PlaneTree::new(4, [c(1, 2), c(1, 3), c(0, 3)]).unwrap();
        let all5 = crate::plane_trees::enumerate_all_trees(5, 1000).unwrap();
        let disjoint = all5
            .iter()
            .find(|t| happy_edges(&all5[0], t).unwrap().is_empty())
            .unwrap();
        assert!(happy_edges(&all5[0], disjoint).unwrap().is_empty());
        assert_eq!(happy_edges(&star4(), &other).unwrap().len(), 1);
        let p5 = PlaneTree::new(5, [c(0, 1), c(1, 2), c(2, 3), c(3, 4)]).unwrap();
        assert!(happy_edges(&star4(), &p5).is_err());

        let seq = FlipSequence::new(star4(), vec![m((0, 2), (1, 2)), m((0, 3), (2, 3))]);
        assert!(parking_edges(&seq, &path).unwrap().is_empty());
        assert_eq!(nonperfect_count(&seq, &path), 0);
        assert!(hull_parking_only(&seq, &star4(), &path).unwrap());
        assert!(parking_edges(&seq, &star4()).is_err());
    }

    #[test]
    fn hull_park_chain() {
        // 0-2 parks on hull edge 2-3 and then moves to 1-3.
        let t_i = PlaneTree::new(5, [c(0, 1), c(0, 2), c(0, 4), c(3, 4)]).unwrap();
        let seq = FlipSequence::new(t_i, vec![m((0, 2), (2, 3)), m((2, 3), (1, 2))]);
        let t_f = seq.end().unwrap();
        assert_eq!(parking_edges(&seq, &t_f).unwrap().iter().collect::<Vec<_>>(), vec![c(2, 3)]);
        assert!(hull_parking_only(&seq, &t_i, &t_f).unwrap());
        assert_eq!(nonperfect_count(&seq, &t_f), 1);
        let r = report(&seq, &t_f).unwrap();
        assert_eq!(r.max_trace_length, 2);
        assert_eq!(r.fixed, vec![c(0, 1), c(0, 4), c(3, 4)]);
    }

    #[test]
    fn reverse_round_trip() {
        let seq = FlipSequence::new(star4(), vec![m((0, 2), (1, 2)), m((0, 3), (2, 3))]);
        let rev = reverse_sequence(&seq).unwrap();
        rev.replay().unwrap();
        assert_eq!(rev.start, seq.end().unwrap());
        assert_eq!(rev.moves[0], m((2, 3), (0, 3)));
        assert_eq!(reverse_sequence(&rev).unwrap(), seq);
        let single = FlipSequence::new(star4(), vec![m((0, 2), (1, 2))]);
        let r = reverse_sequence(&single).unwrap();
        assert_eq!(r.moves, vec![m((1, 2), (0, 2))]);
        assert_eq!(r.start, star4().apply_flip(c(0, 2), c(1, 2)).unwrap());
    }

    #[test]
    fn perfect_rules_differ_on_target_swaps() {
        let target = PlaneTree::new(4, [c(0, 1), c(1, 2), c(2, 3)]).unwrap();
        let swap = m((0, 1), (2, 3));
        assert!(PerfectRule::InsertOnly.is_perfect(swap, &target));
        assert!(!PerfectRule::Strict.is_perfect(swap, &target));
    }
}
