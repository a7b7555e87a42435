//! Length-preserving and length-bounded rewrites of flip sequences.
//!
//! Most rewrites act on a *park*: a chord `f` inserted by one flip
//! (`e -> f`) and removed by a later one (`f -> e'`). While `f` sits in the
//! tree it splits the polygon into two sides, every flip in between lives
//! entirely on one side, and the two sides can be replayed independently.
//! [`reorder_by_side`] is that commutation step on its own; the rewrites
//! build on it and validate every result by replay.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_trees::{classify_flip, Chord, ConvexSet, Move, PlaneTree, TreeError};
use crate::sequences::{chain_decomposition, reverse_sequence, Chain, FlipSequence, SequenceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("move {index} does not exist")]
    NoMove { index: usize },
    #[error("chord {chord} inserted at move {index} is never removed")]
    NotParked { chord: Chord, index: usize },
    #[error("park {chord} is a hull edge, not a diagonal")]
    NotDiagonal { chord: Chord },
    #[error("both flips of the park on {chord} are crossing flips")]
    BothCrossing { chord: Chord },
    #[error("park on {chord} is entered or left by a compatible flip")]
    NotBothCrossing { chord: Chord },
    #[error("separator {chord} is missing from the tree before move {index}")]
    SeparatorMissing { chord: Chord, index: usize },
    #[error("move {index} ({mv}) straddles the separator {chord}")]
    Straddles { index: usize, mv: Move, chord: Chord },
    #[error("{chord} is not an edge of the start tree")]
    NotInStart { chord: Chord },
    #[error("{chord} is crossed by {by} in the tree after move {index}")]
    Crossed { chord: Chord, by: Chord, index: usize },
    #[error("expected a single hull edge joining the two subtrees beside {chord}, found {found}")]
    HullChoice { chord: Chord, found: usize },
    #[error("rewrite is blocked: {reason}")]
    Blocked { reason: String },
    #[error("chain rooted at {root} has trace length {len}, expected {expected}")]
    ChainLength { root: Chord, len: usize, expected: usize },
}

/// A rewritten sequence and how its traces relate to the original.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteOutcome {
    pub sequence: FlipSequence,
    /// New length minus old length.
    pub length_delta: i64,
    /// Root of the chain the rewrite targets.
    pub changed_chain: Chord,
    /// For every other chain root: whether its trace is identical before
    /// and after.
    pub unchanged_traces: BTreeMap<Chord, bool>,
}

impl RewriteOutcome {
    fn new(before: &FlipSequence, after: FlipSequence, changed_chain: Chord) -> Self {
        let index = |s: &FlipSequence| -> BTreeMap<Chord, Vec<Chord>> {
            chain_decomposition(s).into_iter().map(|c| (c.root(), c.links)).collect()
        };
        let (old, new) = (index(before), index(&after));
        let unchanged_traces = old
            .keys()
            .chain(new.keys())
            .filter(|&&r| r != changed_chain)
            .map(|&r| (r, old.get(&r) == new.get(&r)))
            .collect();
        Self {
            length_delta: after.len() as i64 - before.len() as i64,
            sequence: after,
            changed_chain,
            unchanged_traces,
        }
    }

    pub fn other_traces_unchanged(&self) -> bool {
        self.unchanged_traces.values().all(|&same| same)
    }
}

/// A chord inserted by one flip and removed by a later one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Park {
    pub chord: Chord,
    /// Index of the flip `e -> chord`.
    pub enter: usize,
    /// Index of the flip `chord -> e'`.
    pub leave: usize,
    pub diagonal: bool,
    pub enter_compatible: bool,
    pub leave_compatible: bool,
}

impl Park {
    pub fn from(&self, seq: &FlipSequence) -> Chord {
        seq.moves[self.enter].removed
    }

    pub fn to(&self, seq: &FlipSequence) -> Chord {
        seq.moves[self.leave].inserted
    }
}

/// The park entered by move `enter`.
pub fn park_at(seq: &FlipSequence, enter: usize) -> Result<Park, TransformError> {
    let trees = seq.replay()?;
    park_in(seq, &trees, enter)
}

fn park_in(seq: &FlipSequence, trees: &[PlaneTree], enter: usize) -> Result<Park, TransformError> {
    let m = *seq.moves.get(enter).ok_or(TransformError::NoMove { index: enter })?;
    let leave = (enter + 1..seq.len())
        .find(|&j| seq.moves[j].removed == m.inserted)
        .ok_or(TransformError::NotParked {
            chord: m.inserted,
            index: enter,
        })?;
    let out = seq.moves[leave];
    let compatible = |t: &PlaneTree, mv: Move| {
        classify_flip(t, mv.removed, mv.inserted)
            .map(|k| k.is_compatible())
            .map_err(TransformError::from_tree)
    };
    Ok(Park {
        chord: m.inserted,
        enter,
        leave,
        diagonal: !seq.start.points().is_hull_edge(m.inserted),
        enter_compatible: compatible(&trees[enter], m)?,
        leave_compatible: compatible(&trees[leave], out)?,
    })
}

/// Every park of `seq`, by entering flip.
pub fn parks(seq: &FlipSequence) -> Result<Vec<Park>, TransformError> {
    let trees = seq.replay()?;
    (0..seq.len())
        .filter(|&i| seq.moves[i + 1..].iter().any(|m| m.removed == seq.moves[i].inserted))
        .map(|i| park_in(seq, &trees, i))
        .collect()
}

impl TransformError {
    fn from_tree(e: TreeError) -> Self {
        TransformError::Blocked { reason: e.to_string() }
    }
}

/// Labels of the boundary arc from `s.a()` to `s.b()` (side A) or from
/// `s.b()` around to `s.a()` (side B), in walk order.
fn arc(points: ConvexSet, s: Chord, side_a: bool) -> Vec<usize> {
    let n = points.n();
    if side_a {
        (s.a()..=s.b()).collect()
    } else {
        (s.b()..n).chain(0..=s.a()).collect()
    }
}

/// Whether `c` lies on side A of `s` (both endpoints in `s.a()..=s.b()`).
/// Chords that do not cross `s` lie on exactly one side.
fn on_side_a(s: Chord, c: Chord) -> bool {
    (s.a()..=s.b()).contains(&c.a()) && (s.a()..=s.b()).contains(&c.b())
}

/// Moves `range` of `seq` regrouped so that all side-A flips (relative to
/// `separator`) come first when `a_first`, each group in original order.
///
/// `separator` must be present in every tree of the range; then each flip
/// lies on one side and the two groups commute.
pub fn reorder_by_side(
    seq: &FlipSequence,
    separator: Chord,
    range: std::ops::Range<usize>,
    a_first: bool,
) -> Result<FlipSequence, TransformError> {
    let trees = seq.replay()?;
    let (a, b) = split_sides(seq, &trees, separator, range.clone())?;
    let (first, second) = if a_first { (a, b) } else { (b, a) };
    let mut moves = seq.moves[..range.start].to_vec();
    moves.extend(first);
    moves.extend(second);
    moves.extend_from_slice(&seq.moves[range.end..]);
    checked(seq, moves)
}

fn split_sides(
    seq: &FlipSequence,
    trees: &[PlaneTree],
    s: Chord,
    range: std::ops::Range<usize>,
) -> Result<(Vec<Move>, Vec<Move>), TransformError> {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for index in range {
        if !trees[index].contains(s) || !trees[index + 1].contains(s) {
            return Err(TransformError::SeparatorMissing { chord: s, index });
        }
        let mv = seq.moves[index];
        let side = on_side_a(s, mv.removed);
        if side != on_side_a(s, mv.inserted) {
            return Err(TransformError::Straddles { index, mv, chord: s });
        }
        if side {
            a.push(mv);
        } else {
            b.push(mv);
        }
    }
    Ok((a, b))
}

/// Replays `moves` from the start of `orig` and checks the end tree.
/// Moves that put a chord back in place (a hull park that coincides with
/// where the edge came from or goes to) are dropped, which shortens the
/// sequence.
fn checked(orig: &FlipSequence, mut moves: Vec<Move>) -> Result<FlipSequence, TransformError> {
    moves.retain(|m| m.removed != m.inserted);
    let out = FlipSequence::new(orig.start, moves);
    let end = out.end().map_err(|e| TransformError::Blocked { reason: e.to_string() })?;
    if end != orig.end()? {
        return Err(TransformError::Blocked {
            reason: "rewritten sequence ends elsewhere".into(),
        });
    }
    Ok(out)
}

/// The unique hull edge on the given side of `s` whose endpoints lie in
/// different components of `forest`.
fn joining_hull_edge(forest: &[Chord], n: usize, s: Chord, side_a: bool) -> Result<Chord, TransformError> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for c in forest {
        let (x, y) = (find(&mut parent, c.a()), find(&mut parent, c.b()));
        parent[x] = y;
    }
    let points = ConvexSet::new(n).expect("valid point count");
    let walk = arc(points, s, side_a);
    let found: Vec<Chord> = walk
        .windows(2)
        .filter(|w| find(&mut parent, w[0]) != find(&mut parent, w[1]))
        .map(|w| Chord::new(w[0], w[1]))
        .collect();
    match found.as_slice() {
        [h] => Ok(*h),
        _ => Err(TransformError::HullChoice {
            chord: s,
            found: found.len(),
        }),
    }
}

fn chain_root_of_flip(seq: &FlipSequence, index: usize) -> Chord {
    chain_decomposition(seq)
        .into_iter()
        .find(|c: &Chain| c.flip_indices.contains(&index))
        .map(|c| c.root())
        .expect("every flip belongs to a chain")
}

/// Mirrors a park of `seq` into the reversed sequence.
fn reversed_index(seq: &FlipSequence, i: usize) -> usize {
    seq.len() - 1 - i
}

/// Moves the diagonal park entered at move `enter` onto a hull edge without
/// changing the length or any other trace. Needs one of the two flips of
/// the park to be compatible. If the hull edge found is the chord the park
/// ends on, the park vanishes and the result is one flip shorter.
pub fn relocate_parking_to_hull(seq: &FlipSequence, enter: usize) -> Result<RewriteOutcome, TransformError> {
    let park = park_at(seq, enter)?;
    if !park.diagonal {
        return Err(TransformError::NotDiagonal { chord: park.chord });
    }
    let root = chain_root_of_flip(seq, enter);
    let rewritten = if park.enter_compatible {
        relocate_forward(seq, park)?
    } else if park.leave_compatible {
        let rev = reverse_sequence(seq)?;
        let rev_park = park_at(&rev, reversed_index(seq, park.leave))?;
        reverse_sequence(&relocate_forward(&rev, rev_park)?)?
    } else {
        return Err(TransformError::BothCrossing { chord: park.chord });
    };
    Ok(RewriteOutcome::new(seq, rewritten, root))
}

fn relocate_forward(seq: &FlipSequence, park: Park) -> Result<FlipSequence, TransformError> {
    let trees = seq.replay()?;
    let n = seq.start.n();
    let f = park.chord;
    let (e, e2) = (park.from(seq), park.to(seq));
    // The path joining the ends of f before it is inserted closes the cycle
    // through e; it lies on one side, and h goes on the other.
    let p = trees[park.enter].path(f.a(), f.b());
    let p_side_a = on_side_a(f, p[0]);
    if p.iter().any(|&c| on_side_a(f, c) != p_side_a) {
        return Err(TransformError::Blocked {
            reason: format!("path between the ends of {f} leaves its side"),
        });
    }
    let h_side_a = !p_side_a;
    let (a, b) = split_sides(seq, &trees, f, park.enter + 1..park.leave)?;
    let (h_side, p_side) = if h_side_a { (a, b) } else { (b, a) };
    let forest: Vec<Chord> = trees[park.leave]
        .chords()
        .filter(|&c| c != f && on_side_a(f, c) == h_side_a)
        .collect();
    let h = joining_hull_edge(&forest, n, f, h_side_a)?;
    let mut moves = seq.moves[..park.enter].to_vec();
    moves.extend(h_side);
    moves.push(Move::new(e, h));
    moves.extend(p_side);
    moves.push(Move::new(h, e2));
    moves.extend_from_slice(&seq.moves[park.leave + 1..]);
    checked(seq, moves)
}

/// Replaces a diagonal park entered and left by crossing flips with two
/// hull parks: one flip longer, trace `(e, h, h', e')`, other traces
/// unchanged. As with relocation, a hull park landing on `e` or `e'`
/// collapses and saves the flip.
pub fn split_diagonal_parking(seq: &FlipSequence, enter: usize) -> Result<RewriteOutcome, TransformError> {
    let park = park_at(seq, enter)?;
    if !park.diagonal {
        return Err(TransformError::NotDiagonal { chord: park.chord });
    }
    if park.enter_compatible || park.leave_compatible {
        return Err(TransformError::NotBothCrossing { chord: park.chord });
    }
    let root = chain_root_of_flip(seq, enter);
    let rewritten = split_with_side(seq, park, true).or_else(|first| split_with_side(seq, park, false).map_err(|_| first))?;
    Ok(RewriteOutcome::new(seq, rewritten, root))
}

fn split_with_side(seq: &FlipSequence, park: Park, h_side_a: bool) -> Result<FlipSequence, TransformError> {
    let trees = seq.replay()?;
    let n = seq.start.n();
    let f = park.chord;
    let (e, e2) = (park.from(seq), park.to(seq));
    let (a, b) = split_sides(seq, &trees, f, park.enter + 1..park.leave)?;
    let (h_moves, other_moves) = if h_side_a { (a, b) } else { (b, a) };
    let without_f: Vec<Chord> = trees[park.enter + 1].chords().filter(|&c| c != f).collect();
    let h = joining_hull_edge(&without_f, n, f, h_side_a)?;
    let blocked = |e: TreeError| TransformError::Blocked { reason: e.to_string() };

    let mut moves = seq.moves[..park.enter].to_vec();
    let mut cur = trees[park.enter].apply_flip(e, h).map_err(blocked)?;
    moves.push(Move::new(e, h));
    for &m in &other_moves {
        cur = cur.apply_flip(m.removed, m.inserted).map_err(blocked)?;
        moves.push(m);
    }
    let without_h: Vec<Chord> = cur.chords().filter(|&c| c != h).collect();
    let h2 = joining_hull_edge(&without_h, n, f, !h_side_a)?;
    moves.push(Move::new(h, h2));
    moves.extend(h_moves);
    moves.push(Move::new(h2, e2));
    moves.extend_from_slice(&seq.moves[park.leave + 1..]);
    checked(seq, moves)
}

/// The sequence mapped through `N(T) = T + e - f_T`, where `f_T` is the
/// edge of the cycle closed by `e` in `T` that is removed first in the rest
/// of the sequence. Coinciding consecutive trees are merged, so the result
/// can be shorter. Requires `e` in the start tree and uncrossed throughout.
pub fn normalize(seq: &FlipSequence, e: Chord) -> Result<RewriteOutcome, TransformError> {
    if !seq.start.contains(e) {
        return Err(TransformError::NotInStart { chord: e });
    }
    let trees = seq.replay()?;
    for (index, t) in trees.iter().enumerate() {
        if let Some(by) = t.chords().find(|c| c.crosses(e)) {
            return Err(TransformError::Crossed { chord: e, by, index });
        }
    }
    let normalized: Vec<PlaneTree> = trees
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.contains(e) {
                return *t;
            }
            let cycle = t.path(e.a(), e.b());
            let first_removed = seq.moves[i..]
                .iter()
                .find(|m| cycle.contains(&m.removed))
                .map(|m| m.removed);
            match first_removed {
                Some(f) => t.apply_flip(f, e).expect("swapping an edge of the cycle through e keeps a plane tree"),
                None => *t,
            }
        })
        .collect();
    let mut moves = Vec::new();
    for w in normalized.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let removed = w[0].chord_set().difference(w[1].chord_set());
        let inserted = w[1].chord_set().difference(w[0].chord_set());
        match (removed.first(), inserted.first(), removed.len(), inserted.len()) {
            (Some(r), Some(i), 1, 1) => moves.push(Move::new(r, i)),
            _ => {
                return Err(TransformError::Blocked {
                    reason: "normalized neighbours differ by more than one flip".into(),
                })
            }
        }
    }
    let out = checked(seq, moves)?;
    Ok(RewriteOutcome::new(seq, out, e))
}

/// Rewrites every diagonal park away, relocating where a flip of the park
/// is compatible and splitting otherwise. The result uses only chords of
/// the endpoint trees and hull edges.
pub fn eliminate_diagonal_parking(seq: &FlipSequence) -> Result<FlipSequence, TransformError> {
    let end = seq.end()?;
    let ends = seq.start.chord_set().union(end.chord_set());
    let mut cur = seq.clone();
    for _ in 0..=4 * seq.len() + 4 {
        let next_park = parks(&cur)?
            .into_iter()
            .find(|p| p.diagonal && !ends.contains(p.chord));
        let Some(park) = next_park else {
            return Ok(cur);
        };
        cur = if park.enter_compatible || park.leave_compatible {
            relocate_parking_to_hull(&cur, park.enter)?.sequence
        } else {
            split_diagonal_parking(&cur, park.enter)?.sequence
        };
    }
    Err(TransformError::Blocked {
        reason: "diagonal parks did not disappear".into(),
    })
}

/// Necessary conditions on a trace `(e, e1, e2, e3)` that no shortest
/// sequence can shorten.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReparkingConditions {
    pub ends_are_diagonals: bool,
    pub e_crosses_e1: bool,
    pub e1_crosses_e2: bool,
    pub e2_crosses_e3: bool,
}

impl ReparkingConditions {
    pub fn all(&self) -> bool {
        self.ends_are_diagonals && self.e_crosses_e1 && self.e1_crosses_e2 && self.e2_crosses_e3
    }
}

pub fn check_reparking_conditions(seq: &FlipSequence, root: Chord) -> Result<ReparkingConditions, TransformError> {
    let chain = chain_decomposition(seq)
        .into_iter()
        .find(|c| c.root() == root)
        .ok_or(TransformError::ChainLength { root, len: 0, expected: 3 })?;
    let [e, e1, e2, e3] = chain.links[..] else {
        return Err(TransformError::ChainLength {
            root,
            len: chain.trace_length(),
            expected: 3,
        });
    };
    let points = seq.start.points();
    Ok(ReparkingConditions {
        ends_are_diagonals: !points.is_hull_edge(e) && !points.is_hull_edge(e3),
        e_crosses_e1: e.crosses(e1),
        e1_crosses_e2: e1.crosses(e2),
        e2_crosses_e3: e2.crosses(e3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::parking12_optimal;
    use crate::sequences::{hull_parking_only, trace, trace_length};

    fn c(a: usize, b: usize) -> Chord {
        Chord::new(a, b)
    }

    #[test]
    fn parking12_split_gives_hull_only_sequence_of_length_9() {
        let seq = parking12_optimal();
        let out = split_diagonal_parking(&seq, 0).unwrap();
        assert_eq!(out.length_delta, 1);
        assert!(out.other_traces_unchanged());
        let t_f = seq.end().unwrap();
        assert!(hull_parking_only(&out.sequence, &seq.start, &t_f).unwrap());
        assert_eq!(trace_length(&out.sequence, c(5, 11)).unwrap(), 3);
        assert_eq!(eliminate_diagonal_parking(&seq).unwrap(), out.sequence);
    }

    #[test]
    fn hull_park_is_rejected() {
        let star = PlaneTree::new(4, [c(0, 1), c(0, 2), c(0, 3)]).unwrap();
        let seq = FlipSequence::new(star, vec![Move::new(c(0, 2), c(1, 2)), Move::new(c(1, 2), c(2, 3))]);
        assert_eq!(
            relocate_parking_to_hull(&seq, 0).unwrap_err(),
            TransformError::NotDiagonal { chord: c(1, 2) }
        );
        assert!(split_diagonal_parking(&seq, 0).is_err());
    }

    #[test]
    fn compatible_diagonal_park_moves_to_the_hull() {
        // Park 0-2 on the diagonal 2-4 (compatible), flip on the far side,
        // then settle on 1-3.
        let t = PlaneTree::new(6, [c(0, 1), c(0, 2), c(2, 3), c(0, 4), c(4, 5)]).unwrap();
        let seq = FlipSequence::new(
            t,
            vec![
                Move::new(c(0, 2), c(2, 4)),
                Move::new(c(4, 5), c(0, 5)),
                Move::new(c(2, 4), c(1, 3)),
            ],
        );
        seq.end().unwrap();
        let out = relocate_parking_to_hull(&seq, 0).unwrap();
        assert_eq!(out.length_delta, 0);
        assert!(out.other_traces_unchanged());
        let links = trace(&out.sequence, c(0, 2)).unwrap();
        assert_eq!(links.len(), 3);
        assert!(t.points().is_hull_edge(links[1]));
        assert_eq!(links[2], c(1, 3));
    }

    #[test]
    fn normalize_drops_a_park_and_return() {
        let t = PlaneTree::new(6, [c(0, 1), c(1, 2), c(2, 3), c(3, 4), c(4, 5)]).unwrap();
        let seq = FlipSequence::new(
            t,
            vec![
                Move::new(c(2, 3), c(1, 3)),
                Move::new(c(4, 5), c(0, 5)),
                Move::new(c(1, 3), c(2, 3)),
            ],
        );
        let out = normalize(&seq, c(2, 3)).unwrap();
        assert_eq!(out.length_delta, -2);
        assert_eq!(out.sequence.moves, vec![Move::new(c(4, 5), c(0, 5))]);
        assert_eq!(normalize(&seq, c(0, 1)).unwrap().length_delta, 0);
    }

    #[test]
    fn reorder_requires_the_separator() {
        let seq = parking12_optimal();
        assert!(matches!(
            reorder_by_side(&seq, c(0, 6), 0..3, true),
            Err(TransformError::SeparatorMissing { .. })
        ));
        let moved = reorder_by_side(&seq, c(0, 6), 1..7, false).unwrap();
        assert_eq!(moved.end().unwrap(), seq.end().unwrap());
    }

    #[test]
    fn reparking_conditions_report() {
        let t = PlaneTree::new(6, [c(0, 1), c(1, 2), c(2, 3), c(3, 4), c(4, 5)]).unwrap();
        let seq = FlipSequence::new(
            t,
            vec![
                Move::new(c(2, 3), c(1, 3)),
                Move::new(c(1, 3), c(1, 4)),
                Move::new(c(1, 4), c(2, 4)),
            ],
        );
        let r = check_reparking_conditions(&seq, c(2, 3)).unwrap();
        assert!(!r.ends_are_diagonals && !r.e_crosses_e1 && !r.all());
        assert!(check_reparking_conditions(&seq, c(0, 1)).is_err());
    }
}
