use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::chord::{crossed_by, Chord, ChordSet, ConvexSet, MAX_POINTS};
use super::TreeError;

/// Kind of a flip `e -> f`. Rotations and slides are compatible flips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipKind {
    Crossing,
    Compatible,
    Rotation,
    Slide,
}

impl FlipKind {
    pub fn is_compatible(self) -> bool {
        self != FlipKind::Crossing
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FlipKind::Crossing => "crossing",
            FlipKind::Compatible => "compatible",
            FlipKind::Rotation => "rotation",
            FlipKind::Slide => "slide",
        }
    }
}

/// An exchange of one tree chord for another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub removed: Chord,
    pub inserted: Chord,
}

impl Move {
    pub fn new(removed: Chord, inserted: Chord) -> Self {
        Self { removed, inserted }
    }

    pub fn reversed(self) -> Self {
        Self::new(self.inserted, self.removed)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.removed, self.inserted)
    }
}

/// A legal move together with its classification in the tree it applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlipMove {
    pub removed: Chord,
    pub inserted: Chord,
    pub kind: FlipKind,
}

impl FlipMove {
    pub fn as_move(self) -> Move {
        Move::new(self.removed, self.inserted)
    }
}

/// Canonical, stable identity of a tree: its sorted chords rendered as
/// `a-b.a-b...`, prefixed by the point count.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TreeKey(String);

impl TreeKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TreeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A plane spanning tree on points in convex position.
///
/// Values are validated on construction and immutable afterwards.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "TreeRepr", try_from = "TreeRepr")]
pub struct PlaneTree {
    n: u8,
    chords: ChordSet,
}

impl PlaneTree {
    /// Validates `chords` as a plane spanning tree on `n` points.
    pub fn new(n: usize, chords: impl IntoIterator<Item = Chord>) -> Result<Self, TreeError> {
        let chords: Vec<Chord> = chords.into_iter().collect();
        validate_tree(&chords, n)
    }

    pub(crate) fn from_set_unchecked(n: usize, chords: ChordSet) -> Self {
        Self { n: n as u8, chords }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn points(&self) -> ConvexSet {
        ConvexSet::new(self.n()).expect("validated point count")
    }

    pub fn chord_set(&self) -> &ChordSet {
        &self.chords
    }

    pub fn chords(&self) -> impl Iterator<Item = Chord> + '_ {
        self.chords.iter()
    }

    pub fn to_vec(&self) -> Vec<Chord> {
        self.chords.iter().collect()
    }

    pub fn contains(&self, c: Chord) -> bool {
        self.chords.contains(c)
    }

    pub fn key(&self) -> TreeKey {
        let mut s = format!("{}:", self.n);
        for (i, c) in self.chords.iter().enumerate() {
            if i > 0 {
                s.push('.');
            }
            s.push_str(&c.to_string());
        }
        TreeKey(s)
    }

    pub fn from_key(key: &str) -> Result<Self, TreeError> {
        let (n, rest) = key
            .split_once(':')
            .ok_or_else(|| TreeError::Parse(format!("bad tree key {key:?}")))?;
        let n: usize = n
            .parse()
            .map_err(|_| TreeError::Parse(format!("bad point count in key {key:?}")))?;
        let chords = rest
            .split('.')
            .filter(|s| !s.is_empty())
            .map(Chord::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        validate_tree(&chords, n)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n()];
        for c in self.chords.iter() {
            adj[c.a()].push(c.b());
            adj[c.b()].push(c.a());
        }
        adj
    }

    /// Labels on `e.a()`'s side once `e` is removed, as a bitmask.
    fn side_mask(&self, adj: &[Vec<usize>], e: Chord) -> u64 {
        let mut mask = 1u64 << e.a();
        let mut stack = vec![e.a()];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if (v == e.a() && w == e.b()) || (v == e.b() && w == e.a()) {
                    continue;
                }
                if mask >> w & 1 == 0 {
                    mask |= 1 << w;
                    stack.push(w);
                }
            }
        }
        mask
    }

    /// Labels reachable from `e.a()` in the tree without `e`, as a bitmask.
    pub fn side_of(&self, e: Chord) -> u64 {
        self.side_mask(&self.adjacency(), e)
    }

    /// The unique tree path between two labels, as chords in walk order.
    pub fn path(&self, from: usize, to: usize) -> Vec<Chord> {
        let adj = self.adjacency();
        let mut parent = vec![usize::MAX; self.n()];
        parent[from] = from;
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        let mut out = Vec::new();
        let mut v = to;
        while v != from {
            let p = parent[v];
            out.push(Chord::new(p, v));
            v = p;
        }
        out.reverse();
        out
    }

    /// `self - removed + inserted`, validated.
    pub fn apply_flip(&self, removed: Chord, inserted: Chord) -> Result<Self, TreeError> {
        let points = self.points();
        points.check(removed)?;
        points.check(inserted)?;
        if removed == inserted {
            return Err(TreeError::SameChord { chord: removed });
        }
        if !self.contains(removed) {
            return Err(TreeError::RemovedAbsent { chord: removed });
        }
        if self.contains(inserted) {
            return Err(TreeError::InsertedPresent { chord: inserted });
        }
        let side = self.side_of(removed);
        let (u, v) = inserted.endpoints();
        if (side >> u & 1) == (side >> v & 1) {
            return Err(TreeError::FlipCycle { removed, inserted });
        }
        let mut rest = self.chords;
        rest.remove(removed);
        if let Some(other) = crossed_by(inserted, &rest).first() {
            return Err(TreeError::Crossing {
                first: other.min(inserted),
                second: other.max(inserted),
            });
        }
        rest.insert(inserted);
        Ok(Self {
            n: self.n,
            chords: rest,
        })
    }

    /// Applies a move known to be legal (e.g. produced by [`legal_flips`]).
    pub(crate) fn apply_unchecked(&self, m: Move) -> Self {
        let mut chords = self.chords;
        chords.remove(m.removed);
        chords.insert(m.inserted);
        Self { n: self.n, chords }
    }

    pub fn legal_flips(&self) -> Vec<FlipMove> {
        legal_flips(self)
    }

    pub fn classify_flip(&self, e: Chord, f: Chord) -> Result<FlipKind, TreeError> {
        classify_flip(self, e, f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeRepr {
    n: usize,
    chords: Vec<Chord>,
}

impl From<PlaneTree> for TreeRepr {
    fn from(t: PlaneTree) -> Self {
        Self {
            n: t.n(),
            chords: t.to_vec(),
        }
    }
}

impl TryFrom<TreeRepr> for PlaneTree {
    type Error = TreeError;

    fn try_from(r: TreeRepr) -> Result<Self, Self::Error> {
        validate_tree(&r.chords, r.n)
    }
}

impl fmt::Debug for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneTree{{n={}, {:?}}}", self.n, self.chords)
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key().as_str())
    }
}

/// Checks every plane-spanning-tree invariant and reports the first one
/// violated: labels, duplicates, edge count, cycles, connectivity, crossings.
pub fn validate_tree(chords: &[Chord], n: usize) -> Result<PlaneTree, TreeError> {
    let points = ConvexSet::new(n)?;
    let mut set = ChordSet::empty();
    for &c in chords {
        points.check(c)?;
        if !set.insert(c) {
            return Err(TreeError::Duplicate { chord: c });
        }
    }
    if set.len() != n - 1 {
        return Err(TreeError::EdgeCount {
            expected: n - 1,
            found: set.len(),
        });
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in set.iter() {
        let (ra, rb) = (find(&mut parent, c.a()), find(&mut parent, c.b()));
        if ra == rb {
            return Err(TreeError::Cycle { chord: c });
        }
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    if let Some(v) = (1..n).find(|&v| find(&mut parent, v) != root) {
        return Err(TreeError::Disconnected { label: v });
    }
    for c in set.iter() {
        if let Some(d) = crossed_by(c, &set).first() {
            return Err(TreeError::Crossing {
                first: c.min(d),
                second: c.max(d),
            });
        }
    }
    Ok(PlaneTree::from_set_unchecked(n, set))
}

/// Every legal flip of `t`, classified, sorted by `(removed, inserted)`.
///
/// A chord `f` outside the tree can replace `e` iff `f` joins the two
/// components of `t - e` and crosses no chord of `t` other than `e`.
pub fn legal_flips(t: &PlaneTree) -> Vec<FlipMove> {
    let scan = FlipScan::new(t);
    let mut out = Vec::new();
    let n = t.n();
    for a in 0..n {
        for b in a + 1..n {
            scan.flips_inserting(Chord::new(a, b), |m| out.push(m));
        }
    }
    out.sort();
    out
}

/// Rooted view of a tree for answering "which edges can `f` replace".
pub(crate) struct FlipScan<'a> {
    tree: &'a PlaneTree,
    /// Subtree label mask below each vertex, rooted at label 0.
    below: [u64; MAX_POINTS],
    parent: [u8; MAX_POINTS],
}

impl<'a> FlipScan<'a> {
    pub(crate) fn new(tree: &'a PlaneTree) -> Self {
        let n = tree.n();
        let mut nbrs = [0u64; MAX_POINTS];
        for c in tree.chords() {
            nbrs[c.a()] |= 1 << c.b();
            nbrs[c.b()] |= 1 << c.a();
        }
        let mut order = [0u8; MAX_POINTS];
        let mut parent = [0u8; MAX_POINTS];
        let mut seen = 1u64;
        let (mut head, mut tail) = (0, 1);
        while head < tail {
            let v = order[head] as usize;
            head += 1;
            let mut fresh = nbrs[v] & !seen;
            seen |= fresh;
            while fresh != 0 {
                let w = fresh.trailing_zeros() as usize;
                fresh &= fresh - 1;
                parent[w] = v as u8;
                order[tail] = w as u8;
                tail += 1;
            }
        }
        debug_assert_eq!(tail, n);
        let mut below = [0u64; MAX_POINTS];
        for &v in order[..n].iter().rev() {
            let v = v as usize;
            below[v] |= 1 << v;
            if v != 0 {
                let p = parent[v] as usize;
                below[p] |= below[v];
            }
        }
        Self { tree, below, parent }
    }

    /// Label mask of the component of `t - e` not containing label 0.
    fn cut(&self, e: Chord) -> u64 {
        let child = if self.parent[e.b()] as usize == e.a() && e.b() != 0 {
            e.b()
        } else {
            e.a()
        };
        self.below[child]
    }

    fn spans(&self, e: Chord, f: Chord) -> bool {
        let cut = self.cut(e);
        (cut >> f.a() & 1) != (cut >> f.b() & 1)
    }

    /// Calls `emit` for every legal flip that inserts `f`, in removed order.
    pub(crate) fn flips_inserting(&self, f: Chord, mut emit: impl FnMut(FlipMove)) {
        let t = self.tree;
        if t.contains(f) {
            return;
        }
        let crossed = crossed_by(f, t.chord_set());
        match crossed.len() {
            0 => {
                // Exactly the edges on the tree path between f's endpoints.
                for e in t.chords() {
                    if self.spans(e, f) {
                        emit(FlipMove {
                            removed: e,
                            inserted: f,
                            kind: compatible_kind(t, e, f),
                        });
                    }
                }
            }
            1 => {
                let e = crossed.first().unwrap();
                if self.spans(e, f) {
                    emit(FlipMove {
                        removed: e,
                        inserted: f,
                        kind: FlipKind::Crossing,
                    });
                }
            }
            _ => {}
        }
    }
}

fn compatible_kind(t: &PlaneTree, e: Chord, f: Chord) -> FlipKind {
    match e.shared_endpoint(f) {
        None => FlipKind::Compatible,
        Some(u) => {
            let third = Chord::new(e.other(u), f.other(u));
            if t.contains(third) {
                FlipKind::Slide
            } else {
                FlipKind::Rotation
            }
        }
    }
}

/// Kind of the flip `e -> f` in `t`; errors if the flip is not legal.
pub fn classify_flip(t: &PlaneTree, e: Chord, f: Chord) -> Result<FlipKind, TreeError> {
    t.apply_flip(e, f)?;
    Ok(if e.crosses(f) {
        FlipKind::Crossing
    } else {
        compatible_kind(t, e, f)
    })
}
