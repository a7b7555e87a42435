use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::TreeError;

/// Largest point count supported. Chord sets are fixed-size bitsets over
/// label pairs, so every tree value is `Copy` and hashes in a few words.
pub const MAX_POINTS: usize = 32;

const WORDS: usize = MAX_POINTS * MAX_POINTS / 64;

/// Points in convex position, labeled `0..n` counterclockwise.
///
/// Only the cyclic order matters for crossings and hull membership, so no
/// coordinates are stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConvexSet {
    n: usize,
}

impl ConvexSet {
    pub fn new(n: usize) -> Result<Self, TreeError> {
        if !(3..=MAX_POINTS).contains(&n) {
            return Err(TreeError::PointCount { n });
        }
        Ok(Self { n })
    }

    pub fn n(self) -> usize {
        self.n
    }

    /// All `n` hull edges in label order.
    pub fn hull_edges(self) -> impl Iterator<Item = Chord> {
        let n = self.n;
        (0..n).map(move |i| Chord::new(i, (i + 1) % n))
    }

    /// Every chord on this point set, sorted.
    pub fn chords(self) -> impl Iterator<Item = Chord> {
        let n = self.n;
        (0..n).flat_map(move |a| (a + 1..n).map(move |b| Chord::new(a, b)))
    }

    pub fn contains(self, c: Chord) -> bool {
        c.b() < self.n
    }

    pub fn check(self, c: Chord) -> Result<Chord, TreeError> {
        if self.contains(c) {
            Ok(c)
        } else {
            Err(TreeError::LabelOutOfRange { chord: c, n: self.n })
        }
    }

    pub fn is_hull_edge(self, c: Chord) -> bool {
        c.b == c.a + 1 || (c.a == 0 && c.b as usize == self.n - 1)
    }
}

/// Straight segment between two polygon labels, stored with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[u8; 2]", try_from = "[u8; 2]")]
pub struct Chord {
    a: u8,
    b: u8,
}

impl Chord {
    /// Canonicalizes the endpoint order. Panics on a loop or a label past
    /// [`MAX_POINTS`]; use [`Chord::try_new`] for untrusted input.
    pub fn new(u: usize, v: usize) -> Self {
        Self::try_new(u, v).expect("invalid chord")
    }

    pub fn try_new(u: usize, v: usize) -> Result<Self, TreeError> {
        if u == v || u >= MAX_POINTS || v >= MAX_POINTS {
            return Err(TreeError::BadChord { u, v });
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        Ok(Self { a: a as u8, b: b as u8 })
    }

    pub fn a(self) -> usize {
        self.a as usize
    }

    pub fn b(self) -> usize {
        self.b as usize
    }

    pub fn endpoints(self) -> (usize, usize) {
        (self.a(), self.b())
    }

    pub fn has_endpoint(self, v: usize) -> bool {
        self.a() == v || self.b() == v
    }

    pub fn shared_endpoint(self, other: Chord) -> Option<usize> {
        if other.has_endpoint(self.a()) {
            Some(self.a())
        } else if other.has_endpoint(self.b()) {
            Some(self.b())
        } else {
            None
        }
    }

    /// The endpoint that is not `v`.
    pub fn other(self, v: usize) -> usize {
        if self.a() == v {
            self.b()
        } else {
            self.a()
        }
    }

    /// Strict interleaving of endpoints; chords sharing an endpoint never cross.
    pub fn crosses(self, other: Chord) -> bool {
        let (a1, b1) = (self.a, self.b);
        let (a2, b2) = (other.a, other.b);
        (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1)
    }

    pub(crate) fn index(self) -> usize {
        self.a() * MAX_POINTS + self.b()
    }

    pub(crate) fn from_index(i: usize) -> Self {
        Self {
            a: (i / MAX_POINTS) as u8,
            b: (i % MAX_POINTS) as u8,
        }
    }
}

impl fmt::Debug for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

impl FromStr for Chord {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TreeError::Parse(format!("bad chord {s:?}"));
        let (u, v) = s.split_once('-').ok_or_else(bad)?;
        let u = u.trim().parse().map_err(|_| bad())?;
        let v = v.trim().parse().map_err(|_| bad())?;
        Chord::try_new(u, v)
    }
}

impl From<Chord> for [u8; 2] {
    fn from(c: Chord) -> Self {
        [c.a, c.b]
    }
}

impl TryFrom<[u8; 2]> for Chord {
    type Error = TreeError;

    fn try_from([u, v]: [u8; 2]) -> Result<Self, Self::Error> {
        Chord::try_new(u as usize, v as usize)
    }
}

/// Crossing predicate with range checks against `n`.
pub fn chords_cross(n: usize, c1: Chord, c2: Chord) -> Result<bool, TreeError> {
    let set = ConvexSet::new(n)?;
    set.check(c1)?;
    set.check(c2)?;
    Ok(c1.crosses(c2))
}

pub fn is_hull_edge(n: usize, c: Chord) -> Result<bool, TreeError> {
    let set = ConvexSet::new(n)?;
    set.check(c)?;
    Ok(set.is_hull_edge(c))
}

/// Fixed-size set of chords. Iteration is in sorted `(a, b)` order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ChordSet([u64; WORDS]);

impl ChordSet {
    pub const fn empty() -> Self {
        Self([0; WORDS])
    }

    pub fn insert(&mut self, c: Chord) -> bool {
        let i = c.index();
        let had = self.0[i / 64] >> (i % 64) & 1 == 1;
        self.0[i / 64] |= 1 << (i % 64);
        !had
    }

    pub fn remove(&mut self, c: Chord) -> bool {
        let i = c.index();
        let had = self.0[i / 64] >> (i % 64) & 1 == 1;
        self.0[i / 64] &= !(1 << (i % 64));
        had
    }

    pub fn contains(&self, c: Chord) -> bool {
        let i = c.index();
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = *self;
        for (w, o) in out.0.iter_mut().zip(other.0.iter()) {
            *w &= o;
        }
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = *self;
        for (w, o) in out.0.iter_mut().zip(other.0.iter()) {
            *w |= o;
        }
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = *self;
        for (w, o) in out.0.iter_mut().zip(other.0.iter()) {
            *w &= !o;
        }
        out
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    /// First chord in sorted order, if any.
    pub fn first(&self) -> Option<Chord> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = Chord> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(Chord::from_index(wi * 64 + t))
            })
        })
    }
}

impl FromIterator<Chord> for ChordSet {
    fn from_iter<I: IntoIterator<Item = Chord>>(iter: I) -> Self {
        let mut s = Self::empty();
        for c in iter {
            s.insert(c);
        }
        s
    }
}

impl fmt::Debug for ChordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// For every chord, the set of chords it crosses. Crossing depends only on
/// the label order, so one table serves every `n`.
pub(crate) fn crossing_table() -> &'static [ChordSet] {
    static TABLE: OnceLock<Vec<ChordSet>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = vec![ChordSet::empty(); MAX_POINTS * MAX_POINTS];
        let all: Vec<Chord> = (0..MAX_POINTS)
            .flat_map(|a| (a + 1..MAX_POINTS).map(move |b| Chord::new(a, b)))
            .collect();
        for &c in &all {
            let entry = &mut table[c.index()];
            for &d in &all {
                if c.crosses(d) {
                    entry.insert(d);
                }
            }
        }
        table
    })
}

/// Chords of `set` that `c` crosses.
pub fn crossed_by(c: Chord, set: &ChordSet) -> ChordSet {
    crossing_table()[c.index()].intersection(set)
}
