use super::chord::{Chord, ChordSet, ConvexSet};
use super::tree::PlaneTree;
use super::TreeError;

/// Number of plane spanning trees on `n` points in convex position,
/// `C(3n-3, n-1) / (2n-1)`.
pub fn count_trees(n: usize) -> u64 {
    if n < 2 {
        return 1;
    }
    let (top, k) = (3 * n as u64 - 3, n as u64 - 1);
    let mut binom: u128 = 1;
    for i in 0..k {
        binom = binom * (top - i) as u128 / (i + 1) as u128;
    }
    (binom / (2 * n as u128 - 1)) as u64
}

/// Every plane spanning tree on `n` points, each exactly once.
///
/// Refuses when the predicted count exceeds `cap`. Trees on an interval
/// `[i, j]` decompose uniquely by the largest neighbour `k` of `i` and the
/// interval `[x, j]` of the component containing `k` once `i` is deleted:
/// the rest is a tree on `[i, x-1]`, and the component splits at `k` into
/// trees on `[x, k]` and `[k, j]` because nothing may cross `(i, k)`.
pub fn enumerate_all_trees(n: usize, cap: u64) -> Result<Vec<PlaneTree>, TreeError> {
    ConvexSet::new(n)?;
    let count = count_trees(n);
    if count > cap {
        return Err(TreeError::CapExceeded { n, count, cap });
    }
    let mut memo: Vec<Vec<Option<Vec<ChordSet>>>> = vec![vec![None; n]; n];
    let sets = interval_trees(0, n - 1, &mut memo);
    let mut out: Vec<PlaneTree> = sets
        .iter()
        .map(|&s| PlaneTree::from_set_unchecked(n, s))
        .collect();
    out.sort();
    Ok(out)
}

fn interval_trees(i: usize, j: usize, memo: &mut Vec<Vec<Option<Vec<ChordSet>>>>) -> Vec<ChordSet> {
    if let Some(v) = &memo[i][j] {
        return v.clone();
    }
    let mut out = Vec::new();
    if i == j {
        out.push(ChordSet::empty());
    } else {
        for x in i + 1..=j {
            let left = interval_trees(i, x - 1, memo);
            for k in x..=j {
                let inner = interval_trees(x, k, memo);
                let outer = interval_trees(k, j, memo);
                for l in &left {
                    for a in &inner {
                        let la = l.union(a);
                        for b in &outer {
                            let mut s = la.union(b);
                            s.insert(Chord::new(i, k));
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    memo[i][j] = Some(out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_trees::validate_tree;
    use std::collections::HashSet;

    /// Brute force: all (n-1)-subsets of chords that validate.
    fn brute_force(n: usize) -> HashSet<PlaneTree> {
        let chords: Vec<Chord> = ConvexSet::new(n).unwrap().chords().collect();
        let mut out = HashSet::new();
        let mut pick = Vec::new();
        fn rec(chords: &[Chord], start: usize, need: usize, n: usize, pick: &mut Vec<Chord>, out: &mut HashSet<PlaneTree>) {
            if need == 0 {
                if let Ok(t) = validate_tree(pick, n) {
                    out.insert(t);
                }
                return;
            }
            for i in start..chords.len() {
                pick.push(chords[i]);
                rec(chords, i + 1, need - 1, n, pick, out);
                pick.pop();
            }
        }
        rec(&chords, 0, n - 1, n, &mut pick, &mut out);
        out
    }

    #[test]
    fn matches_brute_force() {
        for (n, expected) in [(3, 3), (4, 12), (5, 55), (6, 273)] {
            let oracle = brute_force(n);
            assert_eq!(oracle.len(), expected);
            let trees = enumerate_all_trees(n, 1_000_000).unwrap();
            assert_eq!(trees.len(), expected);
            assert_eq!(trees.iter().copied().collect::<HashSet<_>>(), oracle);
            assert_eq!(count_trees(n), expected as u64);
        }
    }

    #[test]
    fn cap_guard() {
        assert!(matches!(
            enumerate_all_trees(9, 100),
            Err(TreeError::CapExceeded { n: 9, .. })
        ));
        assert_eq!(count_trees(12), 8_414_640);
    }
}
