use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{check_same_n, SearchError};
use crate::par;
use crate::plane_trees::{count_trees, enumerate_all_trees, legal_flips, ChordSet, ConvexSet, PlaneTree, TreeError};

/// Exact flip distance by breadth-first search over canonical trees.
pub fn flip_distance_bfs(t_i: &PlaneTree, t_f: &PlaneTree, node_cap: u64) -> Result<usize, SearchError> {
    check_same_n(t_i, t_f)?;
    if t_i == t_f {
        return Ok(0);
    }
    let mut dist: HashMap<ChordSet, usize> = HashMap::new();
    dist.insert(*t_i.chord_set(), 0);
    let mut queue = VecDeque::from([*t_i]);
    while let Some(t) = queue.pop_front() {
        let d = dist[t.chord_set()];
        for m in legal_flips(&t) {
            let next = t.apply_unchecked(m.as_move());
            if dist.contains_key(next.chord_set()) {
                continue;
            }
            if next == *t_f {
                return Ok(d + 1);
            }
            if dist.len() as u64 >= node_cap {
                return Err(SearchError::CapExceeded { what: "node", cap: node_cap });
            }
            dist.insert(*next.chord_set(), d + 1);
            queue.push_back(next);
        }
    }
    unreachable!("the flip graph is connected")
}

/// Distance and number of shortest paths by layered breadth-first search.
/// Independent of the DFS; used as an oracle for counts.
pub fn count_shortest_paths_bfs(t_i: &PlaneTree, t_f: &PlaneTree, node_cap: u64) -> Result<(usize, u64), SearchError> {
    check_same_n(t_i, t_f)?;
    let mut paths: HashMap<ChordSet, u64> = HashMap::from([(*t_i.chord_set(), 1)]);
    let mut layer = vec![*t_i];
    let mut seen = 1u64;
    for d in 0.. {
        if let Some(&c) = paths.get(t_f.chord_set()) {
            return Ok((d, c));
        }
        let mut next: HashMap<ChordSet, (PlaneTree, u64)> = HashMap::new();
        for t in &layer {
            let c = paths[t.chord_set()];
            for m in legal_flips(t) {
                let u = t.apply_unchecked(m.as_move());
                if paths.contains_key(u.chord_set()) {
                    continue;
                }
                next.entry(*u.chord_set()).or_insert((u, 0)).1 += c;
            }
        }
        seen += next.len() as u64;
        if seen > node_cap {
            return Err(SearchError::CapExceeded { what: "node", cap: node_cap });
        }
        layer = next.values().map(|(t, _)| *t).collect();
        paths.extend(next.into_iter().map(|(k, (_, c))| (k, c)));
    }
    unreachable!("the flip graph is connected")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diameter {
    pub n: usize,
    pub diameter: usize,
    /// Lexicographically first pair realizing the diameter.
    pub witness: (PlaneTree, PlaneTree),
}

/// Diameter of the full flip graph on `n` points by all-pairs BFS.
pub fn diameter(n: usize, node_cap: u64) -> Result<Diameter, SearchError> {
    ConvexSet::new(n).map_err(|_| SearchError::CapExceeded { what: "point count", cap: n as u64 })?;
    let trees = enumerate_all_trees(n, node_cap).map_err(|e| match e {
        TreeError::CapExceeded { cap, .. } => SearchError::CapExceeded { what: "node", cap },
        _ => SearchError::CapExceeded {
            what: "node",
            cap: count_trees(n),
        },
    })?;
    let index: HashMap<ChordSet, usize> = trees.iter().enumerate().map(|(i, t)| (*t.chord_set(), i)).collect();
    let adjacency: Vec<Vec<u32>> = par::map(trees.iter().collect(), |t: &PlaneTree| {
        let mut v: Vec<u32> = legal_flips(t)
            .iter()
            .map(|m| index[t.apply_unchecked(m.as_move()).chord_set()] as u32)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    });
    let eccentricities = par::map((0..trees.len()).collect(), |src: usize| {
        let mut dist = vec![u32::MAX; trees.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src as u32]);
        let mut far = (0u32, src);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            if d > far.0 || (d == far.0 && (v as usize) < far.1) {
                far = (d, v as usize);
            }
            for &w in &adjacency[v as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = d + 1;
                    queue.push_back(w);
                }
            }
        }
        far
    });
    let (src, (d, dst)) = eccentricities
        .iter()
        .copied()
        .enumerate()
        .max_by(|(i, (d1, j1)), (k, (d2, l2))| d1.cmp(d2).then(k.cmp(i)).then(l2.cmp(j1)))
        .expect("at least one tree");
    Ok(Diameter {
        n,
        diameter: d as usize,
        witness: (trees[src], trees[dst]),
    })
}
