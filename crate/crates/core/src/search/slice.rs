use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{check_same_n, missing, FirstFlipFilter, MoveFilter, SearchError, SearchOptions};
use crate::plane_trees::{legal_flips, ChordSet, Move, PlaneTree};
use crate::sequences::PerfectRule;

/// Which paths from the root a slice follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "bound")]
pub enum SliceMode {
    /// Every path with at most `budget` non-perfect flips.
    BudgetOnly,
    /// Additionally `depth + |t_f \ T| <= bound` along the path.
    LengthPruned(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceNode {
    pub tree: PlaneTree,
    /// Fewest non-perfect flips on any slice path from the root.
    pub min_nonperfect: usize,
    /// Whether the target is reachable from here inside the slice.
    pub reaches_target: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SliceArc {
    pub from: usize,
    pub to: usize,
    pub mv: Move,
    pub perfect: bool,
}

/// Finite part of the flip graph reachable from a root under a budget of
/// non-perfect flips. Nodes are sorted by tree key, arcs by endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipGraphSlice {
    pub root: usize,
    pub target: PlaneTree,
    pub budget: usize,
    pub first_flip_filter: FirstFlipFilter,
    pub mode: SliceMode,
    pub nodes: Vec<SliceNode>,
    pub arcs: Vec<SliceArc>,
}

impl FlipGraphSlice {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn index_of(&self, t: &PlaneTree) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.tree.key().cmp(&t.key())).ok()
    }
}

/// Search state: tree, non-perfect flips used, depth (length-pruned only).
type State = (ChordSet, usize, usize);

/// Builds the slice by exhaustive exploration of `(tree, used, depth)`
/// states. Paths stop at the target. `node_cap` bounds distinct states.
pub fn reachable_slice(
    t_i: &PlaneTree,
    t_f: &PlaneTree,
    budget: usize,
    first_flip_filter: FirstFlipFilter,
    mode: SliceMode,
    perfect_rule: PerfectRule,
    node_cap: u64,
) -> Result<FlipGraphSlice, SearchError> {
    check_same_n(t_i, t_f)?;
    let opts = SearchOptions {
        max_nonperfect: Some(budget),
        first_flip_filter,
        perfect_rule,
        ..SearchOptions::default()
    };
    let filter = MoveFilter {
        t_i,
        t_f,
        opts: &opts,
    };
    let bound = match mode {
        SliceMode::BudgetOnly => None,
        SliceMode::LengthPruned(l) => Some(l),
    };
    if let Some(l) = bound {
        if missing(t_i, t_f) > l {
            return Err(SearchError::NoSequence { max_length: l });
        }
    }

    let mut trees: HashMap<ChordSet, (PlaneTree, usize)> = HashMap::new();
    let mut arcs: BTreeMap<(ChordSet, ChordSet), (Move, bool)> = BTreeMap::new();
    let mut seen_states: BTreeSet<State> = BTreeSet::new();
    let mut queue: VecDeque<(PlaneTree, usize, usize)> = VecDeque::new();
    trees.insert(*t_i.chord_set(), (*t_i, 0));
    seen_states.insert((*t_i.chord_set(), 0, 0));
    queue.push_back((*t_i, 0, 0));

    while let Some((t, used, depth)) = queue.pop_front() {
        if t == *t_f {
            continue;
        }
        for m in legal_flips(&t) {
            let perfect = filter.is_perfect(&m);
            let next_used = used + usize::from(!perfect);
            if next_used > budget || !filter.allows(&m, used > 0) {
                continue;
            }
            let next = t.apply_unchecked(m.as_move());
            if let Some(l) = bound {
                if depth + 1 + missing(&next, t_f) > l {
                    continue;
                }
            }
            arcs.entry((*t.chord_set(), *next.chord_set()))
                .or_insert((m.as_move(), perfect));
            let entry = trees.entry(*next.chord_set()).or_insert((next, next_used));
            entry.1 = entry.1.min(next_used);
            let state_depth = if bound.is_some() { depth + 1 } else { 0 };
            if seen_states.insert((*next.chord_set(), next_used, state_depth)) {
                if seen_states.len() as u64 > node_cap {
                    return Err(SearchError::CapExceeded { what: "slice state", cap: node_cap });
                }
                queue.push_back((next, next_used, depth + 1));
            }
        }
    }

    let mut nodes: Vec<SliceNode> = trees
        .into_values()
        .map(|(tree, min_nonperfect)| SliceNode {
            tree,
            min_nonperfect,
            reaches_target: false,
        })
        .collect();
    nodes.sort_by_key(|n| n.tree.key());
    let index: HashMap<ChordSet, usize> = nodes.iter().enumerate().map(|(i, n)| (*n.tree.chord_set(), i)).collect();
    let arcs: Vec<SliceArc> = {
        let mut v: Vec<SliceArc> = arcs
            .into_iter()
            .map(|((from, to), (mv, perfect))| SliceArc {
                from: index[&from],
                to: index[&to],
                mv,
                perfect,
            })
            .collect();
        v.sort();
        v
    };

    // Reverse reachability from the target.
    if let Some(&target) = index.get(t_f.chord_set()) {
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for a in &arcs {
            incoming[a.to].push(a.from);
        }
        let mut stack = vec![target];
        nodes[target].reaches_target = true;
        while let Some(v) = stack.pop() {
            for &u in &incoming[v] {
                if !nodes[u].reaches_target {
                    nodes[u].reaches_target = true;
                    stack.push(u);
                }
            }
        }
    }

    Ok(FlipGraphSlice {
        root: index[t_i.chord_set()],
        target: *t_f,
        budget,
        first_flip_filter,
        mode,
        nodes,
        arcs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_trees::Chord;

    fn c(a: usize, b: usize) -> Chord {
        Chord::new(a, b)
    }

    #[test]
    fn zero_budget_slice_of_star_to_path() {
        let star = PlaneTree::new(4, [c(0, 1), c(0, 2), c(0, 3)]).unwrap();
        let path = PlaneTree::new(4, [c(0, 1), c(1, 2), c(2, 3)]).unwrap();
        let s = reachable_slice(&star, &path, 0, FirstFlipFilter::Any, SliceMode::BudgetOnly, PerfectRule::Strict, 1000).unwrap();
        assert!(s.nodes.iter().all(|n| n.min_nonperfect == 0));
        assert!(s.arcs.iter().all(|a| a.perfect));
        assert!(s.index_of(&path).is_some());
        assert!(s.nodes[s.root].reaches_target);
        for a in &s.arcs {
            let next = s.nodes[a.from].tree.apply_flip(a.mv.removed, a.mv.inserted).unwrap();
            assert_eq!(next, s.nodes[a.to].tree);
        }
    }
}
