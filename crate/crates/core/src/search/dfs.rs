use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use super::{
    check_same_n, lower_bound, missing, FirstFlipFilter, MoveFilter, SearchError, SearchOptions, SearchResult, SearchStats,
};
use crate::par;
use crate::plane_trees::{legal_flips, ChordSet, Move, PlaneTree};
use crate::sequences::FlipSequence;

/// Minimum number of independent subtrees handed to workers.
const MIN_TASKS: usize = 32;

/// All shortest sequences from `t_i` to `t_f` satisfying `opts`.
///
/// The count is exact; only the stored sequences are capped. Exceeding the
/// node cap or the length cap returns an error, never a partial count.
pub fn shortest_sequences(t_i: &PlaneTree, t_f: &PlaneTree, opts: &SearchOptions) -> Result<SearchResult, SearchError> {
    check_same_n(t_i, t_f)?;
    let started = Instant::now();
    let lb = lower_bound(t_i, t_f)?;
    let expanded = AtomicU64::new(0);
    for bound in lb..=opts.max_length {
        let found = search_bound(t_i, t_f, opts, bound, &expanded)?;
        if found.count > 0 {
            return Ok(SearchResult {
                optimum: bound,
                count: found.count,
                sequences: found.sequences,
                lower_bound: lb,
                stats: SearchStats {
                    nodes_expanded: expanded.load(Ordering::Relaxed),
                    elapsed: started.elapsed(),
                },
            });
        }
    }
    Err(SearchError::NoSequence {
        max_length: opts.max_length,
    })
}

#[derive(Clone)]
struct Prefix {
    tree: PlaneTree,
    moves: Vec<Move>,
    path: Vec<ChordSet>,
    nonperfect: usize,
}

#[derive(Default)]
struct Found {
    count: u64,
    sequences: Vec<FlipSequence>,
}

/// Memo key: tree, remaining length, remaining budget, whether a
/// non-perfect flip has happened.
///
/// Below the optimum every stored value is zero, so the memo only prunes.
/// At the optimum a successful walk never repeats a tree (cutting the cycle
/// would give a shorter sequence), so the number of completions of a state
/// does not depend on the path that reached it and memoized counts are
/// exact. The cycle-cutting argument needs every filter to be a per-move
/// filter; with a first-flip filter the memo is switched off.
type MemoKey = (ChordSet, u8, u8, bool);

struct Worker<'a> {
    filter: MoveFilter<'a>,
    bound: usize,
    budget: usize,
    start: PlaneTree,
    expanded: &'a AtomicU64,
    memo: Option<HashMap<MemoKey, u64>>,
    found: Found,
    cap_hit: bool,
}

fn search_bound(
    t_i: &PlaneTree,
    t_f: &PlaneTree,
    opts: &SearchOptions,
    bound: usize,
    expanded: &AtomicU64,
) -> Result<Found, SearchError> {
    let filter = MoveFilter { t_i, t_f, opts };
    let budget = opts.max_nonperfect.unwrap_or(usize::MAX);
    let root = Prefix {
        tree: *t_i,
        moves: Vec::new(),
        path: vec![*t_i.chord_set()],
        nonperfect: 0,
    };
    if missing(t_i, t_f) > bound {
        return Ok(Found::default());
    }
    if t_i == t_f {
        return Ok(Found {
            count: 1,
            sequences: vec![FlipSequence::empty(*t_i)],
        });
    }

    // Breadth-first split into independent prefixes, in move order, so the
    // concatenated worker output equals the sequential DFS order.
    let mut frontier = vec![root];
    let mut finished = Found::default();
    while frontier.len() < MIN_TASKS && !frontier.is_empty() && frontier[0].moves.len() < bound {
        let mut next = Vec::new();
        for p in &frontier {
            for child in children(&filter, bound, budget, p) {
                if child.tree == *t_f {
                    // Only reachable at depth == bound, which the loop guard excludes
                    // unless bound is tiny; record it directly.
                    if child.moves.len() == bound {
                        finished.count += 1;
                        finished.sequences.push(FlipSequence::new(*t_i, child.moves));
                    }
                    continue;
                }
                next.push(child);
            }
        }
        frontier = next;
    }
    if frontier.is_empty() {
        finished.sequences.truncate(opts.max_sequences);
        return Ok(finished);
    }

    let results = par::map(frontier, |prefix| {
        let mut w = Worker {
            filter: MoveFilter { t_i, t_f, opts },
            bound,
            budget,
            start: *t_i,
            expanded,
            memo: (opts.first_flip_filter == FirstFlipFilter::Any).then(HashMap::new),
            found: Found::default(),
            cap_hit: false,
        };
        let mut prefix = prefix;
        w.dfs(&mut prefix);
        (w.found, w.cap_hit)
    });

    let mut out = finished;
    for (found, cap_hit) in results {
        if cap_hit {
            return Err(SearchError::CapExceeded {
                what: "node",
                cap: opts.node_cap,
            });
        }
        out.count += found.count;
        let room = opts.max_sequences.saturating_sub(out.sequences.len());
        out.sequences.extend(found.sequences.into_iter().take(room));
    }
    Ok(out)
}

/// Legal, option-respecting extensions of `p` that can still finish
/// within `bound`.
fn children(filter: &MoveFilter<'_>, bound: usize, budget: usize, p: &Prefix) -> Vec<Prefix> {
    let depth = p.moves.len();
    let mut out = Vec::new();
    for m in legal_flips(&p.tree) {
        let perfect = filter.is_perfect(&m);
        let nonperfect = p.nonperfect + usize::from(!perfect);
        if nonperfect > budget || !filter.allows(&m, p.nonperfect > 0) {
            continue;
        }
        let next = p.tree.apply_unchecked(m.as_move());
        if depth + 1 + missing(&next, filter.t_f) > bound || p.path.contains(next.chord_set()) {
            continue;
        }
        let mut child = p.clone();
        child.tree = next;
        child.moves.push(m.as_move());
        child.path.push(*next.chord_set());
        child.nonperfect = nonperfect;
        out.push(child);
    }
    out
}

impl Worker<'_> {
    /// Number of sequences completing `p`.
    fn dfs(&mut self, p: &mut Prefix) -> u64 {
        if self.cap_hit {
            return 0;
        }
        if p.tree == *self.filter.t_f {
            self.found.count += 1;
            if self.found.sequences.len() < self.filter.opts.max_sequences {
                self.found.sequences.push(FlipSequence::new(self.start, p.moves.clone()));
            }
            return 1;
        }
        let depth = p.moves.len();
        if depth >= self.bound {
            return 0;
        }
        let remaining_budget = self.budget.saturating_sub(p.nonperfect).min(u8::MAX as usize) as u8;
        let key: MemoKey = (
            *p.tree.chord_set(),
            (self.bound - depth) as u8,
            remaining_budget,
            p.nonperfect > 0,
        );
        let want_sequences = self.found.sequences.len() < self.filter.opts.max_sequences;
        if let Some(&c) = self.memo.as_ref().and_then(|m| m.get(&key)) {
            if c == 0 || !want_sequences {
                self.found.count += c;
                return c;
            }
        }
        if self.expanded.fetch_add(1, Ordering::Relaxed) >= self.filter.opts.node_cap {
            self.cap_hit = true;
            return 0;
        }
        let t_f = self.filter.t_f;
        let mut total = 0;
        for m in legal_flips(&p.tree) {
            let perfect = self.filter.is_perfect(&m);
            let nonperfect = p.nonperfect + usize::from(!perfect);
            if nonperfect > self.budget || !self.filter.allows(&m, p.nonperfect > 0) {
                continue;
            }
            let next = p.tree.apply_unchecked(m.as_move());
            if depth + 1 + missing(&next, t_f) > self.bound || p.path.contains(next.chord_set()) {
                continue;
            }
            let (saved_tree, saved_np) = (p.tree, p.nonperfect);
            p.tree = next;
            p.nonperfect = nonperfect;
            p.moves.push(m.as_move());
            p.path.push(*next.chord_set());
            total += self.dfs(p);
            p.path.pop();
            p.moves.pop();
            p.tree = saved_tree;
            p.nonperfect = saved_np;
        }
        if !self.cap_hit {
            if let Some(memo) = self.memo.as_mut() {
                memo.insert(key, total);
            }
        }
        total
    }
}
