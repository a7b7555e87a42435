//! The published numbers and theorem-backed properties, each as a named
//! claim that can be re-run and compared against its expected value.
//!
//! Shared by the `acceptance` test target and `treeflip verify-paper`.

use std::fmt;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conjecture_lab::{check_compatible_reparking, check_hull_once, check_parking_property, final_flip_property_check, Caps};
use crate::instances::{by_name, glue, glue_sequence, random_instance, Instance, InstanceError};
use crate::par;
use crate::plane_trees::{enumerate_all_trees, legal_flips, Chord, PlaneTree};
use crate::search::{flip_distance_bfs, reachable_slice, shortest_sequences, FirstFlipFilter, SearchOptions, SliceMode};
use crate::sequences::{chain_decomposition, hull_parking_only, trace_length, FlipSequence, PerfectRule};
use crate::transforms::{check_reparking_conditions, normalize, parks, relocate_parking_to_hull, split_diagonal_parking};

pub const IDS: [&str; 11] = ["P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10", "P11"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    /// Slow claim not requested.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub id: String,
    pub claim: String,
    pub expected: String,
    pub observed: String,
    pub status: ClaimStatus,
    #[serde(with = "millis")]
    pub elapsed: Duration,
}

impl ClaimOutcome {
    pub fn passed(&self) -> bool {
        self.status == ClaimStatus::Pass
    }
}

impl fmt::Display for ClaimOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            ClaimStatus::Pass => "PASS",
            ClaimStatus::Fail => "FAIL",
            ClaimStatus::Skipped => "SKIP",
        };
        write!(
            f,
            "{status} {:<4} {} | expected: {} | observed: {} ({:.1?})",
            self.id, self.claim, self.expected, self.observed, self.elapsed
        )
    }
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimOptions {
    /// Run P6 and the glue(2) hull-only refutation.
    pub include_slow: bool,
    /// Where corpus files are read from first. Instances without a file
    /// there fall back to the built-in ones.
    pub corpus_dir: Option<PathBuf>,
    /// Size of the random corpus behind P8 to P10.
    pub random_instances: usize,
    pub node_cap: u64,
}

impl Default for ClaimOptions {
    fn default() -> Self {
        Self {
            include_slow: false,
            corpus_dir: None,
            random_instances: 200,
            node_cap: 500_000_000,
        }
    }
}

impl ClaimOptions {
    fn instance(&self, name: &str) -> Result<Instance, InstanceError> {
        if let Some(dir) = &self.corpus_dir {
            let path = dir.join(format!("{name}.json"));
            if path.exists() {
                return Instance::load(path);
            }
            if name.starts_with("reparking") {
                return Err(InstanceError::Missing { name: name.to_owned(), path });
            }
        }
        by_name(name)
    }

    fn caps(&self) -> Caps {
        Caps {
            node_cap: self.node_cap,
            ..Caps::default()
        }
    }

    fn search(&self) -> SearchOptions {
        SearchOptions {
            max_sequences: 100_000,
            node_cap: self.node_cap,
            ..SearchOptions::default()
        }
    }
}

/// The seeded random corpus: `count` instances with `n` cycling through
/// 4..=7.
pub fn random_corpus(count: usize) -> Vec<Instance> {
    (0..count as u64).map(|seed| random_instance(4 + (seed % 4) as usize, seed)).collect()
}

pub fn run_all(opts: &ClaimOptions) -> Vec<ClaimOutcome> {
    IDS.iter().map(|id| run(id, opts).expect("known id")).collect()
}

/// Runs one claim; `None` for an unknown id.
pub fn run(id: &str, opts: &ClaimOptions) -> Option<ClaimOutcome> {
    let (claim, expected, slow): (&str, &str, bool) = match id {
        "P1" => ("parking12 optimum and count", "optimum 8, 20 sequences", false),
        "P2" => ("parking12 hull-only optimum", "optimum 9", false),
        "P3" => ("parking12 budget-1 slices", "118 nodes/214 arcs; hull-first 67/120", false),
        "P4" => ("parking12 needs a diagonal park", "20 of 20 park on a diagonal; parking property refuted", false),
        "P5" => (
            "reparking22 three-flip chain",
            "400 sequences; all have a trace-3 chain meeting the four conditions; budget-2 slice 5086 nodes",
            false,
        ),
        "P6" => ("reparking32 four-flip chain", "every shortest sequence has a trace-4 chain", true),
        "P7" => (
            "glued instances",
            "lengths 8/16/24 valid; glue1 hull-only optimum 9; slow: glue2 hull-only optimum above its optimum",
            false,
        ),
        "P8" => ("search agrees with BFS", "optimum = BFS distance on every instance", false),
        "P9" => ("final-flip, hull-once, compatible reparking", "holds on every instance", false),
        "P10" => ("transform contracts", "every applicable rewrite keeps its contract", false),
        "P11" => ("plane spanning tree counts n=3..6", "3, 12, 55, 273", false),
        _ => return None,
    };
    let start = Instant::now();
    let (status, observed) = if slow && !opts.include_slow {
        (ClaimStatus::Skipped, "not run (slow, opt-in)".to_owned())
    } else {
        let result = match id {
            "P1" => p1(opts),
            "P2" => p2(opts),
            "P3" => p3(opts),
            "P4" => p4(opts),
            "P5" => p5(opts),
            "P6" => p6(opts),
            "P7" => p7(opts),
            "P8" => p8(opts),
            "P9" => p9(opts),
            "P10" => p10(opts),
            _ => p11(),
        };
        match result {
            Ok((true, obs)) => (ClaimStatus::Pass, obs),
            Ok((false, obs)) => (ClaimStatus::Fail, obs),
            Err(why) => (ClaimStatus::Fail, why),
        }
    };
    Some(ClaimOutcome {
        id: id.to_owned(),
        claim: claim.to_owned(),
        expected: expected.to_owned(),
        observed,
        status,
        elapsed: start.elapsed(),
    })
}

type Checked = Result<(bool, String), String>;

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn p1(opts: &ClaimOptions) -> Checked {
    let p = opts.instance("parking12").map_err(err)?;
    let r = shortest_sequences(&p.t_initial, &p.t_final, &opts.search()).map_err(err)?;
    Ok((r.optimum == 8 && r.count == 20, format!("optimum {}, {} sequences", r.optimum, r.count)))
}

fn p2(opts: &ClaimOptions) -> Checked {
    let p = opts.instance("parking12").map_err(err)?;
    let o = SearchOptions {
        restrict_parking_to_hull: true,
        ..opts.search()
    };
    let r = shortest_sequences(&p.t_initial, &p.t_final, &o).map_err(err)?;
    Ok((r.optimum == 9, format!("optimum {}", r.optimum)))
}

fn p3(opts: &ClaimOptions) -> Checked {
    let p = opts.instance("parking12").map_err(err)?;
    let opt = shortest_sequences(&p.t_initial, &p.t_final, &opts.search()).map_err(err)?.optimum;
    let mut counts = Vec::new();
    for filter in [FirstFlipFilter::Any, FirstFlipFilter::NonPerfectOnHull] {
        let s = reachable_slice(&p.t_initial, &p.t_final, 1, filter, SliceMode::LengthPruned(opt), PerfectRule::Strict, opts.node_cap)
            .map_err(err)?;
        counts.push((s.node_count(), s.arc_count()));
    }
    Ok((
        counts == [(118, 214), (67, 120)],
        format!("{}/{}; hull-first {}/{}", counts[0].0, counts[0].1, counts[1].0, counts[1].1),
    ))
}

fn p4(opts: &ClaimOptions) -> Checked {
    let p = opts.instance("parking12").map_err(err)?;
    let r = shortest_sequences(&p.t_initial, &p.t_final, &opts.search()).map_err(err)?;
    let mut diagonal = 0;
    for s in &r.sequences {
        if !hull_parking_only(s, &p.t_initial, &p.t_final).map_err(err)? {
            diagonal += 1;
        }
    }
    let v = check_parking_property(&p, opts.caps());
    let ok = !r.is_truncated() && diagonal == r.sequences.len() && r.count == 20 && v.refuted();
    Ok((ok, format!("{diagonal} of {} park on a diagonal; parking property {:?}", r.count, v.status)))
}

fn longest_chain(seq: &FlipSequence) -> usize {
    chain_decomposition(seq).iter().map(|c| c.trace_length()).max().unwrap_or(0)
}

fn p5(opts: &ClaimOptions) -> Checked {
    let inst = opts.instance("reparking22").map_err(|e| format!("instance unavailable: {e}"))?;
    let r = shortest_sequences(&inst.t_initial, &inst.t_final, &opts.search()).map_err(err)?;
    let mut with_chain = 0;
    let mut conditions = 0;
    for s in &r.sequences {
        let roots: Vec<_> = chain_decomposition(s).iter().filter(|c| c.trace_length() == 3).map(|c| c.root()).collect();
        if !roots.is_empty() {
            with_chain += 1;
        }
        if roots.iter().any(|&root| check_reparking_conditions(s, root).is_ok_and(|c| c.all())) {
            conditions += 1;
        }
    }
    let slice = reachable_slice(
        &inst.t_initial,
        &inst.t_final,
        2,
        FirstFlipFilter::Any,
        SliceMode::LengthPruned(r.optimum),
        PerfectRule::Strict,
        opts.node_cap,
    )
    .map_err(err)?;
    let n = r.sequences.len();
    let ok = !r.is_truncated() && r.count == 400 && with_chain == n && conditions == n && slice.node_count() == 5086;
    Ok((
        ok,
        format!(
            "optimum {}, {} sequences; trace-3 chain in {with_chain}, conditions in {conditions}; slice {} nodes",
            r.optimum,
            r.count,
            slice.node_count()
        ),
    ))
}

fn p6(opts: &ClaimOptions) -> Checked {
    let inst = opts.instance("reparking32").map_err(|e| format!("instance unavailable: {e}"))?;
    let r = shortest_sequences(&inst.t_initial, &inst.t_final, &opts.search()).map_err(err)?;
    let hits = r.sequences.iter().filter(|s| longest_chain(s) >= 4).count();
    Ok((
        !r.is_truncated() && hits == r.sequences.len(),
        format!("optimum {}, trace-4 chain in {hits} of {} sequences", r.optimum, r.count),
    ))
}

fn p7(opts: &ClaimOptions) -> Checked {
    let mut ok = true;
    let mut obs = Vec::new();
    for k in 1..=3 {
        let inst = opts.instance(&format!("glue{k}")).or_else(|_| glue(k)).map_err(err)?;
        let seq = glue_sequence(k).map_err(err)?;
        let valid = seq.start == inst.t_initial && seq.end().is_ok_and(|t| t == inst.t_final);
        ok &= valid && seq.len() == 8 * k;
        obs.push(format!("k={k}: length {}{}", seq.len(), if valid { "" } else { " (invalid)" }));
    }
    let g1 = glue(1).map_err(err)?;
    let hull = SearchOptions {
        restrict_parking_to_hull: true,
        ..opts.search()
    };
    let r = shortest_sequences(&g1.t_initial, &g1.t_final, &hull).map_err(err)?;
    ok &= r.optimum == 9;
    obs.push(format!("glue1 hull-only optimum {}", r.optimum));
    if opts.include_slow {
        // A hull-only optimum above the optimum means no shortest sequence
        // parks only on hull edges, without enumerating them all.
        let g2 = glue(2).map_err(err)?;
        let count_only = SearchOptions {
            max_sequences: 0,
            ..opts.search()
        };
        let free = shortest_sequences(&g2.t_initial, &g2.t_final, &count_only).map_err(err)?;
        let hull = shortest_sequences(
            &g2.t_initial,
            &g2.t_final,
            &SearchOptions {
                restrict_parking_to_hull: true,
                ..count_only
            },
        )
        .map_err(err)?;
        ok &= hull.optimum > free.optimum;
        obs.push(format!(
            "glue2 optimum {} ({} sequences), hull-only optimum {}",
            free.optimum, free.count, hull.optimum
        ));
    }
    Ok((ok, obs.join("; ")))
}

fn p8(opts: &ClaimOptions) -> Checked {
    let corpus = random_corpus(opts.random_instances);
    let search = opts.search();
    let cap = opts.node_cap;
    let results = par::map(corpus, |inst| -> Result<Option<String>, String> {
        let r = shortest_sequences(&inst.t_initial, &inst.t_final, &search).map_err(err)?;
        let d = flip_distance_bfs(&inst.t_initial, &inst.t_final, cap).map_err(err)?;
        Ok((r.optimum != d).then(|| format!("{}: search {} vs BFS {d}", inst.name, r.optimum)))
    });
    let mismatches: Vec<String> = results.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect();
    let total = opts.random_instances;
    Ok((
        mismatches.is_empty(),
        match mismatches.first() {
            None => format!("{total} of {total} agree"),
            Some(first) => format!("{} mismatches, first {first}", mismatches.len()),
        },
    ))
}

fn p9(opts: &ClaimOptions) -> Checked {
    let caps = opts.caps();
    let failures: Vec<String> = par::map(random_corpus(opts.random_instances), |inst| {
        [final_flip_property_check(&inst, caps), check_hull_once(&inst, caps), check_compatible_reparking(&inst, caps)]
            .into_iter()
            .filter(|v| !v.holds())
            .map(|v| v.to_text())
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    Ok((
        failures.is_empty(),
        match failures.first() {
            None => format!("all three hold on {} instances", opts.random_instances),
            Some(first) => format!("{} failures, first: {first}", failures.len()),
        },
    ))
}

/// Uniformly random legal flips from `start`; valid, rarely short.
pub fn random_walk(start: &PlaneTree, len: usize, seed: u64) -> FlipSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = *start;
    let mut moves = Vec::with_capacity(len);
    for _ in 0..len {
        let flips = legal_flips(&t);
        let m = flips[rng.gen_range(0..flips.len())].as_move();
        t = t.apply_flip(m.removed, m.inserted).expect("legal flip applies");
        moves.push(m);
    }
    FlipSequence::new(*start, moves)
}

/// Shortest sequences of the random corpus (flagged `true`) plus one
/// random walk per instance. Shortest sequences on so few points rarely
/// park on a diagonal, so the walks supply most of the applicable parks.
pub fn harvest(count: usize, per_instance: usize) -> Vec<(FlipSequence, bool)> {
    let opts = SearchOptions {
        max_sequences: per_instance,
        ..SearchOptions::default()
    };
    let corpus: Vec<(u64, Instance)> = (0u64..).zip(random_corpus(count)).collect();
    let per = par::map(corpus, |(seed, inst)| {
        let mut out: Vec<(FlipSequence, bool)> = shortest_sequences(&inst.t_initial, &inst.t_final, &opts)
            .map(|r| r.sequences)
            .unwrap_or_default()
            .into_iter()
            .map(|s| (s, true))
            .collect();
        out.push((random_walk(&inst.t_initial, 4 + inst.n, seed), false));
        out.push((random_walk(&inst.t_final, 6 + inst.n, !seed), false));
        out
    });
    per.into_iter().flatten().collect()
}

fn p10(opts: &ClaimOptions) -> Checked {
    let (mut relocated, mut split, mut normalized) = (0usize, 0usize, 0usize);
    let mut broken = Vec::new();
    for (seq, shortest) in harvest(opts.random_instances, 60) {
        let end = seq.end().map_err(err)?;
        for park in parks(&seq).map_err(err)?.into_iter().filter(|p| p.diagonal) {
            if park.enter_compatible || park.leave_compatible {
                relocated += 1;
                match relocate_parking_to_hull(&seq, park.enter) {
                    Ok(out) if (out.length_delta == 0 || (!shortest && out.length_delta < 0))
                        && out.other_traces_unchanged()
                        && out.sequence.end().ok() == Some(end) => {}
                    Ok(out) => broken.push(format!("relocate at {} changed length by {}", park.enter, out.length_delta)),
                    Err(e) => broken.push(format!("relocate at {}: {e}", park.enter)),
                }
            } else {
                split += 1;
                match split_diagonal_parking(&seq, park.enter) {
                    Ok(out) => {
                        let hull_parks = splits_onto_hull(&out.sequence, park.from(&seq), park.to(&seq));
                        let why = if !(out.length_delta == 1 || (!shortest && out.length_delta < 1)) {
                            Some(format!("changed length by {}", out.length_delta))
                        } else if !out.other_traces_unchanged() {
                            Some("changed another trace".to_owned())
                        } else if !hull_parks {
                            Some(format!("left a diagonal park: {:?}", out.sequence.moves))
                        } else if out.sequence.end().ok() != Some(end) {
                            Some("moved the end tree".to_owned())
                        } else {
                            None
                        };
                        if let Some(why) = why {
                            broken.push(format!("split at {} of {:?} {why}", park.enter, seq));
                        }
                    }
                    Err(e) => broken.push(format!("split at {}: {e}", park.enter)),
                }
            }
        }
        let trees = seq.replay().map_err(err)?;
        for e in seq.start.chords() {
            if trees.iter().any(|t| t.chords().any(|c| c.crosses(e))) {
                continue;
            }
            normalized += 1;
            match normalize(&seq, e) {
                Ok(out) if out.length_delta <= 0 && trace_length(&out.sequence, e).is_ok_and(|l| l <= 1) => {}
                Ok(out) => broken.push(format!("normalize {e} changed length by {}", out.length_delta)),
                Err(e) => broken.push(format!("normalize: {e}")),
            }
        }
    }
    let obs = format!("{relocated} relocations, {split} splits, {normalized} normalizations");
    let enough = relocated > 0 && split > 0 && normalized > 0;
    Ok(match broken.first() {
        None => (enough, obs),
        Some(first) => (false, format!("{obs}; {} broken, first: {first}", broken.len())),
    })
}

/// In the chain through `from` and `to`, everything parked in between is a
/// hull edge.
fn splits_onto_hull(seq: &FlipSequence, from: Chord, to: Chord) -> bool {
    let points = seq.start.points();
    chain_decomposition(seq).iter().any(|c| {
        let links = &c.links;
        (0..links.len()).filter(|&i| links[i] == from).any(|i| {
            links[i + 1..]
                .iter()
                .position(|&l| l == to)
                .is_some_and(|j| j > 0 && links[i + 1..i + 1 + j].iter().all(|&l| points.is_hull_edge(l)))
        })
    })
}

fn p11() -> Checked {
    let mut counts = Vec::new();
    for n in 3..=6 {
        counts.push(enumerate_all_trees(n, 1_000_000).map_err(err)?.len());
    }
    Ok((counts == [3, 12, 55, 273], format!("{counts:?}")))
}
