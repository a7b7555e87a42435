//! Instance-level checks of sequence properties over all shortest flip
//! sequences.
//!
//! A property *holds* on an instance when some shortest sequence has it and
//! is *refuted* when none does. Refutation needs every shortest sequence,
//! so if the enumeration cap cuts the scan short and no witness turned up,
//! the verdict is inconclusive rather than refuted.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::instances::Instance;
use crate::plane_trees::{Chord, PlaneTree};
use crate::search::{shortest_sequences, SearchError, SearchOptions, SearchResult};
use crate::sequences::{chain_decomposition, happy_edges, hull_parking_only, is_final_flip, FlipSequence};

/// Enumeration limits for a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Shortest sequences scanned; a refutation needs all of them.
    pub max_sequences: usize,
    pub node_cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            max_sequences: 100_000,
            node_cap: 200_000_000,
        }
    }
}

impl Caps {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            max_sequences: self.max_sequences,
            node_cap: self.node_cap,
            ..SearchOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "reason")]
pub enum Status {
    HoldsOnInstance,
    RefutedOnInstance,
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: String,
    pub instance: String,
    pub status: Status,
    /// Optimal length of the sequence family that was scanned.
    pub optimum: Option<usize>,
    /// Exact number of shortest sequences.
    pub total: Option<u64>,
    /// How many of them were scanned.
    pub examined: u64,
    /// A shortest sequence with the property, when it holds.
    pub witness: Option<FlipSequence>,
    /// Property-specific figure, e.g. the least maximum trace length.
    pub value: Option<usize>,
    /// Which distance "shortest" refers to.
    pub mode: String,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.status == Status::HoldsOnInstance
    }

    pub fn refuted(&self) -> bool {
        self.status == Status::RefutedOnInstance
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let status = match &self.status {
            Status::HoldsOnInstance => "holds".to_owned(),
            Status::RefutedOnInstance => "refuted".to_owned(),
            Status::Inconclusive(why) => format!("inconclusive ({why})"),
        };
        let _ = write!(s, "{} on {}: {status}", self.property, self.instance);
        if let (Some(opt), Some(total)) = (self.optimum, self.total) {
            let _ = write!(s, "; optimum {opt}, {} of {total} shortest sequences examined", self.examined);
        }
        if let Some(v) = self.value {
            let _ = write!(s, "; value {v}");
        }
        let _ = write!(s, "; {}", self.mode);
        s
    }
}

const UNRESTRICTED: &str = "shortest over all flips";
const COMPATIBLE: &str = "shortest among compatible-only sequences";

fn inconclusive(property: &str, inst: &Instance, mode: &str, e: &SearchError) -> Verdict {
    Verdict {
        property: property.to_owned(),
        instance: inst.name.clone(),
        status: Status::Inconclusive(e.to_string()),
        optimum: None,
        total: None,
        examined: 0,
        witness: None,
        value: None,
        mode: mode.to_owned(),
    }
}

/// Scans `found` for a sequence satisfying `pred`.
fn decide(property: &str, inst: &Instance, mode: &str, found: &SearchResult, pred: impl Fn(&FlipSequence) -> bool) -> Verdict {
    let witness = found.sequences.iter().find(|s| pred(s)).cloned();
    let status = match (&witness, found.is_truncated()) {
        (Some(_), _) => Status::HoldsOnInstance,
        (None, false) => Status::RefutedOnInstance,
        (None, true) => Status::Inconclusive(format!(
            "no witness among the first {} of {} shortest sequences",
            found.sequences.len(),
            found.count
        )),
    };
    Verdict {
        property: property.to_owned(),
        instance: inst.name.clone(),
        status,
        optimum: Some(found.optimum),
        total: Some(found.count),
        examined: found.sequences.len() as u64,
        witness,
        value: None,
        mode: mode.to_owned(),
    }
}

fn run(property: &str, inst: &Instance, opts: &SearchOptions, mode: &str, pred: impl Fn(&FlipSequence) -> bool) -> Verdict {
    match shortest_sequences(&inst.t_initial, &inst.t_final, opts) {
        Ok(found) => decide(property, inst, mode, &found, pred),
        Err(e) => inconclusive(property, inst, mode, &e),
    }
}

fn keeps_happy_edges(seq: &FlipSequence, t_f: &PlaneTree) -> bool {
    let happy = seq.start.chord_set().intersection(t_f.chord_set());
    seq.moves.iter().all(|m| !happy.contains(m.removed))
}

fn max_trace(seq: &FlipSequence) -> usize {
    chain_decomposition(seq).iter().map(|c| c.trace_length()).max().unwrap_or(0)
}

/// Some shortest sequence never removes a happy edge.
pub fn check_happy_property(inst: &Instance, caps: Caps) -> Verdict {
    let t_f = inst.t_final;
    run("happy edge property", inst, &caps.options(), UNRESTRICTED, |s| keeps_happy_edges(s, &t_f))
}

/// Some shortest sequence parks only on hull edges.
pub fn check_parking_property(inst: &Instance, caps: Caps) -> Verdict {
    let (t_i, t_f) = (inst.t_initial, inst.t_final);
    run("parking property", inst, &caps.options(), UNRESTRICTED, |s| {
        hull_parking_only(s, &t_i, &t_f).unwrap_or(false)
    })
}

/// Some shortest sequence flips every edge at most twice. The verdict's
/// value is the least maximum trace length over the scanned sequences.
pub fn check_reparking_property(inst: &Instance, caps: Caps) -> Verdict {
    let property = "reparking property";
    match shortest_sequences(&inst.t_initial, &inst.t_final, &caps.options()) {
        Ok(found) => {
            let mut v = decide(property, inst, UNRESTRICTED, &found, |s| max_trace(s) <= 2);
            v.value = found.sequences.iter().map(max_trace).min();
            v
        }
        Err(e) => inconclusive(property, inst, UNRESTRICTED, &e),
    }
}

/// Every non-final flip removes a chord that a later tree crosses.
pub fn has_final_flip_property(seq: &FlipSequence) -> bool {
    let Ok(trees) = seq.replay() else {
        return false;
    };
    seq.moves.iter().enumerate().all(|(i, m)| {
        is_final_flip(seq, i).unwrap_or(false)
            || trees[i + 1..].iter().any(|t| t.chords().any(|c| c.crosses(m.removed)))
    })
}

pub fn final_flip_property_check(inst: &Instance, caps: Caps) -> Verdict {
    run("final flip property", inst, &caps.options(), UNRESTRICTED, has_final_flip_property)
}

/// Every hull edge of the start tree is flipped at most once.
pub fn flips_hull_edges_at_most_once(seq: &FlipSequence) -> bool {
    let points = seq.start.points();
    chain_decomposition(seq)
        .iter()
        .all(|c| !points.is_hull_edge(c.root()) || !seq.start.contains(c.root()) || c.trace_length() <= 1)
}

pub fn check_hull_once(inst: &Instance, caps: Caps) -> Verdict {
    run("hull edges flipped at most once", inst, &caps.options(), UNRESTRICTED, flips_hull_edges_at_most_once)
}

/// Reparking property for compatible flips, with "shortest" taken in the
/// compatible flip graph.
pub fn check_compatible_reparking(inst: &Instance, caps: Caps) -> Verdict {
    let opts = SearchOptions {
        compatible_only: true,
        ..caps.options()
    };
    run("compatible reparking property", inst, &opts, COMPATIBLE, |s| max_trace(s) <= 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fixedness {
    StronglyFixed,
    WeaklyFixed,
    Neither,
}

/// Fixedness of every happy edge, or why it could not be decided.
pub fn classify_fixedness(inst: &Instance, caps: Caps) -> Result<BTreeMap<Chord, Fixedness>, SearchError> {
    let found = shortest_sequences(&inst.t_initial, &inst.t_final, &caps.options())?;
    let happy = happy_edges(&inst.t_initial, &inst.t_final).expect("instance trees share n");
    let complete = !found.is_truncated();
    let scanned = found.sequences.len();
    let mut out = BTreeMap::new();
    for h in happy.iter() {
        let fixed = found
            .sequences
            .iter()
            .filter(|s| s.moves.iter().all(|m| m.removed != h))
            .count();
        let class = match (fixed, complete) {
            (f, true) if f == scanned => Fixedness::StronglyFixed,
            (0, true) => Fixedness::Neither,
            (f, _) if f > 0 && f < scanned => Fixedness::WeaklyFixed,
            // Fixed in all or none of a partial scan: the rest could go either way.
            _ => {
                return Err(SearchError::CapExceeded {
                    what: "stored sequence",
                    cap: caps.max_sequences as u64,
                })
            }
        };
        out.insert(h, class);
    }
    Ok(out)
}
