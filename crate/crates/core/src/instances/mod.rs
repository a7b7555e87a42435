//! Instance corpus, on-disk format, the gluing construction and random
//! instances.
//!
//! An instance file is a JSON document:
//!
//! ```json
//! {
//!   "name": "star-to-path",
//!   "n": 4,
//!   "t_initial": [[0, 1], [0, 2], [0, 3]],
//!   "t_final": [[0, 1], [1, 2], [2, 3]],
//!   "provenance": "optional free text"
//! }
//! ```
//!
//! Labels are 0-indexed counterclockwise and every pair is written `[a, b]`
//! with `a < b`. Unknown fields are rejected.

mod glue;
mod random;

pub use glue::{glue, glue_sequence};
pub use random::random_instance;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_trees::{validate_tree, Chord, Move, PlaneTree, TreeError};
use crate::sequences::FlipSequence;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{field}: {source}")]
    Invalid {
        field: &'static str,
        #[source]
        source: TreeError,
    },
    #[error("{field}: chord [{a}, {b}] must be written with a < b")]
    Unordered { field: &'static str, a: usize, b: usize },
    #[error("instance declares n = {declared} but {field} lives on {found} points")]
    PointMismatch { declared: usize, field: &'static str, found: usize },
    #[error("glue needs at least one block and at most 3 (n = 10k + 2 <= 32), got {k}")]
    BadGlueCount { k: usize },
    #[error("unknown instance {name}")]
    Unknown { name: String },
    #[error("no transcription of {name} at {path}")]
    Missing { name: String, path: PathBuf },
}

impl From<serde_json::Error> for InstanceError {
    fn from(e: serde_json::Error) -> Self {
        InstanceError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// A start and a final tree on the same point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub n: usize,
    pub t_initial: PlaneTree,
    pub t_final: PlaneTree,
    pub provenance: String,
}

impl Instance {
    pub fn new(name: impl Into<String>, t_initial: PlaneTree, t_final: PlaneTree, provenance: impl Into<String>) -> Result<Self, InstanceError> {
        if t_initial.n() != t_final.n() {
            return Err(InstanceError::PointMismatch {
                declared: t_initial.n(),
                field: "t_final",
                found: t_final.n(),
            });
        }
        Ok(Self {
            name: name.into(),
            n: t_initial.n(),
            t_initial,
            t_final,
            provenance: provenance.into(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let t_initial = tree_field("t_initial", file.n, &file.t_initial)?;
        let t_final = tree_field("t_final", file.n, &file.t_final)?;
        Ok(Self {
            name: file.name,
            n: file.n,
            t_initial,
            t_final,
            provenance: file.provenance,
        })
    }

    /// The file form, one chord per line.
    pub fn to_json(&self) -> String {
        let mut s = format!("{{\n  \"name\": {},\n  \"n\": {},\n", quoted(&self.name), self.n);
        s += &format!("  \"t_initial\": {},\n", pair_list(&pairs(&self.t_initial), "  "));
        s += &format!("  \"t_final\": {}", pair_list(&pairs(&self.t_final), "  "));
        if !self.provenance.is_empty() {
            s += &format!(",\n  \"provenance\": {}", quoted(&self.provenance));
        }
        s += "\n}\n";
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, InstanceError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| InstanceError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), InstanceError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| InstanceError::Io {
            path: path.to_owned(),
            source,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    n: usize,
    t_initial: Vec<[usize; 2]>,
    t_final: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    provenance: String,
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn pair_list<T: Serialize>(items: &[T], indent: &str) -> String {
    if items.is_empty() {
        return "[]".to_owned();
    }
    let body: Vec<String> = items
        .iter()
        .map(|p| {
            let compact = serde_json::to_string(p).expect("pairs serialize");
            format!("{indent}  {}", compact.replace(',', ", "))
        })
        .collect();
    format!("[\n{}\n{indent}]", body.join(",\n"))
}

fn pairs(t: &PlaneTree) -> Vec<[usize; 2]> {
    t.chords().map(|c| [c.a(), c.b()]).collect()
}

fn chord_field(field: &'static str, n: usize, [a, b]: [usize; 2]) -> Result<Chord, InstanceError> {
    if a >= b {
        return Err(InstanceError::Unordered { field, a, b });
    }
    let c = Chord::try_new(a, b).map_err(|source| InstanceError::Invalid { field, source })?;
    if b >= n {
        return Err(InstanceError::Invalid {
            field,
            source: TreeError::LabelOutOfRange { chord: c, n },
        });
    }
    Ok(c)
}

fn tree_field(field: &'static str, n: usize, raw: &[[usize; 2]]) -> Result<PlaneTree, InstanceError> {
    let chords = raw
        .iter()
        .map(|&p| chord_field(field, n, p))
        .collect::<Result<Vec<_>, _>>()?;
    validate_tree(&chords, n).map_err(|source| InstanceError::Invalid { field, source })
}

/// A named flip sequence on disk: start tree plus `[removed, inserted]`
/// pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceFile {
    pub name: String,
    pub sequence: FlipSequence,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceRepr {
    name: String,
    n: usize,
    start: Vec<[usize; 2]>,
    moves: Vec<[[usize; 2]; 2]>,
}

impl SequenceFile {
    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let repr: SequenceRepr = serde_json::from_str(text)?;
        let start = tree_field("start", repr.n, &repr.start)?;
        let moves = repr
            .moves
            .iter()
            .map(|&[r, i]| Ok(Move::new(chord_field("moves", repr.n, r)?, chord_field("moves", repr.n, i)?)))
            .collect::<Result<Vec<_>, InstanceError>>()?;
        Ok(Self {
            name: repr.name,
            sequence: FlipSequence::new(start, moves),
        })
    }

    pub fn to_json(&self) -> String {
        let c = |c: Chord| [c.a(), c.b()];
        let moves: Vec<[[usize; 2]; 2]> = self.sequence.moves.iter().map(|m| [c(m.removed), c(m.inserted)]).collect();
        format!(
            "{{\n  \"name\": {},\n  \"n\": {},\n  \"start\": {},\n  \"moves\": {}\n}}\n",
            quoted(&self.name),
            self.sequence.start.n(),
            pair_list(&pairs(&self.sequence.start), "  "),
            pair_list(&moves, "  ")
        )
    }
}

const PARKING12: &str = include_str!("../../corpus/parking12.json");
const PARKING12_OPTIMAL: &str = include_str!("../../corpus/parking12_optimal.seq.json");
const FIG2: &str = include_str!("../../corpus/trace_example.seq.json");

fn bundled(text: &str) -> Instance {
    Instance::from_json(text).expect("bundled corpus file is valid")
}

/// The 12-point instance on which every shortest sequence parks on a
/// diagonal.
pub fn parking12() -> Instance {
    bundled(PARKING12)
}

/// One of the 20 optimal sequences for [`parking12`]: park `5-11` on the
/// diagonal `0-6`, six perfect flips, then move the park to `1-7`.
pub fn parking12_optimal() -> FlipSequence {
    SequenceFile::from_json(PARKING12_OPTIMAL)
        .expect("bundled sequence file is valid")
        .sequence
}

/// Seven-point sequence with one flip of each kind; the traced edge `2-5`
/// moves three times and `4-5` once.
pub fn trace_example() -> FlipSequence {
    SequenceFile::from_json(FIG2).expect("bundled sequence file is valid").sequence
}

/// Directory holding the corpus files: `$TREEFLIP_CORPUS` if set, else the
/// `corpus/` directory of this crate.
pub fn corpus_dir() -> PathBuf {
    std::env::var_os("TREEFLIP_CORPUS")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus"))
}

fn from_corpus_dir(name: &str) -> Result<Instance, InstanceError> {
    let path = corpus_dir().join(format!("{name}.json"));
    if !path.exists() {
        return Err(InstanceError::Missing {
            name: name.to_owned(),
            path,
        });
    }
    Instance::load(path)
}

/// The 22-point instance whose shortest sequences all flip one edge three
/// times. Read from the corpus directory; see the README for its status.
pub fn reparking22() -> Result<Instance, InstanceError> {
    from_corpus_dir("reparking22")
}

/// The 32-point instance whose shortest sequences all flip one edge four
/// times. Read from the corpus directory.
pub fn reparking32() -> Result<Instance, InstanceError> {
    from_corpus_dir("reparking32")
}

/// Names of the known instances, in listing order.
pub fn corpus_names() -> Vec<&'static str> {
    vec!["parking12", "glue2", "glue3", "reparking22", "reparking32"]
}

/// Looks up a known instance by name.
pub fn by_name(name: &str) -> Result<Instance, InstanceError> {
    match name {
        "parking12" => Ok(parking12()),
        "glue1" => glue(1),
        "glue2" => glue(2),
        "glue3" => glue(3),
        "reparking22" => reparking22(),
        "reparking32" => reparking32(),
        _ => Err(InstanceError::Unknown { name: name.to_owned() }),
    }
}

/// Every known instance that is available in this build.
pub fn corpus() -> Vec<Instance> {
    corpus_names().into_iter().filter_map(|n| by_name(n).ok()).collect()
}

/// Every `*.json` instance in `dir`, sorted by file name. Sequence files
/// (`*.seq.json`) are skipped.
pub fn load_dir(dir: impl AsRef<Path>) -> Result<Vec<Instance>, InstanceError> {
    let dir = dir.as_ref();
    let io = |source| InstanceError::Io {
        path: dir.to_owned(),
        source,
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| {
        let name = p.file_name().and_then(|s| s.to_str()).unwrap_or("");
        name.ends_with(".json") && !name.ends_with(".seq.json")
    });
    paths.sort();
    paths.iter().map(Instance::load).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_files_parse() {
        let p = parking12();
        assert_eq!(p.n, 12);
        assert_eq!(parking12_optimal().end().unwrap(), p.t_final);
        assert_eq!(trace_example().len(), 4);
    }

    #[test]
    fn file_forms_round_trip() {
        let p = parking12();
        assert_eq!(Instance::from_json(&p.to_json()).unwrap(), p);
        assert_eq!(p.to_json(), PARKING12);
        let seq = SequenceFile::from_json(PARKING12_OPTIMAL).unwrap();
        assert_eq!(seq.to_json(), PARKING12_OPTIMAL);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        p.save(&path).unwrap();
        assert_eq!(Instance::load(&path).unwrap(), p);
        assert_eq!(load_dir(dir.path()).unwrap(), vec![p]);
    }

    #[test]
    fn invalid_trees_are_reported() {
        let crossing = r#"{"name":"x","n":4,"t_initial":[[0,2],[1,3],[0,1]],"t_final":[[0,1],[1,2],[2,3]]}"#;
        let err = Instance::from_json(crossing).unwrap_err().to_string();
        assert!(err.contains("t_initial") && err.contains("0-2") && err.contains("1-3"), "{err}");
        let mismatch = r#"{"name":"x","n":4,"t_initial":[[0,1],[1,2],[2,3]],"t_final":[[0,1],[1,2]]}"#;
        assert!(Instance::from_json(mismatch).is_err());
        let bad = "{\n  \"name\": \"x\",\n  \"n\": oops\n}";
        match Instance::from_json(bad) {
            Err(InstanceError::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn glue_files_match_the_construction() {
        for k in [2, 3] {
            let on_disk = Instance::load(corpus_dir().join(format!("glue{k}.json"))).unwrap();
            assert_eq!(on_disk, glue(k).unwrap());
        }
    }

    #[test]
    fn rejects_reversed_pairs_and_unknown_fields() {
        let reversed = r#"{"name":"x","n":3,"t_initial":[[1,0],[1,2]],"t_final":[[0,1],[1,2]]}"#;
        assert!(matches!(Instance::from_json(reversed), Err(InstanceError::Unordered { a: 1, b: 0, .. })));
        let extra = r#"{"name":"x","n":3,"t_initial":[[0,1],[1,2]],"t_final":[[0,1],[1,2]],"color":1}"#;
        assert!(matches!(Instance::from_json(extra), Err(InstanceError::Parse { .. })));
    }
}
