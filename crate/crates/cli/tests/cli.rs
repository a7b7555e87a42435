use std::process::{Command, Output};

use treeflip::export::{parse_dot, slice_from_json};
use treeflip::instances::{parking12, parking12_optimal, random_instance, Instance};

fn treeflip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeflip")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn distance_reports_optimum_and_count() {
    let o = treeflip(&["distance", "parking12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("optimum 8, sequences 20"), "{out}");
    assert!(out.contains("lower bound 8"));
    assert!(out.contains("time "));
}

#[test]
fn distance_with_hull_parking_only() {
    let o = treeflip(&["distance", "parking12", "--hull-parking-only", "--max-sequences", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("optimum 9"));
}

#[test]
fn distance_flags_reach_the_search() {
    let o = treeflip(&["distance", "parking12", "--max-nonperfect", "0"]);
    assert_eq!(o.status.code(), Some(3), "no perfect-only sequence exists");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    random_instance(7, 11).save(&path).unwrap();
    let o = treeflip(&["distance", path.to_str().unwrap(), "--forbid-happy-flips", "--compatible-only", "--show", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("  ")).count(), 2);
}

#[test]
fn malformed_instance_exits_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"name\": \"x\", \"n\": 5,").unwrap();
    let o = treeflip(&["distance", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    assert_eq!(treeflip(&["distance", "no-such-instance"]).status.code(), Some(2));
}

#[test]
fn cap_exceeded_exits_with_three() {
    let o = treeflip(&["distance", "parking12", "--node-cap", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cap"));
}

#[test]
fn slice_counts_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s.json");
    let o = treeflip(&["slice", "parking12", json.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "118 nodes, 214 arcs");
    let s = slice_from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!((s.node_count(), s.arc_count()), (118, 214));

    let dot = dir.path().join("s.dot");
    let o = treeflip(&["slice", "parking12", dot.to_str().unwrap(), "--first-flip-hull", "--format", "dot"]);
    assert_eq!(stdout(&o).trim(), "67 nodes, 120 arcs");
    let g = parse_dot(&std::fs::read_to_string(&dot).unwrap()).unwrap();
    assert_eq!((g.nodes.len(), g.edges.len()), (67, 120));
}

#[test]
fn slice_cap_exits_with_three() {
    let o = treeflip(&["slice", "parking12", "--node-cap", "3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_paper_prints_a_table() {
    let o = treeflip(&["verify-paper", "--only", "P1", "--only", "P11"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().contains("expected"));
    assert_eq!(out.lines().filter(|l| l.contains("  pass  ")).count(), 2, "{out}");
    assert_eq!(treeflip(&["verify-paper", "--only", "P99"]).status.code(), Some(2));
}

#[test]
fn tampered_corpus_fails_the_named_claim() {
    let dir = tempfile::tempdir().unwrap();
    // Final tree moved one flip closer: optimum 7 instead of 8.
    let trees = parking12_optimal().replay().unwrap();
    let p = parking12();
    Instance::new("parking12", p.t_initial, trees[7], "tampered")
        .unwrap()
        .save(dir.path().join("parking12.json"))
        .unwrap();
    let o = treeflip(&["verify-paper", "--only", "P1", "--corpus-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o).lines().find(|l| l.starts_with("P1")).unwrap().to_owned();
    assert!(line.contains("FAIL") && line.contains("optimum 7"), "{line}");
}
