use treeflip::instances::{corpus, glue, parking12};
use treeflip::plane_trees::validate_tree;
use treeflip::sequences::happy_edges;

#[test]
fn bundled_instances_validate() {
    for inst in corpus() {
        for t in [inst.t_initial, inst.t_final] {
            assert_eq!(validate_tree(&t.to_vec(), inst.n).unwrap(), t, "{}", inst.name);
        }
    }
}

#[test]
fn parking12_first_flip_cannot_be_perfect() {
    let p = parking12();
    assert!(p.t_initial.legal_flips().iter().all(|f| !p.t_final.contains(f.inserted)));
}

#[test]
fn glued_happy_hull_edges_are_never_crossed() {
    for k in 1..=3 {
        let g = glue(k).unwrap();
        let points = g.t_initial.points();
        for h in happy_edges(&g.t_initial, &g.t_final).unwrap().iter().filter(|&h| points.is_hull_edge(h)) {
            assert!(g.t_initial.chords().chain(g.t_final.chords()).all(|c| !c.crosses(h)));
        }
    }
}
