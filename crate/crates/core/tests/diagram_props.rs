use hkinv::diagram::{catalog, parse, parse_json, to_json, Builder, Cross, DiagramCode, ValidationError};
use proptest::prelude::*;

/// Applies whatever ops of the word fit the current row, then closes the
/// row off with merges and cups.
fn build(word: &[(u8, usize, bool)]) -> DiagramCode {
    let mut b = Builder::new("random");
    let (mut crossings, mut vertices) = (0, 0);
    for &(op, at, pos) in word {
        let w = b.width();
        let kind = if pos { Cross::Pos } else { Cross::Neg };
        match op % 5 {
            0 if w <= 4 => {
                b.cap(at % (w + 1));
            }
            1 if w >= 2 => {
                b.cup(at % (w - 1));
            }
            2 if w >= 2 && crossings < 6 => {
                b.cross(at % (w - 1), kind);
                crossings += 1;
            }
            3 if w >= 2 && vertices < 4 => {
                b.merge(at % (w - 1));
                vertices += 1;
            }
            4 if (1..=4).contains(&w) && vertices < 4 => {
                b.split(at % w);
                vertices += 1;
            }
            _ => {}
        }
    }
    while b.width() > 0 {
        if b.width() == 1 {
            b.cap(1).merge(0);
        } else if b.width() % 2 == 1 {
            b.merge(0);
        } else {
            b.cup(0);
        }
    }
    b.finish().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn text_round_trip(word in prop::collection::vec((0u8..5, 0usize..8, any::<bool>()), 0..24)) {
        let d = build(&word);
        let text = d.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        let json = parse_json(&to_json(&d)).unwrap();
        prop_assert_eq!(json.to_string(), text);
    }

    #[test]
    fn mirror_involution(word in prop::collection::vec((0u8..5, 0usize..8, any::<bool>()), 0..24)) {
        let d = build(&word);
        prop_assert_eq!(d.mirror().mirror(), d.clone());
        prop_assert_eq!(d.mirror().genus_and_components(), d.genus_and_components());
    }

    #[test]
    fn face_count_is_spherical(word in prop::collection::vec((0u8..5, 0usize..8, any::<bool>()), 0..24)) {
        let d = build(&word);
        let v = d.nodes.len() as i64;
        let e = d.segments().len() as i64;
        let f = d.faces().len() as i64;
        prop_assert_eq!(v - e + f, 2 * d.diagram_component_count() as i64);
    }
}

/// Reverses the cyclic port order at the vertices in `mask`.
fn flip_vertices(d: &DiagramCode, mask: u32) -> Result<DiagramCode, ValidationError> {
    let mut raw = d.to_raw();
    for e in &mut raw.edges {
        for end in &mut e.ends {
            if mask >> end.node & 1 == 1 {
                end.slot = [0, 2, 1][end.slot];
            }
        }
    }
    raw.validate()
}

#[test]
fn tetrahedron_has_two_spherical_rotation_systems() {
    let d = catalog::tetrahedron();
    assert_eq!(d.nodes.len(), 4);
    let ok: Vec<u32> = (0..16).filter(|&m| flip_vertices(&d, m).is_ok()).collect();
    assert_eq!(ok, vec![0, 15]);
    for m in (0..16).filter(|m| !ok.contains(m)) {
        assert!(matches!(flip_vertices(&d, m), Err(ValidationError::NotSpherical { .. })));
    }
}

#[test]
fn corrupted_crossing_ports_are_rejected() {
    // Swapping two adjacent ports of a crossing on the 4_1 diagram either
    // breaks planarity or the straight-through rule.
    let d = catalog::four_one();
    for node in (0..d.nodes.len()).filter(|&n| d.nodes[n].ports.len() == 4) {
        for a in 0..4 {
            let b = (a + 1) % 4;
            let mut raw = d.to_raw();
            for e in &mut raw.edges {
                for end in e.ends.iter_mut().filter(|p| p.node == node) {
                    if end.slot == a {
                        end.slot = b;
                    } else if end.slot == b {
                        end.slot = a;
                    }
                }
            }
            assert!(raw.validate().is_err(), "node {node} swap {a}{b}");
        }
    }
}

#[test]
fn four_one_text_parses() {
    let text = catalog::four_one().to_string();
    let d = parse(&text).unwrap();
    assert_eq!(d.nodes.len(), 6);
    assert_eq!((d.vertex_count(), d.crossing_count()), (2, 4));
    assert_eq!(d.strands().len(), 3);
}
