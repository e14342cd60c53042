use geocomb::automaton::{self, AutomatonFile};
use geocomb::combing::verify_geodesic;
use geocomb::presets::{preset, PRESET_NAMES};
use geocomb::spectral::{classify, transition_matrix};
use geocomb::Error;

#[test]
fn shipped_presets_are_valid() {
    for name in PRESET_NAMES {
        let p = preset(name).unwrap();
        let report = verify_geodesic(&p.graph, 8);
        assert!(report.passed(), "{name}: {:?}", report.witness);
        assert!(classify(&transition_matrix(&p.graph)).almost_semisimple, "{name}");
        assert!(!p.provenance.is_empty());
        assert!(p.basepoints.iter().all(|x| x.dim() == p.system.dim()));
    }
    assert!(preset("z_parabolic").unwrap().control);
    assert!(!preset("free2_sanov").unwrap().control);
}

#[test]
fn user_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f2.json");
    let g = preset("free2_sanov").unwrap().graph;
    automaton::save(&g, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let p = preset(&format!("user:{}", path.display())).unwrap();
    assert_eq!(automaton::to_json(&p.graph), text);
}

#[test]
fn user_file_with_dangling_edge() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut file = AutomatonFile::from_graph(&preset("free2_sanov").unwrap().graph);
    file.edges[5].1 = 9;
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let err = preset(&format!("user:{}", path.display())).unwrap_err();
    assert!(matches!(err, Error::Validation(_)));
    assert!(err.to_string().contains("edge 5"), "{err}");
}

#[test]
fn user_file_that_is_not_geodesic() {
    // allowing backtracking makes evaluation non-injective
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("backtrack.json");
    let mut file = AutomatonFile::from_graph(&preset("free2_sanov").unwrap().graph);
    file.edges.push((1, 2, "A".into()));
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let err = preset(&format!("user:{}", path.display())).unwrap_err().to_string();
    assert!(err.contains("geodesic check"), "{err}");
}

#[test]
fn cone_type_structure_saves_and_loads() {
    let sys = preset("free2_symbolic").unwrap().system;
    let g = geocomb::combing::cone_type_combing(sys, 7, 2).unwrap();
    let text = automaton::to_json(&g);
    let back = automaton::from_json(&text).unwrap();
    assert_eq!(automaton::to_json(&back), text);
}
