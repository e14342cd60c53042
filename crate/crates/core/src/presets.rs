//! Built-in groups with verified combings.

use std::sync::Arc;

use crate::algebra::{GeneratorSystem, TorusPoint};
use crate::automaton;
use crate::combing::{self, Edge, GraphStructure};
use crate::error::{Error, Result};
use crate::spectral;

/// Radius at which user-supplied automata are checked against BFS.
pub const USER_CHECK_RADIUS: usize = 6;

pub const PRESET_NAMES: &[&str] = &["free2_sanov", "free2_symbolic", "z_parabolic", "psl2z_sym2"];

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub system: Arc<GeneratorSystem>,
    pub graph: GraphStructure,
    pub provenance: Vec<String>,
    /// Deliberately violates the equidistribution hypotheses.
    pub control: bool,
    pub basepoints: Vec<TorusPoint>,
}

fn default_basepoints(dim: usize) -> Vec<TorusPoint> {
    let irrational = ["sqrt(2)-1", "sqrt(3)-1", "sqrt(5)-2", "sqrt(7)-2"];
    let mut out = Vec::new();
    if dim <= irrational.len() {
        out.push(TorusPoint::parse(&irrational[..dim]).expect("valid coordinates"));
    }
    out.push(TorusPoint::origin(dim));
    out
}

fn system(triples: &[(&str, &str, Vec<Vec<i64>>)]) -> Arc<GeneratorSystem> {
    Arc::new(GeneratorSystem::from_triples(triples).expect("preset generators are valid"))
}

fn free2(m: i64) -> Arc<GeneratorSystem> {
    system(&[
        ("a", "A", vec![vec![1, m], vec![0, 1]]),
        ("A", "a", vec![vec![1, -m], vec![0, 1]]),
        ("b", "B", vec![vec![1, 0], vec![m, 1]]),
        ("B", "b", vec![vec![1, 0], vec![-m, 1]]),
    ])
}

fn free2_sanov() -> Result<Preset> {
    let sys = free2(2);
    let graph = combing::free_group_combing(sys.clone())?;
    Ok(Preset {
        name: "free2_sanov".into(),
        system: sys,
        graph,
        provenance: vec![
            "a = [[1,2],[0,1]], b = [[1,0],[2,1]] generate a free group of rank 2 (ping-pong on |x| < |y| vs |x| > |y|).".into(),
            "Free groups are hyperbolic; the subgroup has finite index in SL(2,Z), hence is Zariski dense.".into(),
            "Combing: reduced words, one vertex per last letter. Every letter vertex is in the single maximal component, so thickness holds.".into(),
        ],
        control: false,
        basepoints: default_basepoints(2),
    })
}

fn free2_symbolic() -> Result<Preset> {
    let sys = free2(3);
    let graph = combing::cone_type_combing(sys.clone(), 8, 2)?;
    Ok(Preset {
        name: "free2_symbolic".into(),
        system: sys,
        graph,
        provenance: vec![
            "a = [[1,3],[0,1]], b = [[1,0],[3,1]] generate a free group of rank 2 (ping-pong).".into(),
            "Infinite-index but Zariski dense in SL(2): its Zariski closure contains two opposite unipotent subgroups.".into(),
            "Combing built from cone types of the shortlex geodesic tree in the ball of radius 8 rather than written by hand.".into(),
        ],
        control: false,
        basepoints: default_basepoints(2),
    })
}

fn z_parabolic() -> Result<Preset> {
    let sys = system(&[("t", "T", vec![vec![1, 1], vec![0, 1]]), ("T", "t", vec![vec![1, -1], vec![0, 1]])]);
    let graph = combing::free_group_combing(sys.clone())?;
    Ok(Preset {
        name: "z_parabolic".into(),
        system: sys,
        graph,
        provenance: vec![
            "Hypothesis-violating control preset: t = [[1,1],[0,1]] generates a unipotent copy of Z.".into(),
            "Hyperbolic, but NOT Zariski dense (contained in the upper unipotent subgroup); orbits of (x, 0) stay on a circle.".into(),
        ],
        control: true,
        basepoints: vec![
            TorusPoint::parse(&["sqrt(2)-1", "0"]).expect("valid coordinates"),
            TorusPoint::parse(&["sqrt(2)-1", "sqrt(3)-1"]).expect("valid coordinates"),
            TorusPoint::origin(2),
        ],
    })
}

fn psl2z_sym2() -> Result<Preset> {
    // symmetric square of S = [[0,-1],[1,0]] and U = [[0,-1],[1,1]] on (x^2, xy, y^2)
    let sys = system(&[
        ("s", "s", vec![vec![0, 0, 1], vec![0, -1, 0], vec![1, 0, 0]]),
        ("t", "T", vec![vec![0, 0, 1], vec![0, -1, -1], vec![1, 2, 1]]),
        ("T", "t", vec![vec![1, 2, 1], vec![-1, -1, 0], vec![1, 0, 0]]),
    ]);
    // vertices: 0 start, 1 after s, 2 after t, 3 after T
    let e = |src, dst, s| Edge { src, dst, word: vec![s] };
    let edges = vec![e(0, 1, 0), e(0, 2, 1), e(0, 3, 2), e(1, 2, 1), e(1, 3, 2), e(2, 1, 0), e(3, 1, 0)];
    let graph = GraphStructure::new(sys.clone(), 4, 0, edges)?;
    Ok(Preset {
        name: "psl2z_sym2".into(),
        system: sys,
        graph,
        provenance: vec![
            "PSL(2,Z) = Z/2 * Z/3 through the symmetric square SL(2) -> SL(3), which is faithful on PSL(2,Z).".into(),
            "Virtually free, hence hyperbolic. Geodesics alternate s with t or T, so the transition matrix has period 2 (p_star = 2).".into(),
            "NOT Zariski dense in SL(3): the image lies in SO of the discriminant form. Shipped as the periodic example.".into(),
        ],
        control: true,
        basepoints: default_basepoints(3),
    })
}

fn user(path: &str) -> Result<Preset> {
    let graph = automaton::load(path)?;
    let report = combing::verify_geodesic(&graph, USER_CHECK_RADIUS);
    if !report.passed() {
        let what = if !report.injective {
            "evaluation is not injective"
        } else if !report.length_preserving {
            "evaluation is not length preserving"
        } else {
            "sphere counts differ from BFS"
        };
        return Err(Error::Validation(format!("{path}: geodesic check at radius {USER_CHECK_RADIUS} failed: {what}")));
    }
    let a = spectral::transition_matrix(&graph);
    if !spectral::classify(&a).almost_semisimple {
        return Err(Error::Validation(format!("{path}: transition matrix is not almost semisimple")));
    }
    let sys = graph.system().clone();
    let dim = sys.dim();
    Ok(Preset {
        name: format!("user:{path}"),
        system: sys,
        graph,
        provenance: vec![format!("Loaded from {path}; geodesic at radius {USER_CHECK_RADIUS} and almost semisimple.")],
        control: false,
        basepoints: default_basepoints(dim),
    })
}

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        "free2_sanov" => free2_sanov(),
        "free2_symbolic" => free2_symbolic(),
        "z_parabolic" => z_parabolic(),
        "psl2z_sym2" => psl2z_sym2(),
        _ => match name.strip_prefix("user:") {
            Some(path) => user(path),
            None => Err(Error::UnknownPreset(name.to_string())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name() {
        assert!(matches!(preset("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn symbolic_matches_hand_written_shape() {
        let p = preset("free2_symbolic").unwrap();
        assert_eq!(p.graph.vertex_count(), 5);
        assert_eq!(p.graph.edges().len(), 16);
    }

    #[test]
    fn psl2z_relations() {
        let p = preset("psl2z_sym2").unwrap();
        let sys = &p.system;
        assert!(sys.evaluate(&[0, 0]).is_identity());
        assert!(sys.evaluate(&[1, 1, 1]).is_identity());
        assert!(sys.evaluate(&[1, 2]).is_identity());
        let d = spectral::perron_data(&spectral::transition_matrix(&p.graph)).unwrap();
        assert_eq!(d.p_star(), 2);
        assert!((d.lambda - 2f64.sqrt()).abs() < 1e-12);
    }
}
