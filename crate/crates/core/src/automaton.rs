//! JSON file format for graph structures.
//!
//! ```json
//! {"dim": 2,
//!  "generators": [{"label": "a", "inverse": "A", "matrix": [[1, 2], [0, 1]]}, ...],
//!  "vertices": 5, "initial": 0,
//!  "edges": [[0, 1, "a"], ...]}
//! ```
//!
//! Composite edge labels (p-step structures) list their letters separated by `,`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{GeneratorSpec, GeneratorSystem};
use crate::combing::{Edge, GraphStructure};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonFile {
    pub dim: usize,
    pub generators: Vec<GeneratorSpec>,
    pub vertices: usize,
    pub initial: usize,
    pub edges: Vec<(usize, usize, String)>,
}

impl AutomatonFile {
    pub fn from_graph(graph: &GraphStructure) -> Self {
        let sys = graph.system();
        AutomatonFile {
            dim: sys.dim(),
            generators: sys.specs(),
            vertices: graph.vertex_count(),
            initial: graph.initial(),
            edges: graph.edges().iter().enumerate().map(|(i, e)| (e.src, e.dst, graph.label_text(i))).collect(),
        }
    }

    pub fn into_graph(self) -> Result<GraphStructure> {
        for g in &self.generators {
            if g.matrix.len() != self.dim || g.matrix.iter().any(|r| r.len() != self.dim) {
                return Err(Error::Validation(format!("generator {:?} is not a {}x{} matrix", g.label, self.dim, self.dim)));
            }
        }
        let sys = Arc::new(GeneratorSystem::new(self.generators)?);
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, (src, dst, label)) in self.edges.into_iter().enumerate() {
            let word = label
                .split(',')
                .map(|l| sys.index_of(l))
                .collect::<Result<Vec<usize>>>()
                .map_err(|_| Error::Validation(format!("edge {i} ({src} -> {dst}) has unknown label {label:?}")))?;
            edges.push(Edge { src, dst, word });
        }
        GraphStructure::new(sys, self.vertices, self.initial, edges)
    }
}

pub fn to_json(graph: &GraphStructure) -> String {
    let mut s = serde_json::to_string_pretty(&AutomatonFile::from_graph(graph)).expect("automaton serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<GraphStructure> {
    let file: AutomatonFile = serde_json::from_str(text)?;
    file.into_graph()
}

pub fn load(path: impl AsRef<Path>) -> Result<GraphStructure> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn save(graph: &GraphStructure, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json(graph))?;
    Ok(())
}
