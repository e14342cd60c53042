//! Geodesic combings of matrix groups, their Perron-Frobenius data, the
//! associated Markov measure on paths, and equidistribution of orbits on the
//! torus.

pub mod algebra;
pub mod automaton;
pub mod combing;
pub mod equidist;
pub mod error;
pub mod markov;
pub mod presets;
pub mod spectral;

pub use algebra::{torus_act, word_act, GeneratorSpec, GeneratorSystem, GroupMatrix, ModMatrix, TorusPoint};
pub use combing::{ComponentDecomposition, Edge, GraphStructure};
pub use error::{Error, Result};
pub use spectral::{perron_data, Classification, SpectralData, TransitionMatrix};
