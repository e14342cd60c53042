use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not in SL(d, Z): determinant is {0}")]
    NotUnimodular(String),

    #[error("unknown generator label {0:?}")]
    UnknownLabel(String),

    #[error("invalid generator system: {0}")]
    InvalidGenerators(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent automaton: {0}")]
    InconsistentAutomaton(String),

    #[error("radius exhausted: BFS frontier emptied at radius {0}")]
    RadiusExhausted(usize),

    #[error("restriction to the requested vertex set is empty")]
    EmptyRestriction,

    #[error("not almost semisimple: maximal components {from} and {to} are joined by a directed path")]
    NotAlmostSemisimple { from: usize, to: usize },

    #[error("transition matrix is nilpotent (the graph has no cycle)")]
    Nilpotent,

    #[error("iteration did not converge after {0} steps")]
    NonConvergence(usize),

    #[error("small-growth vertex {0} present; prune small-growth vertices first")]
    SmallGrowthVertex(usize),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path never visits vertex {0}")]
    NoVisit(usize),

    #[error("distribution is not normalized: total mass {0}")]
    NotNormalized(f64),

    #[error("enumeration budget exceeded: {required} paths needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
