use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("two-qubit gate needs distinct targets, got {0} twice")]
    RepeatedTarget(usize),

    #[error("observable {0} is not Hermitian (imaginary phase)")]
    InvalidObservable(String),

    #[error("graph is not bipartite: {0}")]
    NonBipartite(String),

    #[error("graph validation failed: {0}")]
    GraphValidation(String),

    #[error("vertex {vertex} is not part of the {subgraph} subgraph")]
    NotInSubgraph { vertex: usize, subgraph: &'static str },

    #[error("enumeration of {requested} patterns exceeds the cap of {cap}")]
    EnumerationTooLarge { requested: u128, cap: u128 },

    #[error("{n} qubits exceed the dense simulation cap of {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("analytic domain error: {0}")]
    AnalyticDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("circuit compile error: {0}")]
    Compile(String),

    #[error("measurement angle {0} needs a non-Clifford action on a stabilizer state")]
    NonClifford(f64),

    #[error("post-selected outcome has zero probability")]
    ImpossibleOutcome,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
