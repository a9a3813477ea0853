use thiserror::Error;

use crate::partition::ValidationReport;

#[derive(Debug, Error)]
pub enum MubError {
    #[error("invalid Pauli label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: String },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("qubit count {n} outside supported range 1..={max}")]
    QubitCount { n: usize, max: usize },

    #[error("operation requires real phase (+1 or -1), got {0}")]
    ComplexPhase(String),

    #[error("polynomial {0:?} is not irreducible of the requested degree")]
    ReduciblePolynomial(String),

    #[error("malformed polynomial {0:?}: {1}")]
    MalformedPolynomial(String, String),

    #[error("no self-dual basis found for GF(2^{0})")]
    NoSelfDualBasis(usize),

    #[error("generators are not valid: {0}")]
    InvalidGenerators(String),

    #[error("partition is invalid: {0}")]
    InvalidPartition(ValidationReport),

    #[error("partition enumeration supports at most {max} qubits, got {n}")]
    EnumerationTooLarge { n: usize, max: usize },

    #[error("invalid basis label spec {spec:?}: {reason}")]
    InvalidBasisSpec { spec: String, reason: String },

    #[error("basis is not orthonormal (Gram deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("basis is not a joint Pauli eigenbasis: {found} stabilizing operators found, expected {expected}")]
    NotPauliEigenbasis { found: usize, expected: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("projector check failed: {0}")]
    ProjectorCheck(String),

    #[error("basis mixes entanglement categories: {0}")]
    MixedCategories(String),

    #[error("invalid qubit subset: {0}")]
    BadSubset(String),

    #[error("bases are not mutually unbiased (deviation {deviation:e} for bases {a} and {b})")]
    NotUnbiased { a: usize, b: usize, deviation: f64 },

    #[error("expected {expected} bases, got {got}")]
    BasisCount { expected: usize, got: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, MubError>;
