use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("impossible outcome: branch probability {0:e}")]
    ImpossibleOutcome(f64),

    #[error("Pauli operator with phase ±i is not an observable")]
    NonHermitianPauli,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid measurement pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state orthogonal to test subspace")]
    OrthogonalToTestSubspace,

    #[error("branch budget exceeded: {needed} measured qubits, budget {budget}")]
    BranchBudgetExceeded { needed: usize, budget: usize },

    #[error("dense budget exceeded: {needed} qubits, limit {limit}")]
    DenseBudgetExceeded { needed: usize, limit: usize },

    #[error("verifier capability violation: {0}")]
    CapabilityViolation(String),

    #[error("ownership violation: {0}")]
    OwnershipViolation(String),

    #[error("malformed prover state: {0}")]
    MalformedProverState(String),

    #[error("unknown strategy `{name}` (available: {available})")]
    UnknownStrategy { name: String, available: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
