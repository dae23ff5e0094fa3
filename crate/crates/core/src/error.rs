use thiserror::Error;

/// Errors raised by the simulator, the classifiers and their file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),

    #[error("register size mismatch: expected {expected} qubits, got {found}")]
    QubitCountMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("register of {0} qubits exceeds the dense limit of {max}", max = crate::sim::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("distribution does not sum to one (total = {0})")]
    NotADistribution(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("objective returned a non-finite value {value} at iteration {iteration}")]
    NonFiniteObjective { iteration: usize, value: f64 },

    #[error("rejection sampling gave up after {attempts} attempts ({accepted_plus} / {accepted_minus} accepted)")]
    AttemptCapExceeded {
        attempts: u64,
        accepted_plus: usize,
        accepted_minus: usize,
    },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is singular")]
    Singular,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("hyperplane has zero norm")]
    ZeroNorm,

    #[error("checksum mismatch: file says {stored}, content hashes to {computed}")]
    ChecksumMismatch { stored: String, computed: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
