use thiserror::Error;

/// Errors raised by the simulator and its verification routes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitudes violate normalization: |alpha|^2 + |beta|^2 = {0}")]
    NormViolation(f64),

    #[error("pattern length {found} does not match qubit count {expected}")]
    PatternLengthMismatch { expected: usize, found: usize },

    #[error("invalid pattern symbol {0:?}; only '0' and '1' are allowed")]
    InvalidPatternSymbol(char),

    #[error("at least {min} qubits required, got {found}")]
    TooFewQubits { min: usize, found: usize },

    #[error("qubit index {index} out of range 1..={n_qubits}")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("matrix is not X-structured: stray coherence {magnitude:e} at ({row}, {col})")]
    NotXStructured { row: usize, col: usize, magnitude: f64 },

    #[error("negative input {name} = {value}")]
    NegativeInput { name: &'static str, value: f64 },

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("dimension {0} too small; at least 2 required")]
    DimensionTooSmall(usize),

    #[error("spectral route limited to {cap} qubits, got {n_qubits}")]
    QubitCapExceeded { n_qubits: usize, cap: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("degenerate state: |alpha*beta| = {0:e} too small for the decomposition test")]
    DegenerateState(f64),

    #[error("unsupported scenario for a factorized prediction: {0}")]
    UnsupportedScenario(String),

    #[error("matrix dimension {found} is not 2^{n_qubits}")]
    DimensionMismatch { n_qubits: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
