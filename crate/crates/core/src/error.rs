use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n must be at least 1")]
    ZeroN,

    #[error("malformed tridiagonal matrix: {0}")]
    MalformedMatrix(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("state is not normalized (norm² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid coefficient profile: {0}")]
    InvalidProfile(String),

    #[error("outcome k = {k} is a failure outcome (teleportation needs 1 <= k <= {n})")]
    FailureOutcome { k: usize, n: usize },

    #[error("outcome k = {k} has zero probability; teleported state undefined")]
    DegenerateOutcome { k: usize },

    #[error("outcome k = {k} out of range 0..={max}")]
    OutcomeOutOfRange { k: usize, max: usize },

    #[error("|alpha|^2 = {0} outside [0, 1]")]
    WeightOutOfRange(f64),

    #[error("mode {mode} out of range for a {modes}-mode state")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("mode {0} listed more than once")]
    DuplicateMode(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("protocol wiring defect: {0}")]
    Wiring(String),

    #[error("n = {n} exceeds the oracle cap of {cap}")]
    OracleCap { n: usize, cap: usize },
}
