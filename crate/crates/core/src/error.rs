use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("nome out of range: |q| = {0}")]
    NomeOutOfRange(f64),

    #[error("series precision unreachable: needs {needed} terms, cap is {cap}")]
    PrecisionUnreachable { needed: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("coincident points modulo the period lattice")]
    CoincidentPoints,

    #[error("singular separation: kernel evaluated on its pole")]
    SingularSeparation,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("flux mismatch: W2 = {found}, flux quantization requires {expected}")]
    FluxMismatch { expected: f64, found: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error bound {error}")]
    QuadratureNonConvergence { estimate: f64, error: f64 },

    #[error("a seed is required for stochastic estimates")]
    SeedRequired,

    #[error("insufficient samples: {got} < {min}")]
    InsufficientSamples { got: usize, min: usize },

    #[error("Fourier coefficient evaluated at its jump point y = 0")]
    JumpPoint,

    #[error("grid too coarse: M = {got} < {min}")]
    GridTooCoarse { got: usize, min: usize },

    #[error("mode truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("ill-conditioned fit: {0}")]
    FitIllConditioned(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
