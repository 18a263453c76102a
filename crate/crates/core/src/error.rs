//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:.3e} (tolerance {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not unitary: max |M†M - 1| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not a projector: deviation {deviation:.3e}")]
    NotProjector { deviation: f64 },

    #[error("matrix is not a density operator: {reason}")]
    NotDensity { reason: String },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid dimension {dim}: must lie in [{min}, {max}]")]
    InvalidDim { dim: usize, min: usize, max: usize },

    #[error("operator is not traceless: |Tr| = {trace:.3e}")]
    NotTraceless { trace: f64 },

    #[error(
        "outcome {index} has vanishing probability {prob:.3e} with derivative {derivative:.3e}: \
         information diverges"
    )]
    SingularOutcome {
        index: usize,
        prob: f64,
        derivative: f64,
    },

    #[error("not a probability distribution: {reason}")]
    NotAProbability { reason: String },

    #[error("generator is totally degenerate: spectral range {range:.3e}")]
    DegenerateGenerator { range: f64 },

    #[error("Fisher information must be positive, got {value}")]
    NonpositiveInformation { value: f64 },

    #[error("postselection probability vanishes: p_ps = {p_ps:.3e}")]
    VanishingPostselection { p_ps: f64 },

    #[error("overlap <f|a> vanishes at (f = {f}, a = {a}): expansion is singular")]
    SingularOverlap { f: usize, a: usize },

    #[error("postselection state is orthogonal to the input: |<f|psi>| = {overlap:.3e}")]
    OrthogonalPostselection { overlap: f64 },

    #[error("state is not pure: largest eigenvalue {largest}")]
    NotPure { largest: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("closed form diverges: denominator {denominator:.3e}")]
    DivergentInformation { denominator: f64 },

    #[error("limit sequence failed to converge: {0}")]
    LimitMismatch(String),

    #[error("probability {value} lies outside (0, 1]")]
    InvalidProbability { value: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("numerical sanity check failed: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
