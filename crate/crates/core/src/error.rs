use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("factorization solution is numerically singular at r = {r} (condition number {condition:.3e})")]
    SingularFactorization { r: f64, condition: f64 },

    #[error("ambiguous asymptotic branch: relative |det C| = {relative_det:.3e} lies between the zero and nonzero tolerances")]
    AmbiguousBranch { relative_det: f64 },

    #[error("asymptotic factor [U(inf) - ik] is singular in channel {channel}")]
    SingularAsymptoticFactor { channel: usize },

    #[error("width must be strictly positive, got {0}")]
    InvalidWidth(f64),

    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("momentum sits on a pole of the Jost matrix in channel {channel}")]
    PoleOfJost { channel: usize },

    #[error("Jost matrix is singular at E = {energy}")]
    SingularJost { energy: f64 },

    #[error("energy {energy} lies within {window:e} of threshold {threshold} (channel {channel})")]
    NearThreshold {
        energy: f64,
        threshold: f64,
        channel: usize,
        window: f64,
    },

    #[error("expected a 2x2 matrix, got {0}x{0}")]
    NotTwoByTwo(usize),

    #[error("S-matrix is not unitary (defect {defect:.3e})")]
    NonUnitary { defect: f64 },

    #[error("phase scan cannot be made continuous at E = {energy} (smallest step {step:.3})")]
    Discontinuity { energy: f64, step: f64 },

    #[error("root search did not converge after {iterations} iterations (|det| = {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("converged momentum k1 = {re} + {im}i is not in the lower half plane")]
    WrongSheet { re: f64, im: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("integration overflow at r = {r}")]
    Overflow { r: f64 },

    #[error("integration unreliable: step-halving estimate {estimated:.3e} exceeds tolerance {tolerance:.3e}")]
    Unreliable { estimated: f64, tolerance: f64 },

    #[error("unknown Jost source `{0}`")]
    UnknownSource(String),
}
