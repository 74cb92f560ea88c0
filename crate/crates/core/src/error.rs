use thiserror::Error;

use crate::algebra::AlgebraSignature;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signature Cl({p},{q}): need 1 <= p+q <= {max}", max = crate::algebra::MAX_DIM)]
    InvalidSignature { p: usize, q: usize },

    #[error("signature mismatch: {left} vs {right}")]
    SignatureMismatch {
        left: AlgebraSignature,
        right: AlgebraSignature,
    },

    #[error("grade {grade} out of range for dimension {dim}")]
    GradeOutOfRange { grade: usize, dim: usize },

    #[error("blade mask {mask:#x} out of range for {sig}")]
    BladeOutOfRange { mask: usize, sig: AlgebraSignature },

    #[error("coefficient count {got} does not match blade count {expected}")]
    CoefficientCount { got: usize, expected: usize },

    #[error("element is singular (condition number {condition:.3e})")]
    SingularElement { condition: f64 },

    #[error("not a square root of -1 (residual |f^2+1| = {residual:.3e})")]
    NotARoot { residual: f64 },

    #[error("parameters lie off the root manifold (beta^2 = {beta_sq})")]
    OffManifold { beta_sq: f64 },

    #[error("no canonical base root of -1 available in {sig}")]
    NoCanonicalRoot { sig: AlgebraSignature },

    #[error("root sampling failed after {attempts} attempts")]
    SamplingFailed { attempts: usize },

    #[error("grid geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("the FFT path requires a cyclic grid")]
    NonCyclicGrid,

    #[error("plan direction is {found:?}, operation needs {expected:?}")]
    WrongDirection {
        expected: crate::cft::Direction,
        found: crate::cft::Direction,
    },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("payload checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
