use thiserror::Error;

use super::pdi::PdiReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HilbertError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("empty vector or matrix")]
    Empty,
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("non-finite entry")]
    NonFinite,
    #[error("operator is not Hermitian (max defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("operator is not a projector (max defect {defect:e})")]
    NotProjector { defect: f64 },
    #[error("invalid projective decomposition of the identity: {0}")]
    InvalidPdi(PdiReport),
    #[error("label count {labels} does not match projector count {projectors}")]
    LabelCount { labels: usize, projectors: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("projectors {left:?} and {right:?} do not commute (defect {defect:e}); no common refinement exists")]
    NonCommuting {
        left: String,
        right: String,
        defect: f64,
    },
    #[error("grid index {index} out of range for grid of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("duplicate grid index {0}")]
    DuplicateIndex(usize),
    #[error("unknown builtin operator {0:?}")]
    UnknownName(String),
    #[error("direction is not a unit vector (norm {norm})")]
    NonUnitDirection { norm: f64 },
    #[error("dimension {dim} does not factor as {left} x {right}")]
    BadSplit {
        dim: usize,
        left: usize,
        right: usize,
    },
}
