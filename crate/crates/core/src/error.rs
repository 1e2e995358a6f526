use thiserror::Error;

/// Errors raised by the partition calculus, lattice and entropy kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative time {t} requested for non-invertible map `{map}`")]
    NegativeTimeOnNonInvertible { map: String, t: i64 },

    #[error("sample size {size} is too small (need at least 2 points)")]
    SizeTooSmall { size: usize },

    #[error("trajectory sampling requires a dynamical map")]
    MissingMap,

    #[error("grid size {size} is not a perfect {dimension}-th power")]
    GridSize { size: usize, dimension: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value at point {index}")]
    NonFinite { index: usize },

    #[error("points {first} and {second} coincide within point resolution")]
    DuplicatePoints { first: usize, second: usize },

    #[error("invalid sample space: {0}")]
    InvalidSample(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown map `{0}`")]
    UnknownMap(String),

    #[error("operands live on different sample spaces")]
    SpaceMismatch,

    #[error("image of point {index} lies {distance:e} from the nearest sample point (tolerance {tolerance:e})")]
    ImageEscape {
        index: usize,
        distance: f64,
        tolerance: f64,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition has {cells} cells, more than the algebra cap of {cap}")]
    TooManyCells { cells: usize, cap: usize },

    #[error("epistemic state is empty")]
    EmptyState,

    #[error("invalid epistemic state: {0}")]
    InvalidState(String),

    #[error("elements {a} and {b} have no unique {op}")]
    NotALattice { a: usize, b: usize, op: &'static str },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("bad identification: {0}")]
    BadIdentification(String),

    #[error("lattice has {size} elements, more than the cap of {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("cell {cell} has zero measure")]
    ZeroMeasureCell { cell: usize },

    #[error("empty partition family")]
    EmptyFamily,
}

pub type Result<T> = std::result::Result<T, Error>;
