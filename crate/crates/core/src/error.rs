use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {0} is not even")]
    OddDimension(usize),

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is not unitary (max deviation of U^dagger U from I is {max_deviation:e})")]
    NotUnitary { max_deviation: f64 },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix is not a D matrix (largest entry off the block diagonals is {max_off_diagonal:e})")]
    NotComplexD { max_off_diagonal: f64 },

    #[error("angle {angle} is not a right angle or zero")]
    NotRightAngle { angle: f64 },

    #[error("permutation search over {nb} bits is too large (limit 8)")]
    PermSearchTooLarge { nb: usize },

    #[error("internal tolerance failure: {0}")]
    Tolerance(String),
}
