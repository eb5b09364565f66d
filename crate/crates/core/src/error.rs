use thiserror::Error;

/// Errors raised by the imaging pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImagingError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("scatterer {index} lies outside the imaging window")]
    OutsideWindow { index: usize },

    #[error("scatterers {first} and {second} map to the same grid cell {cell}")]
    TwoScatterersOneCell {
        first: usize,
        second: usize,
        cell: usize,
    },

    #[error("coincident points: Green's function is singular at zero distance")]
    CoincidentPoints,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("cannot add noise at a prescribed SNR to an all-zero signal")]
    ZeroSignal,

    #[error("wavenumbers are not equally spaced")]
    NotEquispaced,

    #[error("number of frequencies {0} is not odd")]
    SNotOdd(usize),

    #[error("missing intensity record for probe `{probe}` at receiver {receiver}")]
    MissingAuxiliary { probe: String, receiver: usize },

    #[error("reference amplitude vanishes at receiver {0}")]
    ReferenceVanishes(usize),

    #[error("data matrix is identically zero")]
    ZeroMatrix,

    #[error("restricted system is rank deficient (condition number {0:e})")]
    RankDeficient(f64),

    #[error("support is empty")]
    EmptySupport,

    #[error("theorem hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed container: {0}")]
    Format(String),
}

impl From<std::io::Error> for ImagingError {
    fn from(err: std::io::Error) -> Self {
        ImagingError::Io(err.to_string())
    }
}

impl From<csv::Error> for ImagingError {
    fn from(err: csv::Error) -> Self {
        ImagingError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ImagingError>;

pub(crate) fn mismatch(expected: impl ToString, found: impl ToString) -> ImagingError {
    ImagingError::DimensionMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
