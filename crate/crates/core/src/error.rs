use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: only 2 and 3 are implemented")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("unsupported derivative order {0}: total order must be at most 2")]
    UnsupportedDerivativeOrder(usize),
    #[error("Jacobi parameters must exceed -1 (got a = {a}, b = {b})")]
    InvalidJacobiParameters { a: f64, b: f64 },
    #[error("degenerate bounding box along axis {axis}: [{lo}, {hi}]")]
    DegenerateBox { axis: usize, lo: f64, hi: f64 },
    #[error("moment vector does not match the startup bundle: {0}")]
    BasisMismatch(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("weights sum to zero, stability ratio undefined")]
    ZeroWeightSum,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
