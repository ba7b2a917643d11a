use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} out of range 1..=5")]
    Dimension(usize),
    #[error("samples per axis {0} must be a power of two >= 4")]
    NotPowerOfTwo(usize),
    #[error("grid with {0} modes exceeds the 2^22 cap")]
    GridTooLarge(usize),
    #[error("invalid period {0}")]
    Period(f64),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("time grid mismatch")]
    TimeGridMismatch,
    #[error("non-finite symbol value at frequency {0:?}")]
    NonFiniteSymbol(Vec<f64>),
    #[error("{0} is not a dyadic scale")]
    NotDyadic(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("spectral support does not fit the lattice: {0}")]
    SupportOverflow(String),
    #[error("zero input")]
    ZeroInput,
    #[error("need at least 3 positive samples for a power-law fit")]
    FitSamples,
    #[error("({q}, {p}) is not Schrödinger-admissible in d = {d}")]
    Inadmissible { q: f64, p: f64, d: usize },
    #[error("dense propagator needs n^d <= 4096, got {0}")]
    DenseTooLarge(usize),
    #[error("fixed point did not converge after {iterations} iterations (last update {last_update:e})")]
    NoConvergence { iterations: usize, last_update: f64 },
    #[error("empty region: {0}")]
    EmptyRegion(String),
    #[error("index out of range: {0}")]
    IndexRange(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
