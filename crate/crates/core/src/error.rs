use std::path::PathBuf;

/// Errors raised by carrier construction, validation, search and scanning.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("order {0} is too small (must be at least 2)")]
    OrderTooSmall(u64),
    #[error("{0} is not a prime power, no field of that order exists")]
    NotPrimePower(u64),
    #[error(
        "modulus polynomial {poly:?} is not a monic irreducible of degree {degree} over F_{p}"
    )]
    BadModulus { p: u64, degree: u32, poly: Vec<u64> },
    #[error("element {element} is not in the carrier of order {order}")]
    NotInCarrier { element: String, order: u64 },
    #[error("cell {0} is not an element of the carrier")]
    ForeignCell(String),
    #[error("{0} is not a unit")]
    NotAUnit(u64),
    #[error("expected {expected} cells, got {got}")]
    CellCount { expected: usize, got: usize },
    #[error("carrier of order {order} exceeds the oracle cap {cap}")]
    OracleCapExceeded { order: u64, cap: u64 },
    #[error("the zero Gaussian integer has no factorization")]
    FactorZero,
    #[error("norm {0} is too large to factor")]
    NormTooLarge(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
