use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice too small: n = {0}, need n >= 2")]
    LatticeTooSmall(usize),
    #[error("slowness exponent must be nonnegative, got {0}")]
    NegativeTheta(f64),
    #[error("{name} = {value} lies outside the open interval (0, 1)")]
    DensityOutOfRange { name: &'static str, value: f64 },
    #[error("configuration has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bond {bond} out of range for n = {n}")]
    BondOutOfRange { bond: usize, n: usize },
    #[error("lattice n = {n} too large for state enumeration (max {max})")]
    StateSpaceTooLarge { n: usize, max: usize },
    #[error("singular linear system in stationary solve (pivot {pivot} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("relation requires alpha = beta = rho (got alpha = {alpha}, beta = {beta}, rho = {rho})")]
    NotEquilibrium { alpha: f64, beta: f64, rho: f64 },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("rate index corrupted: stored total {stored}, recomputed {exact}")]
    RateIndexCorrupt { stored: f64, exact: f64 },
    #[error("invalid discretisation: {0}")]
    InvalidDiscretisation(String),
    #[error("initial profile value {value} at u = {u} outside [0, 1]")]
    ProfileOutOfRange { u: f64, value: f64 },
    #[error("root bracketing failed on [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },
    #[error("empty record set")]
    EmptyRecords,
    #[error("records do not share parameters and grid")]
    MismatchedRecords,
    #[error("grid time {0} not found in record")]
    MissingGridTime(f64),
    #[error("record carries no event log")]
    MissingEventLog,
    #[error("need at least {needed} replicas, got {got}")]
    TooFewReplicas { needed: usize, got: usize },
    #[error("site {site} is not a boundary site for n = {n}")]
    NotBoundarySite { site: usize, n: usize },
    #[error("malformed trajectory file: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
