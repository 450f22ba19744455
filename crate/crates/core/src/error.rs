use thiserror::Error;

/// Errors raised by the change-point toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid change-points: {0}")]
    BadChangePoints(String),

    #[error("adjacent levels {index} and {next} are equal", next = .index + 1)]
    AdjacentLevelsEqual { index: usize },

    #[error("expected {expected} levels, got {got}")]
    LevelCountMismatch { expected: usize, got: usize },

    #[error("level vectors must all have dimension {expected}, found {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid series: {0}")]
    BadSeries(String),

    #[error("L_max = {l_max} must be smaller than the series length {n}")]
    LMaxTooLarge { l_max: usize, n: usize },

    #[error("exhaustive search limited to n <= {limit}, got n = {n}")]
    TooLargeForOracle { n: usize, limit: usize },

    #[error("fold count V = {v} invalid for n = {n} (need 2 <= V <= n/2)")]
    BadFoldCount { n: usize, v: usize },

    #[error("training change-points live on scale {cps_n} but the complement has {complement_len} indices")]
    InconsistentScales { cps_n: usize, complement_len: usize },

    #[error("two-fold cross-validation needs an even number of observations, got {n}")]
    OddLength { n: usize },

    #[error("L = {l} is infeasible for half-series of length {half}")]
    LInfeasible { l: usize, half: usize },

    #[error("tuning-parameter grid is empty")]
    BadGrid,

    #[error("every candidate has an infinite criterion value")]
    AllInfeasible,

    #[error("series of length {n} too short for k_max = {k_max} (need n >= {needed})")]
    SeriesTooShort { n: usize, k_max: usize, needed: usize },

    #[error("signals have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameters: {0}")]
    BadParams(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}
