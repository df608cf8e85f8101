use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuboError {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("model must have at least one variable")]
    Empty,
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("entry {index} is {value}, expected 0 or 1")]
    InvalidBit { index: usize, value: i64 },
    #[error("entry {index} is {value}, expected -1 or +1")]
    InvalidSpin { index: usize, value: i64 },
    #[error("coupling ({row}, {col}) must be zero: Ising couplings are strictly upper triangular")]
    LowerCoupling { row: usize, col: usize },
    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("pair constraint needs two distinct variables, got ({0}, {0})")]
    SameIndex(usize),
    #[error("cardinality {k} outside 0..={n}")]
    CardinalityOutOfRange { k: usize, n: usize },
    #[error("penalty must be strictly positive and finite")]
    InvalidPenalty,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("input is empty")]
    EmptyInput,
    #[error("target column `{0}` not found in header")]
    MissingTarget(String),
    #[error("row {row} has {found} fields, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("target column `{column}` is not binary: {detail}")]
    NonBinaryTarget { column: String, detail: String },
    #[error("dataset has no feature columns")]
    NoFeatures,
    #[error("column `{0}` is still categorical; encode before this step")]
    NotNumeric(String),
    #[error("vectors must have equal length >= 2 (got {left} and {right})")]
    BadLengths { left: usize, right: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("split ratio {0} must lie strictly between 0 and 1")]
    BadRatio(f64),
    #[error("split of {rows} rows at ratio {ratio} leaves an empty partition")]
    DegenerateSplit { rows: usize, ratio: f64 },
    #[error("feature mask selects no features")]
    EmptyMask,
    #[error("training rows contain a single class")]
    SingleClass,
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("exhaustive search refused: {n} variables exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
}
