use thiserror::Error;

/// Errors raised while loading data or evaluating bounds.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("row {row}: coordinate {column} = {value} lies outside [0, 1]")]
    Domain { row: usize, column: usize, value: f64 },

    #[error("rows {first} and {second} share a design point but have values {first_value} and {second_value}")]
    Duplicate {
        first: usize,
        second: usize,
        first_value: f64,
        second_value: f64,
    },

    #[error("dataset has no observations")]
    Empty,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported synthetic kind `{0}`")]
    UnsupportedKind(String),

    #[error("{operation} requires the supremum metric")]
    UnsupportedMetric { operation: &'static str },

    #[error("kappa = {kappa} is below the empirical Lipschitz constant {khat}; no admissible function exists")]
    EmptyClass { kappa: f64, khat: f64 },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("exhaustive corner search needs 2^{dim} corners but the budget is {budget}")]
    BudgetExceeded { dim: usize, budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by data that is valid but too degenerate for the
    /// requested bound (for example a zero empirical Lipschitz constant).
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::Degenerate(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
