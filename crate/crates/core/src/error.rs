use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows} rows, row {row} has {cols} columns")]
    NotSquare {
        rows: usize,
        row: usize,
        cols: usize,
    },

    #[error("matrix needs at least 2 grades, found {0}")]
    TooFewGrades(usize),

    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("row {row} sums to {sum}, outside tolerance {tol}")]
    RowSum { row: usize, sum: f64, tol: f64 },

    #[error("default row is not absorbing: entry at column {col} is {value}")]
    DefaultNotAbsorbing { col: usize, value: f64 },

    #[error("vector sums to {sum}, outside tolerance {tol}")]
    VectorSum { sum: f64, tol: f64 },

    #[error("negative weight {value} at grade {grade}")]
    NegativeWeight { grade: usize, value: f64 },

    #[error("origination into the default class: o_n = {0}")]
    OriginationIntoDefault(f64),

    #[error(
        "performing block is not primitive: pattern power {exponent} has a zero at ({row}, {col})"
    )]
    NotPrimitive {
        exponent: usize,
        row: usize,
        col: usize,
    },

    #[error(
        "no convergence after {iterations} iterations: last delta {last_delta:e}, \
         two-step delta {two_step_delta:e}{}",
        if *period_two { " (period-2 oscillation)" } else { "" }
    )]
    MaxIterations {
        iterations: usize,
        last_delta: f64,
        two_step_delta: f64,
        period_two: bool,
    },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("eigenvector component {index} is {value}, expected strictly positive")]
    NonPositiveComponent { index: usize, value: f64 },

    #[error("rank-deficient design")]
    RankDeficient,

    #[error("insufficient observations: need {needed}, have {have}")]
    InsufficientObservations { needed: usize, have: usize },

    #[error("credit index value {value} at observation {index} is on the boundary of (0, 1)")]
    BoundaryValue { index: usize, value: f64 },

    #[error("economy state undefined without systematic risk (rho = 0)")]
    NoSystematicRisk,

    #[error("path too short: {0} points")]
    PathTooShort(usize),

    #[error("csv: {0}")]
    Csv(String),

    #[error("non-numeric cell {value:?} at line {line}, column {col}")]
    NonNumeric {
        line: usize,
        col: usize,
        value: String,
    },

    #[error("ragged rows: line {line} has {found} cells, expected {expected}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
