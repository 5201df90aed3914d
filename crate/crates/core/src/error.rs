use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model parameters must be positive and finite (g = {g}, b = {b})")]
    InvalidParams { g: f64, b: f64 },

    #[error("truncation tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),

    #[error("exponential rates must be positive and finite, got {0}")]
    InvalidRate(f64),

    #[error("dilation factor must be positive and finite, got {0}")]
    InvalidFactor(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid function is not defined on the solver grid")]
    GridMismatch,

    #[error("invalid snapshot times: {0}")]
    InvalidSnapshotTimes(String),

    #[error("series for index {expected} expected, leading rate does not match")]
    IndexMismatch { expected: usize },

    #[error(
        "moment of order {m} of f_{m} is {value:e}, too small to normalize the dual eigenfunction"
    )]
    VanishingMoment { m: usize, value: f64 },

    #[error("abscissa {a} must lie in (-b, b) = ({}, {})", -b, b)]
    AbscissaOutOfRange { a: f64, b: f64 },

    #[error("eigenbasis holds indices up to {available}, index {requested} requested")]
    BasisTooSmall { requested: usize, available: usize },

    #[error("decay-rate fit impossible: {0}")]
    FitImpossible(String),
}
