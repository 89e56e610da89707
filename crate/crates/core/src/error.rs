use thiserror::Error;

/// Errors raised by the time-scale calculus, the bound evaluators and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a time scale needs at least two points, got {0}")]
    TooFewPoints(usize),

    #[error("time scale point {value} at index {index} is not finite")]
    NonFinitePoint { index: usize, value: f64 },

    #[error("time scale points must be strictly increasing (index {index}: {prev} then {next})")]
    NotIncreasing { index: usize, prev: f64, next: f64 },

    #[error("{0} is not a point of the time scale")]
    NotMember(f64),

    #[error("delta derivative is undefined at the maximal point {0}")]
    MaximalPoint(f64),

    #[error("integration limits out of order: {lower} > {upper}")]
    Ordering { lower: f64, upper: f64 },

    #[error("coefficient is not regressive at ({x}, {y}): 1 + mu*a = {factor}")]
    NotRegressive { x: f64, y: f64, factor: f64 },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at grid point ({x}, {y})")]
    NonFiniteValue { x: f64, y: f64 },

    #[error("iteration limit of {iterations} reached, last update {residual:e}")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
