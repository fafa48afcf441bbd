use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("window exhausted: coordinate {needed} required but only {available} are valid")]
    WindowExhausted { needed: usize, available: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("coordinate {coord} has degree {degree}, expected {expected}")]
    NotGraded {
        coord: usize,
        degree: i64,
        expected: i64,
    },

    #[error("incompatible windows: requested {requested}, lhs valid on {lhs}, rhs valid on {rhs}")]
    IncompatibleWindows {
        requested: usize,
        lhs: usize,
        rhs: usize,
    },

    #[error("nonzero residual in {what}: max {max:e}")]
    ResidualNonzero { what: String, max: f64 },

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("measure does not exist: {0}")]
    Nonexistence(String),

    #[error("parameter range violated: {0}")]
    ParameterRange(String),

    #[error("quadrature node collides with the evaluation point {0}")]
    NodeCollision(f64),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
