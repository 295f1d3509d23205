use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("state is not permutation symmetric (deviation {0:.3e})")]
    Symmetry(f64),

    #[error("wrong tensor kind: {0}")]
    Kind(String),

    #[error("invalid density matrix: {0}")]
    State(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
