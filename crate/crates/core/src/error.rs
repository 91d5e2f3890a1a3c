use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableIndex { index: usize, nvars: usize },
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("polynomials live in rings with {0} and {1} variables")]
    AmbientMismatch(usize, usize),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("the ideal is the unit ideal (empty variety)")]
    EmptyVariety,
    #[error("invalid presentation: {0}")]
    Presentation(String),
    #[error("localizing at zero: the element lies in the ideal")]
    LocalizeAtZero,
    #[error("not a Poisson ideal: {{{var}, {relation}}} does not reduce to zero")]
    NotPoissonIdeal { var: String, relation: String },
    #[error("not a Poisson endomorphism: {0}")]
    NotPoissonEndomorphism(String),
    #[error("algebra is not regular: {0}")]
    NotRegular(String),
    #[error("graded descent did not lower the top degree ({from} -> {to})")]
    DescentInvariant { from: u32, to: u32 },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
