use thiserror::Error;

use crate::mask::SubsetMask;
use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element {0} appears more than once")]
    DuplicateElement(usize),

    #[error("element {element} is outside the ground set [1, {n}]")]
    OutOfRange { element: usize, n: usize },

    #[error("{what} of size {size} exceeds the configured limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid transition graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("element {element} is not a member of set {set}")]
    ElementNotInSet { element: usize, set: SubsetMask },

    #[error("root finding did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("set family mixes subsets of different sizes")]
    MixedLevels,

    #[error("subset level k = {k} is degenerate for n = {n}")]
    DegenerateLevel { k: usize, n: usize },

    #[error("flow network infeasible: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("edge ({mask}, drop {element}) has weight {weight} whose reciprocal is not an integer")]
    NonIntegerReciprocal {
        mask: SubsetMask,
        element: usize,
        weight: Rational,
    },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("edge weight {0} appears more than once")]
    DuplicateWeights(Rational),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DuplicateElement(_) => "DuplicateElement",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::TooLarge { .. } => "TooLarge",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::InvalidGraph(_) => "InvalidGraph",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::ElementNotInSet { .. } => "ElementNotInSet",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::MixedLevels => "MixedLevels",
            Error::DegenerateLevel { .. } => "DegenerateLevel",
            Error::Infeasible(_) => "Infeasible",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NonIntegerReciprocal { .. } => "NonIntegerReciprocal",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::DuplicateWeights(_) => "DuplicateWeights",
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "ParseError",
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
