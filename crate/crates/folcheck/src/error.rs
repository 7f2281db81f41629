use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported root system: {0}")]
    UnsupportedRootSystem(String),
    #[error("node {node} out of range for rank {rank}")]
    NodeOutOfRange { node: usize, rank: usize },
    #[error("weight has length {got}, expected {expected}")]
    WeightLength { got: usize, expected: usize },
    #[error("weight {0} is not dominant")]
    NotDominant(String),
    #[error("weight {0} is not dominant for the parabolic")]
    NotParabolicDominant(String),
    #[error("{0} is not a cominuscule pair")]
    NotCominuscule(String),
    #[error("non-integral value: {0}")]
    NonIntegral(String),
    #[error("negative multiplicity at weight {0}")]
    NegativeMultiplicity(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("unsupported partition {0}")]
    UnsupportedPartition(String),
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown case id {0}")]
    UnknownCase(String),
    #[error("registry error: {0}")]
    Registry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
