use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate gene id `{0}`")]
    DuplicateGeneId(String),
    #[error("gene `{0}` has a non-positive length")]
    InvalidLength(String),
    #[error("total count is zero in species {0}")]
    ZeroTotal(u8),
    #[error("conserved set is empty")]
    EmptyConservedSet,
    #[error("conserved gene `{0}` is not in the ortholog table")]
    UnknownConservedGene(String),
    #[error("no testable gene in the conserved set")]
    NoTestableConservedGenes,
    #[error("median baseline needs at least 4 testable conserved genes, found {0}")]
    TooFewConservedGenes(usize),
    #[error("median expression is zero in species {0}")]
    ZeroMedianExpression(u8),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
