use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown kernel id `{0}`")]
    UnknownKernel(String),
    #[error("unknown coupling family `{0}`")]
    UnknownFamily(String),
    #[error("unknown test function id `{0}`")]
    UnknownFunction(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("point outside domain: {0}")]
    DomainViolation(String),
    #[error("coupling family `{0}` has no twist inverse")]
    NoTwistInverse(&'static str),
    #[error("value outside the range of the partial gradient: {0}")]
    OutOfRange(String),
    #[error("missing capability: {0}")]
    MissingCapability(&'static str),
    #[error("search region is empty")]
    Infeasible,
    #[error("generalized prox is multi-valued at the requested point")]
    MultiValued,
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("eigenvalue condition violated: {0}")]
    EigenCondition(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
