use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("vector is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("state norm exceeds one (squared norm {0})")]
    SuperNormalized(f64),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("requested measurement branch has zero probability ({0:e})")]
    ZeroProbabilityBranch(f64),
    #[error("seed vectors are linearly dependent (residual norm {0:e} at index {1})")]
    LinearlyDependent(f64, usize),
    #[error("too many seed vectors: {seeds} for dimension {dimension}")]
    TooManySeeds { seeds: usize, dimension: usize },
    #[error("invalid channel probabilities: {0}")]
    InvalidChannel(String),
    #[error("Schmidt weight {0} outside [0, 1]")]
    InvalidSchmidtWeight(f64),
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("beta must be {}", if *.expected { "present" } else { "absent" })]
    BetaMismatch { expected: bool },
    #[error("trial count must be at least one")]
    NoTrials,
    #[error("restart count must be at least one")]
    NoRestarts,
    #[error("grid step {0} outside (0, 0.5]")]
    InvalidStep(f64),
    #[error("state is not fully entangled (deviation {0:e})")]
    NotFullyEntangled(f64),
    #[error("strategy document: {0}")]
    StrategyFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
