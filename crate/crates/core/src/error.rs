use thiserror::Error;

pub type Result<T> = std::result::Result<T, EpfError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpfError {
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("negative turbulent kinetic energy {0}")]
    NegativeEnergy(f64),
    #[error("anisotropy tensor is not traceless (trace {0})")]
    NotTraceless(f64),
    #[error("eigenvalues are not sorted in descending order: {0:?}")]
    UnsortedEigenvalues([f64; 3]),
    #[error("eigenvalue triple is not traceless (sum {0})")]
    NonTracelessTriple(f64),
    #[error("point ({x}, {y}) lies outside the realizable triangle")]
    NonRealizableTarget { x: f64, y: f64 },
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("eigenvector matrix is not orthonormal (error {0:e})")]
    NotOrthonormal(f64),
    #[error("stress tensor is not realizable: {0}")]
    NonRealizable(String),
    #[error("consistent perturbation does not accept a moderation factor")]
    UnexpectedModeration,
    #[error("legacy perturbation requires a moderation factor")]
    MissingModeration,
    #[error("trajectory needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("invalid channel configuration: {0}")]
    InvalidConfig(String),
    #[error("baseline solve did not converge")]
    BaselineNotConverged,
}
