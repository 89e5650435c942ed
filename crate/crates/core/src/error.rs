use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature failed to reach tolerance: estimate {estimate:e}, error {abs_error:e}")]
    QuadratureFailure { estimate: f64, abs_error: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("Lévy measure does not have finite variation near the origin")]
    NotFiniteVariation,

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("configuration error: {0}")]
    ConfigError(String),

    #[error("empty input")]
    EmptyInput,

    #[error("branch ambiguity at grid index {index}: phase step {step:.6} is not below pi")]
    BranchAmbiguity { index: usize, step: f64 },

    #[error("characteristic function too close to zero at grid index {index} (|cf| = {modulus:e}, threshold {threshold:e})")]
    NearZeroCf {
        index: usize,
        modulus: f64,
        threshold: f64,
    },

    #[error("base process is the point mass at zero; its time change is not identifiable")]
    DegenerateBaseProcess,

    #[error("no start of the optimizer converged (best objective {best_objective:e})")]
    NonConvergence { best_objective: f64 },

    #[error("need at least {need} curve points, have {have}")]
    InsufficientPoints { have: usize, need: usize },

    #[error("grid spacing {dt} is too coarse (maximum {max})")]
    GridTooCoarse { dt: f64, max: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::DomainError(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedFamily(msg.into())
    }
}
