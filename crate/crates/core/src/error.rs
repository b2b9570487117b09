use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension n = {0} is not supported (need n >= 3)")]
    InvalidDimension(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arclength {r} outside the covered range [-{max}, {max}]")]
    OutOfRange { r: f64, max: f64 },

    #[error("requested arclength {requested} overflows the profile; largest safe value is {max_safe}")]
    Overflow { requested: f64, max_safe: f64 },

    #[error("{what} did not converge (last estimate {estimate}, error estimate {error})")]
    NotConverged {
        what: String,
        estimate: f64,
        error: f64,
    },

    #[error("singular input: {0}")]
    Singular(String),

    #[error("finite-difference stencil does not fit at r = {r}")]
    Boundary { r: f64 },

    #[error("l_max = {l_max} is too small; the mode potential is only certified negative from l = {needed}")]
    InsufficientModes { l_max: usize, needed: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures caused by an iteration or refinement budget running out.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NotConverged { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
