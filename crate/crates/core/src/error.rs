use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SblError {
    /// An argument violated an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A tunable parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// `kl(p, q)` with `q(a) = 0` where `p(a) > 0`.
    #[error("KL divergence undefined: q[{index}] = 0 where p[{index}] > 0")]
    DivergenceUndefined { index: usize },

    /// A policy passed to a log-space computation has a zero entry.
    #[error("policy must be regularized first: entry {index} is zero")]
    MustRegularize { index: usize },

    /// Internal state that should be unreachable.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Numerical routine did not converge.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Society, agent or environment misconfiguration.
    #[error("configuration error: {0}")]
    Configuration(String),
}

pub type Result<T> = std::result::Result<T, SblError>;

pub(crate) fn invalid_param<T>(name: &'static str, reason: impl Into<String>) -> Result<T> {
    Err(SblError::InvalidParameter {
        name,
        reason: reason.into(),
    })
}
