use alloc::string::String;

/// Errors raised by the bound engines and constructors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Inconsistent shapes or cutoffs between operands.
    #[error("configuration error: {0}")]
    Config(String),
    /// A caller-supplied argument is outside the documented domain.
    #[error("usage error: {0}")]
    Usage(String),
    /// The cutoff is too small for the requested accuracy.
    #[error("insufficient cutoff: need at least {required} (got {got})")]
    InsufficientCutoff { required: usize, got: usize },
    /// The quadrature radius is too small for the state energy.
    #[error("insufficient quadrature radius: need R >= {required:.6} (got {got:.6})")]
    InsufficientRadius { required: f64, got: f64 },
    /// Lower and upper bounds contradict each other beyond tolerance.
    #[error("internal consistency failure: lower {lower} exceeds upper {upper}")]
    Inconsistent { lower: f64, upper: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
