use thiserror::Error;

/// Errors raised while building groups, tables, and operators.
#[derive(Debug, Error)]
pub enum Error {
    /// The requested group would exceed the configured order cap.
    #[error("group order {order} exceeds the configured maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    /// A dense operation was requested above the dimension guard.
    #[error("dimension {dim} exceeds the dense guard {guard}; {hint}")]
    DimensionGuard {
        dim: usize,
        guard: usize,
        hint: &'static str,
    },

    /// Malformed or inconsistent group description.
    #[error("invalid group spec: {0}")]
    Spec(String),

    /// An argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A floating-point quantity that should be integral (or separated) was not.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// No explicit construction exists for the requested object.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The supplied matrices are not a representation.
    #[error("invalid action: {0}")]
    InvalidAction(String),
}

impl Error {
    /// True for errors caused by configured size limits rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::OrderTooLarge { .. } | Error::DimensionGuard { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
