use thiserror::Error;

/// Errors raised across the planning stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An action was issued in a state where it is not applicable.
    #[error("action {action} is not applicable in state {state}")]
    InapplicableAction { state: String, action: String },

    /// The model cannot provide something the caller needs, e.g. an explicit
    /// transition distribution or an enumerable policy space.
    #[error("capability unavailable: {0}")]
    Capability(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A query fell outside of the solved (state, steps-to-go) region.
    #[error("lookup failed: {0}")]
    Lookup(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
