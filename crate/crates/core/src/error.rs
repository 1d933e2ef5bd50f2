use alloc::string::String;

/// Errors raised by the clustering core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A special function was called outside its domain.
    #[error("argument {0} outside the domain of {1}")]
    Domain(f64, &'static str),

    /// A series or continued fraction did not reach its tolerance.
    #[error("{0} did not converge within {1} terms")]
    NoConvergence(&'static str, usize),

    /// A user index is not part of the network.
    #[error("unknown user {user} (network has {num_users} users)")]
    UnknownUser {
        /// Offending (zero-based) index.
        user: usize,
        /// Number of users.
        num_users: usize,
    },

    /// A deviation target is not a block of the structure, or contains the deviator.
    #[error("invalid deviation target: {0}")]
    InvalidTarget(String),

    /// A coalition structure violates the partition invariants.
    #[error("invalid coalition structure: {0}")]
    InvalidStructure(String),

    /// Enumeration or counting was asked for more users than supported.
    #[error("{what} supports at most {cap} users, got {requested}")]
    CapExceeded {
        /// Which operation hit the cap.
        what: &'static str,
        /// Largest supported size.
        cap: usize,
        /// Requested size.
        requested: usize,
    },

    /// Scenario or model parameters are inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Convenience alias.
pub type Result<T> = core::result::Result<T, Error>;
