//! Crate-wide error type.
//!
//! Every failure mode that callers are expected to branch on gets its own
//! variant; the CLI maps [`Error::RegionViolation`] and
//! [`Error::BudgetExhausted`] to dedicated exit codes.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A gamma factor was requested at a pole of its meromorphic family.
    #[error("gamma factor pole at {what}")]
    Pole { what: String },

    /// Parameters lie outside the convergence region of the requested
    /// identity, or an input is structurally malformed.
    #[error("convergence region violation: {what}")]
    RegionViolation { what: String },

    /// p-adic working precision was exhausted before the quantity could be
    /// resolved, even after the configured escalation.
    #[error("p-adic precision exhausted: {what}")]
    PrecisionExhausted { what: String },

    /// An engine hit its configured stratum / sample / shell budget.
    #[error("engine budget exhausted: {what}")]
    BudgetExhausted { what: String },

    /// Outer-shell increments failed to decay, so no tail bound exists.
    #[error("tail fit failed: {what}")]
    TailNotDecaying { what: String },

    /// Input outside the supported range (degree, wildness, size).
    #[error("unsupported input: {what}")]
    Unsupported { what: String },

    /// Exactly singular input where a regular one is required
    /// (zero discriminant, vanishing resultant, singular matrix).
    #[error("singular input: {what}")]
    Singular { what: String },

    /// Malformed run configuration.
    #[error("invalid configuration: {what}")]
    Config { what: String },
}

impl Error {
    pub fn pole(what: impl Into<String>) -> Self {
        Error::Pole { what: what.into() }
    }
    pub fn region(what: impl Into<String>) -> Self {
        Error::RegionViolation { what: what.into() }
    }
    pub fn precision(what: impl Into<String>) -> Self {
        Error::PrecisionExhausted { what: what.into() }
    }
    pub fn budget(what: impl Into<String>) -> Self {
        Error::BudgetExhausted { what: what.into() }
    }
    pub fn tail(what: impl Into<String>) -> Self {
        Error::TailNotDecaying { what: what.into() }
    }
    pub fn unsupported(what: impl Into<String>) -> Self {
        Error::Unsupported { what: what.into() }
    }
    pub fn singular(what: impl Into<String>) -> Self {
        Error::Singular { what: what.into() }
    }
    pub fn config(what: impl Into<String>) -> Self {
        Error::Config { what: what.into() }
    }
}
