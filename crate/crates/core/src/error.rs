//! Error type shared by all modules.

use std::fmt;

/// Errors from model construction, domain checks, and experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A primitive parameter violates its domain.
    InvalidParameter { name: &'static str, reason: String },
    /// An operation was called outside its domain.
    Domain { op: &'static str, reason: String },
    /// A record or history has the wrong observability mode.
    ModeMismatch { op: &'static str, reason: String },
    /// A maintained experiment hypothesis failed at runtime.
    ScenarioInvalid {
        rep: usize,
        period: usize,
        reason: String,
    },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Self::Domain { op, reason } => write!(f, "domain error in {op}: {reason}"),
            Self::ModeMismatch { op, reason } => {
                write!(f, "observability mode mismatch in {op}: {reason}")
            }
            Self::ScenarioInvalid {
                rep,
                period,
                reason,
            } => write!(
                f,
                "scenario invalid at replication {rep}, period {period}: {reason}"
            ),
        }
    }
}

impl std::error::Error for ModelError {}

pub type Result<T> = std::result::Result<T, ModelError>;
