use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::CategorySet;

/// Failure classes reported by the verifier. The string forms are what
/// reports and JSON output carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorClass {
    TypeError,
    StateInconsistentError,
    RuntimeError,
    InvalidArgument,
    BudgetExceeded,
    ParseError,
}

impl ErrorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::TypeError => "TypeError",
            ErrorClass::StateInconsistentError => "StateInconsistentError",
            ErrorClass::RuntimeError => "RuntimeError",
            ErrorClass::InvalidArgument => "InvalidArgument",
            ErrorClass::BudgetExceeded => "BudgetExceeded",
            ErrorClass::ParseError => "ParseError",
        }
    }
}

impl std::fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Constraint violations raised while simulating an API call.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("`{entity}` is required to be {required} but is known to be {existing}")]
    Type {
        entity: String,
        existing: CategorySet,
        required: CategorySet,
    },
    #[error("{0}")]
    StateInconsistent(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("API call budget of {0} calls exceeded")]
    BudgetExceeded(u64),
}

impl DomainError {
    pub fn class(&self) -> ErrorClass {
        match self {
            DomainError::Type { .. } => ErrorClass::TypeError,
            DomainError::StateInconsistent(_) => ErrorClass::StateInconsistentError,
            DomainError::InvalidArgument(_) => ErrorClass::InvalidArgument,
            DomainError::BudgetExceeded(_) => ErrorClass::BudgetExceeded,
        }
    }
}
