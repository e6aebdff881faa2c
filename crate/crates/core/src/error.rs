use std::fmt;

use thiserror::Error;

use crate::series::Prec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("operands belong to different fields")]
    MixedFields,

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision exceeded: needed {needed}, available {available}")]
    PrecisionExceeded { needed: Prec, available: Prec },

    #[error("working precision cap of {cap} terms reached")]
    PrecisionCap { cap: i64 },
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl fmt::Display) -> Self {
        Error::Parse {
            pos,
            msg: msg.to_string(),
        }
    }

    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    /// True for failures caused by insufficient precision rather than bad input.
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::PrecisionExceeded { .. } | Error::PrecisionCap { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
