//! Support code for the `lexsched` binary: file handling, performance
//! profiles and recovery scatter data.

pub mod files;
pub mod profile;
pub mod scatter;

use lexsched::{CompletionVector, Q};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 4,
            CliError::Parse { .. } | CliError::Invalid(_) => 3,
        }
    }
}

pub fn invalid(msg: impl std::fmt::Display) -> CliError {
    CliError::Invalid(msg.to_string())
}

/// `sum 2^(m-i) c_i` as an exact rational, `None` on overflow.
pub fn weight_q(v: &CompletionVector) -> Option<Q> {
    let mut acc: i128 = 0;
    for &c in v.as_slice() {
        acc = acc.checked_mul(2)?.checked_add(i128::from(c))?;
    }
    Some(Q::from_integer(acc))
}

/// `a / b`, or 1 when both are zero.
pub fn normalized(a: Q, b: Q) -> Q {
    if b == Q::from_integer(0) {
        Q::from_integer(1)
    } else {
        a / b
    }
}
