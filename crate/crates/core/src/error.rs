use thiserror::Error;

/// Errors raised by the toolkit.
///
/// `Inapplicable` and `FamilyAssumption` are distinct from a bound failing:
/// a failed inequality is a [`BoundReport`](crate::bounds::BoundReport) with
/// `holds == false`, never an error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("bound `{id}` does not apply: {reason}")]
    Inapplicable { id: String, reason: String },

    #[error("family assumption `{family}` fails on this instance")]
    FamilyAssumption { family: String },

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("unknown bound id `{0}`")]
    UnknownBound(String),

    #[error("bad descriptor `{0}`: {1}")]
    Descriptor(String, String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedInput(msg.into())
    }

    pub(crate) fn inapplicable(id: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Inapplicable {
            id: id.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
