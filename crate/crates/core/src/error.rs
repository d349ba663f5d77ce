use thiserror::Error;

use crate::algebra::Role;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("arity-0 cochains are not supported")]
    ZeroArity,

    #[error("operator role mismatch: expected {expected}, found {found}")]
    RoleMismatch { expected: String, found: String },

    #[error("pairing is not symmetric at ({0}, {1})")]
    NonSymmetricPairing(usize, usize),

    #[error("bimodule axiom `{axiom}` fails on basis triple {triple:?}")]
    NotABimodule { axiom: &'static str, triple: [usize; 3] },

    #[error("block index {0} is not 1 or 2")]
    BadBlock(u8),

    #[error("structure is {found}, expected {expected}")]
    WrongClass { expected: String, found: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("parameter `{name}` out of range: {message}")]
    ParamOutOfRange { name: String, message: String },

    #[error("degree filter needs basis degrees for the {0} space")]
    MissingDegrees(&'static str),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn role(expected: (Role, Role), found: (Role, Role)) -> Self {
        Error::RoleMismatch {
            expected: format!("{}->{}", expected.0, expected.1),
            found: format!("{}->{}", found.0, found.1),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
