use thiserror::Error;

use crate::complex::Face;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("construction error: {0}")]
    Construction(String),

    #[error("complex is not pure")]
    Purity,

    #[error("{0:?} is not a face of the complex")]
    Face(Face),

    #[error("invalid parameter: {0}")]
    Param(String),

    /// A search ran past its budget. `partial` carries whatever was
    /// established before giving up.
    #[error("budget exceeded: {reason}")]
    Budget { reason: String, partial: Option<String> },

    #[error("support map error: {0}")]
    Support(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("vertex split precondition failed: {0}")]
    Split(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("coloring error: {0}")]
    Coloring(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("usage error: {0}")]
    Usage(String),
}
