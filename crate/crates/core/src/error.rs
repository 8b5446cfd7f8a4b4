use thiserror::Error;

use crate::integrators::{Method, TraceEntry};

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("convex body must have at least one point")]
    EmptyBody,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("negative scale factor {0} (only nonnegative scalars are allowed)")]
    NegativeScale(f64),

    #[error("support vectors live on different direction grids")]
    GridMismatch,

    #[error("support vector is inconsistent (re-embedding moves a component by {excess:e})")]
    InconsistentSupport { excess: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("gauge has no recorded lower bound on its radius")]
    UnboundedGaugeRefused,

    #[error("dyadic depth {0} exceeds the limit of 30")]
    DepthLimit(u32),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("{method:?} integral did not converge within the depth budget")]
    NoConvergence {
        method: Method,
        trace: Vec<TraceEntry>,
    },

    #[error("multifunction has no declared bound")]
    UnboundedMultifunction,

    #[error("no oracle available for `{0}`")]
    OracleUnavailable(String),

    #[error("metadata check failed for `{name}`: {detail}")]
    MetadataViolation { name: String, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
