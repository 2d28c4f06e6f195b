//! Real log canonical thresholds of polynomial ideals.
//!
//! The toolkit computes the pair `(lambda, theta)` — the smallest pole of the
//! zeta function attached to an ideal and its multiplicity — from the Newton
//! polyhedron of the ideal, certifies exactness through sos-nondegeneracy,
//! expands Laplace integrals asymptotically, and applies the machinery to
//! model selection for discrete statistical models.
//!
//! Symbolic layers ([`algebra`], [`polyhedra`], [`rlct`], [`nondegen`]) work in
//! exact rational arithmetic throughout; floating point is confined to the
//! numeric validation layers ([`asympt`], [`numeric`], [`models`]).

pub mod algebra;
pub mod asympt;
pub mod cli;
pub mod models;
pub mod nondegen;
pub mod numeric;
pub mod polyhedra;
pub mod rlct;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("negative exponent")]
    NegativeExponent,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty Newton polyhedron (zero ideal)")]
    ZeroIdeal,

    #[error("ideal must have at least one nonzero generator")]
    EmptyIdeal,

    #[error("unsupported boundary configuration: {0}")]
    UnsupportedBoundary(String),

    #[error("unsupported region: {0}")]
    UnsupportedRegion(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("computation budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
