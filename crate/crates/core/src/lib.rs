//! Reference implementation of here-and-there logic with constraint atoms,
//! conditional terms and aggregates.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: domain values, valuations, interpretations and enumeration.
//! * [`syntax`]: ASTs, the `.htc` text format and syntactic rewrites.
//! * [`denote`]: evaluation of conditional-free terms and atoms.
//! * [`semantics`]: conditional terms under the vc and df principles,
//!   satisfaction, classical satisfaction and the reduct.
//! * [`solver`]: stable models by direct enumeration, by the reduct,
//!   by splitting; supportedness.
//! * [`transform`]: translation of sums into linear terms, stratification,
//!   retagging and aggregate-function rewrites.

pub mod denote;
pub mod model;
pub mod semantics;
pub mod solver;
pub mod syntax;
pub mod transform;

use thiserror::Error;

pub use denote::EvalError;
pub use model::{DomainDecl, Interpretation, ModelError, Valuation, Value, Var};
pub use syntax::{EvalMode, ParseError, Program, SumVariant};

/// Errors raised by operations that combine several layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// A syntactic restriction on nesting was violated.
    #[error("nesting error: {0}")]
    Nesting(String),
    /// An operation was called on input outside its documented domain.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no conditional-term occurrence with id {0}")]
    UnknownOccurrence(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
