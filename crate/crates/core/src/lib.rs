//! Symbolic superspace calculus for the classical path integral.
//!
//! The crate is layered bottom-up:
//!
//! * [`expr`]: canonical commuting expressions with exact rational
//!   coefficients, formal functions and formal distributions.
//! * [`grassmann`]: a finite exterior algebra with Berezin integration.
//! * [`superspace`]: superfields over a phase space and the terminating
//!   Taylor expansion of functions of superfields.
//! * [`reduction`]: component Lagrangian, quantization map and large-action
//!   insertion, with a structured verdict report.
//! * [`dimensions`]: dimensional analysis over mass, length and time.
//! * [`lattice`]: numeric propagators and discrete trajectories for Gaussian
//!   systems.
//! * [`model`]: the model-file format consumed by the command-line tool.

pub mod dimensions;
pub mod error;
pub mod expr;
pub mod grassmann;
pub mod lattice;
pub mod model;
pub mod reduction;
pub mod superspace;

pub use error::{Error, Result};
pub use expr::{parse, ScalarExpr, Symbol, SymbolKind, SymbolTable};
