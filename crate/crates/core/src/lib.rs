//! Faceted execution for a small Scheme-like language with first-class
//! security labels.
//!
//! The [`reader`] turns source text into core syntax, [`eval`] runs it
//! under faceted semantics, and [`oracle`] checks a faceted run against
//! independent standard runs of each labelled view.

pub mod eval;
pub mod facet;
#[cfg(any(test, feature = "proptest-gen"))]
pub mod gen;
pub mod oracle;
pub mod reader;

pub use eval::{EvalError, Interpreter};
pub use facet::Value;
pub use reader::{parse_program, Program};
