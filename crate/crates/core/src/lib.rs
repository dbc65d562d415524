//! Stable models of first-order formulas: the SM operator, splitting,
//! first-order modules and incremental assembly, with a finite Herbrand
//! engine for checking them.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod deps;
pub mod display;
pub mod error;
pub mod formula;
pub mod herbrand;
pub mod incremental;
pub mod module;
pub mod polarity;
pub mod program;
pub mod sm;
pub mod syntax;

pub use display::Notation;
pub use error::{Error, Result};
pub use formula::{Atom, Formula, Predicate, PredicateList, Signature, StepExpr, Term};
