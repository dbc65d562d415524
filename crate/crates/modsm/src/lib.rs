//! File formats, the command line, parallel search and randomized
//! property suites on top of `modsm-core`.

pub mod cli;
pub mod error;
pub mod gen;
pub mod io;
pub mod parallel;
pub mod suites;

pub use error::{CliError, Result};
