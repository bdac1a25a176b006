//! File formats, the fixture catalog, verification suites and the
//! command-line front end over `qlogic-core`.

pub mod cli;
mod error;
pub mod fixtures;
pub mod format;
pub mod suites;
pub mod sweep;

pub use error::{FormatError, Result};
pub use qlogic_core as core;
