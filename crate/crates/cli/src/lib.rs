//! Configuration, presets and file emission behind the `szego-lab` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;
pub mod sweep;

pub use error::{CliError, Result};

/// Exit status for errors raised before or outside integration: bad
/// config, invalid datum, or unwritable output. Numerical aborts are
/// reported through the run status instead.
pub const CONFIG_ERROR: u8 = 1;
