//! Configuration, orchestration and serialization for the `moire` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{AlphaSpec, Format, RunConfig};
pub use error::{CliError, CliResult};
pub use output::{Check, Outcome};
