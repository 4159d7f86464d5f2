//! Configuration handling, run orchestration, verification suites and data
//! export behind the `vml` binary.

pub mod config;
pub mod error;
pub mod export;
pub mod simulate;
pub mod verify;

pub use error::{CliError, Result};
