//! File formats, output artifacts and the command-line pipeline around
//! [`cotrace_core`].
//!
//! The binary `cotrace` exposes five subcommands (`validate`, `build`,
//! `test`, `report`, `synth`); this library holds their building blocks so
//! they can be driven from tests and other programs.

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod run;
pub mod scenario;

pub use error::{Error, Result};
