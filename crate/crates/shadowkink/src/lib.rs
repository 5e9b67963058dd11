//! Command-line front end for `shadowkink-core`.
//!
//! Reads `key = value` configuration, runs single solves, parameter sweeps,
//! Painleve II solves, threshold and profile comparisons, and writes
//! bit-stable CSV/JSON artifacts together with a run manifest.

mod cli;
pub mod config;
pub mod io;
pub mod manifest;

pub use cli::{run, EXIT_CONFIG, EXIT_NO_CONVERGENCE, EXIT_OK};
