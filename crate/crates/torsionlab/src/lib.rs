//! Command-line front end and file formats for `torsionlab-core`.
//!
//! * [`config`]: JSON experiment configs.
//! * [`formats`]: CSV and binary field dumps, exponent tables.
//! * [`suites`]: the invariant suites behind `verify`.
//! * [`sweep`]: uniformity sweeps over random curve families.
//! * [`exec`]: the thread-pool executor (`TORSIONLAB_WORKERS` caps it).
//!
//! Exit codes: 0 success, 1 failed verification, 2 domain error,
//! 3 numerical precondition, 64 usage or parse error, 74 IO error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
mod error;
pub mod exec;
pub mod formats;
pub mod random;
pub mod report;
pub mod suites;
pub mod sweep;

pub use error::{exit_code, CliError, EXIT_DOMAIN, EXIT_FAILED, EXIT_IO, EXIT_NUMERICAL, EXIT_USAGE};
