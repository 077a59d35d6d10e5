//! Command-line front end for `fracgreen-core`: JSON configuration, the
//! `kernel-eval`, `solve-ball`, `moving-plane`, `liouville-scan`, `verify` and
//! `all` commands, and the CSV/JSON writers.
//!
//! Exit codes: 0 on success, 1 on a suite violation, sweep violation, failed
//! cascade check or solver non-convergence, 2 on usage, configuration or IO
//! errors.

// `!(x > 0.0)` in validation also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{Command, RunError, Runner, Status};
pub use config::{load_config, parse_config, Config, ConfigError};
