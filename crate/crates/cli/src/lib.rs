//! Scenario runner and report emitter for the curvature estimate checks.
//!
//! [`config`] parses scenario files, [`runner`] executes them in parallel
//! and [`emit`] writes JSON and CSV reports. [`app`] is the `ricci4`
//! command line.

// Negated float comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod emit;
pub mod runner;

pub use config::{parse_config, serialize_config, ConfigError, Scenario};
pub use runner::{exit_code, run, RunReport};
