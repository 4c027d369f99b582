//! Command-line driver: subcommands over the transport library, plus the
//! grid file format, flat config files, and threaded ensemble runs.
//!
//! Invariant: for a fixed configuration and seed, output files are
//! byte-identical across runs and worker counts.

pub mod commands;
pub mod config;
pub mod gridfile;
pub mod parallel;
