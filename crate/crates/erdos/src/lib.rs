//! File formats, the sampling harness and the command-line front end for
//! `erdos-core`.

pub mod cli;
pub mod formats;
pub mod harness;
