//! Std companion of `spqn-core`: a thread-pool restart executor, CSV and
//! JSON output formats, and the `spqn` command line.

pub mod cli;
pub mod executor;
pub mod format;

pub use executor::PoolExecutor;
