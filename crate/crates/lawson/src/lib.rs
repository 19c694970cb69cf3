// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Command line, file formats and a thread-pool executor for
//! [`lawson_core`].
//!
//! The binary `lawson` has four commands: `solve` writes a solution JSON,
//! `profile` sweeps a family against the isoperimetric competitors, `mesh`
//! triangulates a solved surface and `validate` runs the property suite.

pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod formats;
pub mod records;
pub mod validate;

pub use config::RunConfig;
pub use error::CliError;
pub use exec::Pool;
