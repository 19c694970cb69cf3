//! Numerical construction of Lawson-type doubly periodic constant mean
//! curvature surfaces in the DPW framework.
//!
//! The crate is `no_std` with `alloc`. It covers loop arithmetic, the
//! four-puncture potential, Runge-Kutta monodromy, the Newton solver for the
//! monodromy problem, closed-form invariants (area, enclosed volume, the
//! curvature invariant `K`, period lattice), surface reconstruction through
//! Iwasawa factorization and the Sym-Bobenko formula, and isoperimetric
//! competitor profiles. File formats and the command line live in the
//! companion `lawson` crate.
#![no_std]
#![warn(missing_docs)]
// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

#[allow(missing_docs)]
pub mod error;
pub mod exec;
pub mod invariants;
pub mod linalg;
pub mod loops;
pub mod monodromy;
pub mod potential;
pub mod profiles;
pub mod solver;
pub mod surface;

pub use error::{Error, Result};
pub use exec::{Executor, Serial};
pub use linalg::{Mat2, C64};
