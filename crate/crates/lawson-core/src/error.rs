use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::C64;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Sample count too small for the tracked degree range.
    Aliasing {
        /// Minimal admissible sample count.
        needed: usize,
        /// Sample count supplied.
        got: usize,
    },
    /// Samples are not represented by the requested degree range.
    InconsistentSamples {
        /// Max deviation between samples and the refit loop.
        residual: f64,
    },
    /// A 2x2 matrix sample is singular.
    Singular {
        /// The offending spectral parameter.
        lambda: C64,
    },
    /// Evaluation at a puncture.
    Pole {
        /// The offending point.
        z: C64,
    },
    /// An integration path comes closer to a puncture than allowed.
    PathTooClose {
        /// Closest point on the path.
        z: C64,
        /// Its distance to the nearest puncture.
        distance: f64,
    },
    /// Newton iteration failed to reach the tolerance.
    Diverged {
        /// Residual infinity norms, one per iteration.
        history: Vec<f64>,
        /// Short reason.
        reason: String,
    },
    /// The monodromy is not unitarizable at the computed data.
    Unitarizability {
        /// What failed.
        reason: String,
    },
    /// Iwasawa factorization residual too large at the highest order tried.
    Factorization {
        /// `max |B B* - Phi Phi*|` over the samples.
        residual: f64,
        /// Truncation order of the last attempt.
        order: usize,
    },
    /// A geometric consistency check failed.
    Geometry {
        /// What failed.
        reason: String,
    },
    /// Invalid input parameters.
    InvalidInput {
        /// What is wrong.
        reason: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Aliasing { needed, got } => {
                write!(f, "aliasing: {got} samples supplied, at least {needed} needed")
            }
            Error::InconsistentSamples { residual } => {
                write!(f, "samples inconsistent with degree range (residual {residual:e})")
            }
            Error::Singular { lambda } => {
                write!(f, "singular matrix at lambda = {} + {}i", lambda.re, lambda.im)
            }
            Error::Pole { z } => write!(f, "evaluation at puncture z = {} + {}i", z.re, z.im),
            Error::PathTooClose { z, distance } => write!(
                f,
                "path passes within {distance:e} of a puncture near z = {} + {}i",
                z.re, z.im
            ),
            Error::Diverged { history, reason } => {
                write!(f, "newton iteration diverged ({reason}) after {} iterations", history.len())?;
                if let Some(last) = history.last() {
                    write!(f, ", last residual {last:e}")?;
                }
                Ok(())
            }
            Error::Unitarizability { reason } => write!(f, "unitarizability failure: {reason}"),
            Error::Factorization { residual, order } => write!(
                f,
                "iwasawa factorization residual {residual:e} at order {order}; increase the truncation order"
            ),
            Error::Geometry { reason } => write!(f, "geometry inconsistency: {reason}"),
            Error::InvalidInput { reason } => write!(f, "invalid input: {reason}"),
        }
    }
}

impl core::error::Error for Error {}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(reason: impl Into<String>) -> Error {
    Error::InvalidInput { reason: reason.into() }
}

pub(crate) fn geometry(reason: impl Into<String>) -> Error {
    Error::Geometry { reason: reason.into() }
}
