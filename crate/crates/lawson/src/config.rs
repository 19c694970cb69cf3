//! Run configuration and provenance.

use lawson_core::monodromy::Numerics;
use lawson_core::solver::SolverConfig;
use lawson_core::surface::{MeshConfig, DEFAULT_IWASAWA_ORDER};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Every numerical knob of a run. Parallelism is deliberately absent: it
/// never changes results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Family parameter `k >= 2`.
    pub k: u32,
    /// Puncture angle in `(0, pi/2)`.
    pub phi: f64,
    /// Truncation order of `x_1, x_2, x_3`.
    pub order_n: usize,
    /// RK4 subdivisions per unit path length.
    pub rk_steps: usize,
    /// Newton residual tolerance.
    pub newton_tol: f64,
    /// Samples on the unit circle.
    pub sample_count: usize,
    /// Closest admitted approach of a path to a puncture.
    pub puncture_eps: f64,
    /// Mesh subdivisions along the short side of the patch.
    pub mesh_resolution: usize,
    /// Initial Iwasawa truncation order.
    pub iwasawa_order: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let n = Numerics::default();
        RunConfig {
            k: 3,
            phi: std::f64::consts::FRAC_PI_4,
            order_n: n.order,
            rk_steps: n.rk_steps,
            newton_tol: SolverConfig::default().tol,
            sample_count: n.samples,
            puncture_eps: n.puncture_eps,
            mesh_resolution: MeshConfig::default().resolution,
            iwasawa_order: DEFAULT_IWASAWA_ORDER,
        }
    }
}

impl RunConfig {
    /// Reject non-positive fields.
    pub fn validate(&self) -> Result<(), CliError> {
        let ints = [self.k as usize, self.order_n, self.rk_steps, self.sample_count, self.mesh_resolution, self.iwasawa_order];
        let reals = [self.phi, self.newton_tol, self.puncture_eps];
        if ints.contains(&0) || reals.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(CliError::Usage("all numeric settings must be positive".into()));
        }
        Ok(())
    }

    /// Discretization for the core.
    pub fn numerics(&self) -> Numerics {
        Numerics {
            order: self.order_n,
            samples: self.sample_count,
            rk_steps: self.rk_steps,
            puncture_eps: self.puncture_eps,
            ..Numerics::default()
        }
    }

    /// Newton settings for the core.
    pub fn solver(&self) -> SolverConfig {
        SolverConfig { numerics: self.numerics(), tol: self.newton_tol, ..SolverConfig::default() }
    }

    /// Mesh settings for the core.
    pub fn mesh(&self) -> MeshConfig {
        MeshConfig { resolution: self.mesh_resolution, iwasawa_order: self.iwasawa_order }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))[..16].to_string()
    }

    /// Provenance record for output files.
    pub fn provenance(&self) -> Provenance {
        Provenance::new(self.hash())
    }
}

/// Tool, version and configuration hash carried by every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Producing tool.
    pub tool: String,
    /// Tool version.
    pub version: String,
    /// Hash of the configuration.
    pub config_hash: String,
}

impl Provenance {
    /// Provenance of this build for a configuration hash.
    pub fn new(config_hash: String) -> Self {
        Provenance { tool: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into(), config_hash }
    }

    /// One-line form for comment headers.
    pub fn line(&self) -> String {
        format!("{} {} config {}", self.tool, self.version, self.config_hash)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.phi += 1e-12;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
        let bad = RunConfig { newton_tol: 0.0, ..RunConfig::default() };
        assert!(bad.validate().is_err());
    }
}
