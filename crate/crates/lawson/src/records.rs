//! JSON documents written and read by the command line.

use lawson_core::invariants::GeometricInvariants;
use lawson_core::potential::{cal_k, SurfaceParams};
use lawson_core::solver::{gauss_newton, Solution, UnknownVector};
use lawson_core::{Executor, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::config::{Provenance, RunConfig};
use crate::error::CliError;

/// Solved coefficients with everything derived from them. The leading
/// fields form the stable document; `details`, `checks` and `history` are
/// diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    /// Family parameter.
    pub k: u32,
    /// `t = 1/(2k)`.
    pub t: f64,
    /// Puncture angle.
    pub phi: f64,
    /// Truncation order `n`.
    pub order_n: usize,
    /// The scale `r`.
    pub r: f64,
    /// Coefficients of `x_1` in degrees `-1..=n`.
    pub x1: Vec<f64>,
    /// Coefficients of `x_2` in degrees `-1..=n`.
    pub x2: Vec<f64>,
    /// Coefficients of `x_3` in degrees `-1..=n`.
    pub x3: Vec<f64>,
    /// Final residual infinity norm.
    pub residual_norm: f64,
    /// Newton iterations.
    pub iterations: usize,
    /// Fricke discriminant at `lambda = i`.
    pub delta_at_i: f64,
    /// Area of the four-punctured sphere model.
    pub area: f64,
    /// Enclosed volume of the sphere model.
    pub volume: f64,
    /// Imaginary part of `K`.
    #[serde(rename = "K_imag")]
    pub k_imag: f64,
    /// Reduced period lattice basis (`y1` vertical).
    pub lattice: Vec<[f64; 3]>,
    /// Shortest period.
    pub shortest: f64,
    /// Area per period cell with shortest period one.
    pub area_normalized: f64,
    /// Volume per period cell with shortest period one.
    pub volume_normalized: f64,
    /// Producer and configuration hash.
    pub provenance: Provenance,
    /// Configuration of the run.
    pub config: RunConfig,
    /// Residual norm per iteration.
    pub history: Vec<f64>,
    /// Further invariants.
    pub details: InvariantsRecord,
    /// Monodromy-problem diagnostics.
    pub checks: SolutionChecks,
}

/// Closed-form invariants in `H = 1` units and normalized per period cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantsRecord {
    /// Area of the four-punctured sphere model.
    pub area: f64,
    /// Enclosed volume of the sphere model.
    pub volume: f64,
    /// Imaginary residue of the volume formula.
    pub volume_imag: f64,
    /// Curvature invariant `K` as `[re, im]`.
    pub curvature_k: [f64; 2],
    /// Tau-jet `[a1, a2, b1, b2]`, each `[re, im]`.
    pub tau_jet: [[f64; 2]; 4],
    /// Reduced lattice basis in `R^3` (`y1` vertical).
    pub lattice: Vec<[f64; 3]>,
    /// Shortest period.
    pub shortest: f64,
    /// Angle between the basis vectors (rank two).
    pub lattice_angle: Option<f64>,
    /// Sheets of the sphere model over one period cell.
    pub cover_index: usize,
    /// `1 / shortest`.
    pub scale: f64,
    /// Normalized area per cell.
    pub area_normalized: f64,
    /// Normalized volume per cell.
    pub volume_normalized: f64,
}

impl InvariantsRecord {
    /// Record of computed invariants.
    pub fn new(g: &GeometricInvariants) -> Self {
        let c = |z: C64| [z.re, z.im];
        InvariantsRecord {
            area: g.area,
            volume: g.volume,
            volume_imag: g.volume_imag,
            curvature_k: c(g.k),
            tau_jet: [c(g.jet.a1), c(g.jet.a2), c(g.jet.b1), c(g.jet.b2)],
            lattice: g.lattice.basis.clone(),
            shortest: g.lattice.shortest,
            lattice_angle: g.lattice.angle(),
            cover_index: g.lattice.cover_index,
            scale: g.scale,
            area_normalized: g.area_normalized,
            volume_normalized: g.volume_normalized,
        }
    }
}

/// Residuals of the monodromy problem at a solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionChecks {
    /// `|q(1)|`.
    pub q_at_one: f64,
    /// Largest `|Im p|` over the samples.
    pub im_p: f64,
    /// Largest `|Im q|` over the samples.
    pub im_q: f64,
    /// Largest `|Im r|` over the samples.
    pub im_r: f64,
    /// Largest coefficient of `K - 1` (the loop, not the curvature).
    pub cal_k_minus_one: f64,
    /// `(r x_1, r x_2, r x_3)` at `lambda = 1`.
    pub r_x_at_one: [f64; 3],
    /// `p(1)`.
    pub p_at_one: f64,
    /// `|p(1) + sin(2 pi t)|`.
    pub p_at_one_error: f64,
    /// Fricke discriminant at `lambda = i`.
    pub delta_at_i: f64,
}

impl SolutionChecks {
    /// Evaluate the diagnostics of a solution.
    pub fn new(sol: &Solution) -> Self {
        let ht = &sol.half_traces;
        let max_im = |v: &[C64]| v.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        let cal = cal_k(&sol.coeffs);
        let one = C64::new(1.0, 0.0);
        let mut cal_k_minus_one = 0.0f64;
        for m in cal.lo()..=cal.hi() {
            let target = if m == 0 { one } else { C64::new(0.0, 0.0) };
            cal_k_minus_one = cal_k_minus_one.max((cal.coeff(m) - target).norm());
        }
        let r = sol.coeffs.r();
        let x = sol.coeffs.x();
        let r_x_at_one = [0, 1, 2].map(|j| r * x[j].eval(one).re);
        let t = sol.params.t();
        SolutionChecks {
            q_at_one: ht.q[0].norm(),
            im_p: max_im(&ht.p),
            im_q: max_im(&ht.q),
            im_r: max_im(&ht.r),
            cal_k_minus_one,
            r_x_at_one,
            p_at_one: ht.p[0].re,
            p_at_one_error: (ht.p[0] + (2.0 * PI * t).sin()).norm(),
            delta_at_i: sol.delta_at_i,
        }
    }

    /// Largest violation among the monodromy residuals and the reducibility
    /// condition `(r x)(1) = (0, 0, -1)`.
    pub fn worst(&self) -> f64 {
        let rx = &self.r_x_at_one;
        [self.q_at_one, self.im_p, self.im_q, self.im_r, self.cal_k_minus_one, rx[0].abs(), rx[1].abs(), (rx[2] + 1.0).abs()]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl SolutionRecord {
    /// Package a solution.
    pub fn new(cfg: &RunConfig, sol: &Solution, inv: &GeometricInvariants) -> Self {
        let [x1, x2, x3] = sol.coeffs.x().clone().map(|l| l.coeffs().to_vec());
        SolutionRecord {
            k: sol.params.k(),
            t: sol.params.t(),
            phi: sol.params.phi(),
            order_n: sol.coeffs.order(),
            r: sol.coeffs.r(),
            x1,
            x2,
            x3,
            residual_norm: sol.residual_norm,
            iterations: sol.iterations,
            delta_at_i: sol.delta_at_i,
            area: inv.area,
            volume: inv.volume,
            k_imag: inv.k.im,
            lattice: inv.lattice.basis.clone(),
            shortest: inv.lattice.shortest,
            area_normalized: inv.area_normalized,
            volume_normalized: inv.volume_normalized,
            provenance: cfg.provenance(),
            config: cfg.clone(),
            history: sol.history.clone(),
            details: InvariantsRecord::new(inv),
            checks: SolutionChecks::new(sol),
        }
    }

    /// Solver unknowns (nonnegative degrees; the `-1` coefficient is fixed
    /// by the residue).
    pub fn unknowns(&self) -> Result<UnknownVector, CliError> {
        let n = self.order_n;
        let tail = |v: &[f64]| -> Result<Vec<f64>, CliError> {
            if v.len() != n + 2 {
                return Err(CliError::Usage(format!("expected {} coefficients per loop, found {}", n + 2, v.len())));
            }
            Ok(v[1..].to_vec())
        };
        Ok(UnknownVector { x: [tail(&self.x1)?, tail(&self.x2)?, tail(&self.x3)?], r: self.r })
    }

    /// Rebuild the solution; Newton confirms the stored coefficients and
    /// recomputes the monodromy data.
    pub fn to_solution<E: Executor>(&self, exec: &E) -> Result<Solution, CliError> {
        let params = SurfaceParams::new(self.k, self.phi)?;
        Ok(gauss_newton(&self.unknowns()?, params, &self.config.solver(), exec)?)
    }

    /// Read from a JSON file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Report of a triangulated surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryRecord {
    /// Producer and configuration hash.
    pub provenance: Provenance,
    /// Normalized triangulated area per period cell (null for a patch).
    #[serde(rename = "A_tri")]
    pub a_tri: Option<f64>,
    /// Normalized prism volume per period cell (null for a patch).
    #[serde(rename = "V_tri")]
    pub v_tri: Option<f64>,
    /// Triangulated area of the exported mesh in `H = 1` units.
    pub area_raw: f64,
    /// Prism volume in `H = 1` units (null for a patch).
    pub volume_raw: Option<f64>,
    /// Mesh area scaled up to the whole four-punctured sphere model, for
    /// comparison with the closed-form area.
    pub model_area: Option<f64>,
    /// Mesh volume scaled up to the sphere model.
    pub model_volume: Option<f64>,
    /// Sheets of the sphere model over one period cell.
    pub cover_index: usize,
    /// Triangles in the exported mesh.
    pub triangle_count: usize,
    /// Triangles in the fundamental patch.
    pub patch_triangle_count: usize,
    /// Mesh resolution.
    pub resolution: usize,
    /// Period lattice basis.
    pub lattice: Vec<[f64; 3]>,
    /// Normalization scale `1/shortest`.
    pub scale: f64,
    /// Closed-form normalized area per cell.
    pub analytic_area: f64,
    /// Closed-form normalized volume per cell.
    pub analytic_volume: f64,
    /// Copies of the patch in the cell (0 for a patch-only export).
    pub copies: usize,
    /// Residuals of the four boundary-plane fits, in the order of the
    /// patch boundary lists, or null when no fit was possible.
    pub plane_residuals: Option<[f64; 4]>,
    /// Largest `|F F* - Id|` at the vertices.
    pub unitarity_defect: f64,
    /// Largest mismatch of vertices identified by the lattice.
    pub boundary_mismatch: f64,
}
