//! Argument parsing and the four commands.

use clap::{Args, Parser, Subcommand, ValueEnum};
use lawson_core::invariants::compute_invariants;
use lawson_core::potential::SurfaceParams;
use lawson_core::profiles::{
    competitor, improvement_interval, linspace, sweep_profile, Branch, ImprovementInterval, Lattice2D,
};
use lawson_core::solver::{solve, solve_from_central};
use lawson_core::surface::{build_patch, extend_symmetry, fit_boundary_planes, mesh_geometry, patch_mesh, prism_sums};
use lawson_core::Executor;
use serde::Serialize;
use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{Provenance, RunConfig};
use crate::error::CliError;
use crate::formats::{profile_csv, write_obj};
use crate::records::{GeometryRecord, SolutionRecord};
use crate::validate;

/// Constant mean curvature surfaces of Lawson type in `T^2 x R`.
#[derive(Debug, Parser)]
#[command(name = "lawson", version, about)]
pub struct Cli {
    /// Command to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the monodromy problem and write the solution JSON.
    Solve(SolveArgs),
    /// Sweep a family and compare with the isoperimetric competitors.
    Profile(ProfileArgs),
    /// Triangulate a solved surface.
    Mesh(MeshArgs),
    /// Run the property suite.
    Validate(ValidateArgs),
}

/// Discretization shared by the solving commands.
#[derive(Debug, Clone, Args)]
pub struct NumericArgs {
    /// Truncation order of the potential.
    #[arg(long, default_value_t = RunConfig::default().order_n)]
    pub order: usize,
    /// RK4 subdivisions per unit path length.
    #[arg(long, default_value_t = RunConfig::default().rk_steps)]
    pub rk_steps: usize,
    /// Samples on the unit circle.
    #[arg(long, default_value_t = RunConfig::default().sample_count)]
    pub samples: usize,
    /// Newton residual tolerance.
    #[arg(long, default_value_t = RunConfig::default().newton_tol)]
    pub tol: f64,
    /// Closest admitted approach of a path to a puncture.
    #[arg(long, default_value_t = RunConfig::default().puncture_eps)]
    pub puncture_eps: f64,
}

impl NumericArgs {
    fn config(&self, k: u32, phi: f64) -> Result<RunConfig, CliError> {
        let cfg = RunConfig {
            k,
            phi,
            order_n: self.order,
            rk_steps: self.rk_steps,
            sample_count: self.samples,
            newton_tol: self.tol,
            puncture_eps: self.puncture_eps,
            ..RunConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `solve` arguments.
#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Family parameter.
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    /// Puncture angle in `(0, pi/2)`.
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub phi: f64,
    /// Fall back to continuation from `phi = pi/4` when the central seed
    /// does not converge.
    #[arg(long)]
    pub continuation: bool,
    #[command(flatten)]
    pub numerics: NumericArgs,
    /// Output path (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Lattice shapes for `profile --competitors-only`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeArg {
    /// Equilateral torus.
    Hex,
    /// Square torus.
    Square,
}

/// `profile` arguments.
#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Family parameter.
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    /// Lower end of the sweep.
    #[arg(long, default_value_t = 1.45)]
    pub phi_min: f64,
    /// Upper end of the sweep.
    #[arg(long, default_value_t = 1.46)]
    pub phi_max: f64,
    /// Subintervals of the sweep.
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
    /// Also locate the interval of positive margin.
    #[arg(long)]
    pub find_interval: bool,
    /// Bisection tolerance in `phi` for the interval ends.
    #[arg(long, default_value_t = 1e-7)]
    pub interval_tol: f64,
    /// Competitor lattice (defaults to the lattice of `k`).
    #[arg(long, value_enum)]
    pub lattice: Option<LatticeArg>,
    /// Only tabulate the competitor profile, no solving.
    #[arg(long)]
    pub competitors_only: bool,
    /// Largest volume of the competitor table.
    #[arg(long, default_value_t = 1.0)]
    pub v_max: f64,
    #[command(flatten)]
    pub numerics: NumericArgs,
    /// Output CSV path (stdout if absent); the interval goes next to it as
    /// `<out>.interval.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `mesh` arguments.
#[derive(Debug, Args)]
pub struct MeshArgs {
    /// Solution JSON written by `solve`.
    #[arg(long)]
    pub solution: PathBuf,
    /// Subdivisions along the short side of the patch.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Export the fundamental patch only.
    #[arg(long)]
    pub patch_only: bool,
    /// OBJ output path; the report goes to the same stem with
    /// `.geometry.json`.
    #[arg(long, default_value = "surface.obj")]
    pub out: PathBuf,
}

/// `validate` arguments.
#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Run only these checks (repeatable).
    #[arg(long = "check", value_parser = clap::builder::PossibleValuesParser::new(validate::CHECKS))]
    pub checks: Vec<String>,
    /// Largest `k` of the small-`t` oracle; the other is `2k/5`.
    #[arg(long, default_value_t = 500)]
    pub k: u32,
    /// Write the report as JSON to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Solve, compute invariants and emit the solution document.
pub fn cmd_solve<E: Executor>(args: &SolveArgs, exec: &E, stdout: &mut dyn Write) -> Result<SolutionRecord, CliError> {
    let cfg = args.numerics.config(args.k, args.phi)?;
    let params = SurfaceParams::new(cfg.k, cfg.phi)?;
    let sol = if args.continuation {
        solve(params, &cfg.solver(), exec)?
    } else {
        solve_from_central(params, &cfg.solver(), exec)?
    };
    let inv = compute_invariants(&sol)?;
    let rec = SolutionRecord::new(&cfg, &sol, &inv);
    write_output(args.out.as_deref(), &to_json(&rec)?, stdout)?;
    Ok(rec)
}

/// Interval report written by `profile --find-interval`.
#[derive(Clone, Debug, Serialize)]
pub struct IntervalReport {
    /// Producer and configuration hash.
    pub provenance: Provenance,
    /// Family parameter.
    pub k: u32,
    /// Positive-margin interval, or null if the sweep never wins.
    pub interval: Option<IntervalRecord>,
}

/// Serializable [`ImprovementInterval`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IntervalRecord {
    /// Lower end in `phi`.
    pub phi_lo: f64,
    /// Upper end in `phi`.
    pub phi_hi: f64,
    /// Normalized volume at the lower end.
    pub v_lo: f64,
    /// Normalized volume at the upper end.
    pub v_hi: f64,
    /// Sampled parameter of largest margin.
    pub phi_peak: f64,
    /// Largest sampled margin.
    pub margin_peak: f64,
}

impl From<ImprovementInterval> for IntervalRecord {
    fn from(i: ImprovementInterval) -> Self {
        IntervalRecord {
            phi_lo: i.phi_lo,
            phi_hi: i.phi_hi,
            v_lo: i.v_lo,
            v_hi: i.v_hi,
            phi_peak: i.phi_peak,
            margin_peak: i.margin_peak,
        }
    }
}

/// Competitor table: a uniform volume grid merged with the branch
/// transitions.
pub fn competitor_csv(lattice: &Lattice2D, v_max: f64, steps: usize, prov: &Provenance) -> String {
    let mut vs = linspace(0.0, v_max, steps.max(1));
    vs.extend(lattice.transitions().into_iter().filter(|v| *v <= v_max));
    vs.sort_by(f64::total_cmp);
    vs.dedup();
    let mut out = format!("# {}\nV,A_competitor,branch\n", prov.line());
    for v in vs {
        let (a, b) = competitor(lattice, v);
        let name = match b {
            Branch::Sphere => "sphere",
            Branch::Cylinder => "cylinder",
            Branch::Planes => "planes",
        };
        out += &format!("{v:.16e},{a:.16e},{name}\n");
    }
    out
}

/// Sweep (or tabulate competitors) and write the CSV, plus the interval
/// report when asked.
pub fn cmd_profile<E: Executor>(args: &ProfileArgs, exec: &E, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.competitors_only {
        let lattice = match args.lattice {
            Some(LatticeArg::Hex) => Lattice2D::hexagonal(),
            Some(LatticeArg::Square) => Lattice2D::square(),
            None => Lattice2D::for_k(args.k)?,
        };
        if !(args.v_max > 0.0) {
            return Err(CliError::Usage("--v-max must be positive".into()));
        }
        let cfg = RunConfig { k: args.k, ..RunConfig::default() };
        let csv = competitor_csv(&lattice, args.v_max, args.steps, &cfg.provenance());
        return write_output(args.out.as_deref(), &csv, stdout);
    }
    if args.lattice.is_some() {
        return Err(CliError::Usage("--lattice applies to --competitors-only; sweeps use the lattice of k".into()));
    }
    if !(args.phi_min < args.phi_max) || args.steps == 0 {
        return Err(CliError::Usage("need phi-min < phi-max and steps > 0".into()));
    }
    let cfg = args.numerics.config(args.k, args.phi_min)?;
    let solver = cfg.solver();
    let prov = cfg.provenance();
    let points = sweep_profile(args.k, &linspace(args.phi_min, args.phi_max, args.steps), &solver, exec)?;
    write_output(args.out.as_deref(), &profile_csv(&points, &prov), stdout)?;
    if args.find_interval {
        let found = improvement_interval(
            args.k,
            (args.phi_min, args.phi_max),
            args.steps,
            args.interval_tol,
            &solver,
            exec,
        )?;
        let report = IntervalReport { provenance: prov, k: args.k, interval: found.map(Into::into) };
        let path = args.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".interval.json");
            PathBuf::from(s)
        });
        write_output(path.as_deref(), &to_json(&report)?, stdout)?;
    }
    Ok(())
}

/// Mesh a stored solution; returns the geometry report, also written next
/// to the OBJ.
pub fn cmd_mesh<E: Executor>(args: &MeshArgs, exec: &E, stdout: &mut dyn Write) -> Result<GeometryRecord, CliError> {
    let stored = SolutionRecord::load(&args.solution)?;
    let mut cfg = stored.config.clone();
    if let Some(r) = args.resolution {
        cfg.mesh_resolution = r;
    }
    cfg.validate()?;
    let sol = stored.to_solution(exec)?;
    let inv = compute_invariants(&sol)?;
    let t = sol.params.t();
    let patch = build_patch(&sol, &inv.unitarizer, &cfg.mesh(), exec)?;
    let planes = fit_boundary_planes(&patch, t).ok();
    let plane_residuals = planes.as_ref().map(|p| {
        // Boundary-list order: [0, 1], [0, i], arc p1..i, arc p1..1.
        [p.mirror.residual, p.walls[0].residual, p.walls[1].residual, p.walls[2].residual]
    });
    let s = inv.scale;
    let (mesh, a_tri, v_tri, area_raw, volume_raw) = if args.patch_only {
        let mesh = patch_mesh(&patch, &inv.lattice);
        let area = prism_sums(&mesh).0;
        (mesh, None, None, area, None)
    } else {
        let mesh = extend_symmetry(&patch, t, &inv.lattice)?;
        let (a, v) = mesh_geometry(&mesh)?;
        (mesh, Some(a * s * s), Some(v * s * s * s), a, Some(v))
    };
    let index = inv.lattice.cover_index as f64;
    let prov = cfg.provenance();
    let report = GeometryRecord {
        provenance: prov.clone(),
        a_tri,
        v_tri,
        area_raw,
        volume_raw,
        model_area: a_tri.map(|_| area_raw * index),
        model_volume: volume_raw.map(|v| v * index),
        cover_index: inv.lattice.cover_index,
        triangle_count: mesh.triangles.len(),
        patch_triangle_count: patch.triangles.len(),
        resolution: cfg.mesh_resolution,
        lattice: inv.lattice.basis.clone(),
        scale: s,
        analytic_area: inv.area_normalized,
        analytic_volume: inv.volume_normalized,
        copies: if args.patch_only { 0 } else { mesh.copies },
        plane_residuals,
        unitarity_defect: patch.unitarity_defect,
        boundary_mismatch: mesh.boundary_mismatch,
    };
    let header = [
        prov.line(),
        format!("k {} phi {} resolution {}", cfg.k, cfg.phi, cfg.mesh_resolution),
        if args.patch_only { "fundamental patch".into() } else { format!("{} patch copies", mesh.copies) },
    ];
    let obj = write_obj(&mesh.vertices, &mesh.triangles, &header);
    std::fs::write(&args.out, obj).map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    let json = to_json(&report)?;
    write_output(Some(&args.out.with_extension("geometry.json")), &json, stdout)?;
    stdout.write_all(json.as_bytes())?;
    Ok(report)
}

/// Run the property suite; fails with [`CliError::Checks`] if any check
/// fails.
pub fn cmd_validate<E: Executor>(args: &ValidateArgs, exec: &E, stdout: &mut dyn Write) -> Result<Vec<validate::Check>, CliError> {
    if args.k < 5 {
        return Err(CliError::Usage("--k must be at least 5".into()));
    }
    let ks = [(2 * args.k / 5).max(2), args.k];
    let checks = validate::run(&args.checks, ks, &RunConfig::default().solver(), exec)?;
    for c in &checks {
        writeln!(stdout, "{}", c.line())?;
    }
    if let Some(p) = &args.out {
        write_output(Some(p), &to_json(&checks)?, stdout)?;
    }
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(checks),
        n => Err(CliError::Checks(n)),
    }
}

/// Dispatch a parsed command line.
pub fn run<E: Executor>(cli: &Cli, exec: &E, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, exec, stdout).map(drop),
        Command::Profile(a) => cmd_profile(a, exec, stdout),
        Command::Mesh(a) => cmd_mesh(a, exec, stdout).map(drop),
        Command::Validate(a) => cmd_validate(a, exec, stdout).map(drop),
    }
}
