//! Property suite behind `lawson validate`.

use lawson_core::invariants::{
    compute_invariants, curvature_k, curvature_residue_general, cylinder_curvature, enclosed_volume,
    lawson_puncture_jets, minkowski_volume, tau_expansion,
};
use lawson_core::linalg::{c, Mat2, C64};
use lawson_core::loops::{circle, MatrixSamples};
use lawson_core::monodromy::{compute_pq, half_traces, Numerics};
use lawson_core::potential::{central_value, SurfaceParams};
use lawson_core::solver::{solve_from_central, Solution, SolverConfig};
use lawson_core::surface::{iwasawa, DEFAULT_IWASAWA_ORDER};
use lawson_core::Executor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::CliError;
use crate::records::SolutionChecks;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    /// Short identifier.
    pub name: String,
    /// Whether the check passed.
    pub passed: bool,
    /// Measured quantity (usually the worst error).
    pub value: f64,
    /// Threshold on `value`.
    pub tolerance: f64,
    /// Human-readable detail.
    pub detail: String,
}

impl Check {
    fn bound(name: &str, value: f64, tolerance: f64, detail: String) -> Self {
        Check { name: name.into(), passed: value <= tolerance, value, tolerance, detail }
    }

    fn failed(name: &str, err: impl std::fmt::Display) -> Self {
        Check { name: name.into(), passed: false, value: f64::NAN, tolerance: 0.0, detail: err.to_string() }
    }

    /// One-line summary.
    pub fn line(&self) -> String {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        format!("{mark} {:<20} {:.3e} (tol {:.1e}) {}", self.name, self.value, self.tolerance, self.detail)
    }
}

/// Names accepted by `validate --check`.
pub const CHECKS: [&str; 7] =
    ["cylinder-K", "t0-oracle", "iwasawa", "two-route-K", "minkowski", "solver-invariants", "cylinder"];

/// `(i/2 pi) int tr(D' ^ D'')` of the flat cylinder against `-ih/16`.
pub fn check_cylinder_k(hs: &[f64]) -> Check {
    let mut worst = 0.0f64;
    for &h in hs {
        match cylinder_curvature(h) {
            Ok((exact, quad)) => worst = worst.max((exact - quad).norm()),
            Err(e) => return Check::failed("cylinder-K", e),
        }
    }
    Check::bound("cylinder-K", worst, 1e-10, format!("h in {hs:?}"))
}

/// Largest deviations `|p/t - 2 pi r x_3|`, `|q/t - 2 pi r x_2|`,
/// `|r/t - 2 pi i r x_1|` over the samples at central coefficients.
pub fn small_t_deviations<E: Executor>(k: u32, phi: f64, num: &Numerics, exec: &E) -> lawson_core::Result<[f64; 3]> {
    let params = SurfaceParams::new(k, phi)?;
    let t = params.t();
    let coeffs = central_value(params, num.order)?;
    let tr = compute_pq(&coeffs, num, exec)?;
    let ht = half_traces(&tr, t)?;
    let r = coeffs.r();
    let x = coeffs.x();
    let mut dev = [0.0f64; 3];
    for (i, l) in circle(num.samples).into_iter().enumerate() {
        let xs = [0, 1, 2].map(|j| x[j].eval(l));
        let two_pi_r = 2.0 * PI * r;
        dev[0] = dev[0].max((ht.p[i] / t - two_pi_r * xs[2]).norm());
        dev[1] = dev[1].max((ht.q[i] / t - two_pi_r * xs[1]).norm());
        dev[2] = dev[2].max((ht.r[i] / t - C64::i() * two_pi_r * xs[0]).norm());
    }
    Ok(dev)
}

/// Linear scaling in `t` of the small-`t` deviations: the slopes
/// `deviation / t` at the two `k` agree within a factor 2.
pub fn check_t0_oracle<E: Executor>(ks: [u32; 2], num: &Numerics, exec: &E) -> Check {
    let mut slopes = [[0.0; 3]; 2];
    for (s, &k) in slopes.iter_mut().zip(&ks) {
        match small_t_deviations(k, FRAC_PI_4, num, exec) {
            Ok(d) => *s = d.map(|v| v * 2.0 * k as f64),
            Err(e) => return Check::failed("t0-oracle", e),
        }
    }
    let worst = (0..3).map(|i| (slopes[0][i] / slopes[1][i]).ln().abs()).fold(0.0, f64::max);
    let detail = format!("slopes (p, q, r) k={}: {:?}, k={}: {:?}", ks[0], slopes[0].map(|v| (v * 1e3).round() / 1e3), ks[1], slopes[1].map(|v| (v * 1e3).round() / 1e3));
    Check::bound("t0-oracle", worst.exp(), 2.0, detail)
}

fn random_laurent(rng: &mut ChaCha8Rng, lambdas: &[C64], deg: i32, amp: f64) -> Vec<C64> {
    let coeffs: Vec<C64> = (-deg..=deg).map(|_| c(rng.random_range(-amp..amp), rng.random_range(-amp..amp))).collect();
    lambdas
        .iter()
        .map(|l| coeffs.iter().zip(-deg..=deg).map(|(a, m)| a * l.powi(m)).sum())
        .collect()
}

/// Random loop of determinant one: a product of unipotent factors and a
/// constant diagonal, sampled on `n` points.
pub fn random_unimodular_loop(rng: &mut ChaCha8Rng, n: usize) -> MatrixSamples {
    let lambdas = circle(n);
    let a = random_laurent(rng, &lambdas, 2, 0.4);
    let b = random_laurent(rng, &lambdas, 2, 0.4);
    let d = c(rng.random_range(0.5..2.0), rng.random_range(-0.5..0.5));
    MatrixSamples(
        (0..n)
            .map(|i| {
                let up = Mat2::new(c(1.0, 0.0), a[i], c(0.0, 0.0), c(1.0, 0.0));
                let low = Mat2::new(c(1.0, 0.0), c(0.0, 0.0), b[i], c(1.0, 0.0));
                up * low * Mat2::diag(d, d.inv())
            })
            .collect(),
    )
}

/// Iwasawa factorization on `count` random loops: unitarity of `F`,
/// holomorphy of `B` and reconstruction of `Phi`.
pub fn check_iwasawa(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut unit, mut neg, mut rec) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..count {
        let phi = random_unimodular_loop(&mut rng, 128);
        match iwasawa(&phi, DEFAULT_IWASAWA_ORDER) {
            Ok(f) => {
                unit = unit.max(f.unitarity_defect());
                neg = neg.max(f.negative_mass(&phi));
                rec = rec.max(f.reconstruction_error(&phi));
            }
            Err(e) => return Check::failed("iwasawa", e),
        }
    }
    let ok = unit <= 1e-10 && neg <= 1e-10 && rec <= 1e-9;
    Check {
        name: "iwasawa".into(),
        passed: ok,
        value: unit.max(neg).max(rec),
        tolerance: 1e-9,
        detail: format!("{count} loops: |FF*-I| {unit:.2e}, negative mass {neg:.2e}, |BF-Phi| {rec:.2e}"),
    }
}

/// The residue route to `K` against `2 (a_1 b_2 - a_2 b_1)`.
pub fn check_two_route_k(sols: &[Solution]) -> Check {
    let mut worst = 0.0f64;
    for s in sols {
        let r = tau_expansion(&s.coeffs, 1e-8).and_then(|jet| {
            let data = lawson_puncture_jets(&jet, s.params.k(), s.params.phi())?;
            Ok((curvature_residue_general(&data)? - curvature_k(&jet)).norm())
        });
        match r {
            Ok(d) => worst = worst.max(d),
            Err(e) => return Check::failed("two-route-K", e),
        }
    }
    Check::bound("two-route-K", worst, 1e-12, format!("{} solutions", sols.len()))
}

/// The volume from the tau-jet against `(A - 2 pi i K)/3` and reality of
/// both at solved data, plus the flat cylinder of height `h`: area
/// `h pi/2` and the quadrature `K` give volume `h pi/8`.
pub fn check_minkowski(sols: &[Solution]) -> Check {
    let mut worst = 0.0f64;
    for s in sols {
        let r = compute_invariants(s).and_then(|g| {
            let (v, vi) = enclosed_volume(g.area, &g.jet)?;
            let (m, mi) = minkowski_volume(g.area, g.k)?;
            Ok((v - m).abs().max(vi.abs()).max(mi.abs()))
        });
        match r {
            Ok(d) => worst = worst.max(d),
            Err(e) => return Check::failed("minkowski", e),
        }
    }
    let mut cyl = 0.0f64;
    for h in [1.0, PI, 16.0] {
        let r = cylinder_curvature(h).and_then(|(_, quad)| minkowski_volume(h * PI / 2.0, quad));
        match r {
            Ok((v, vi)) => cyl = cyl.max((v - h * PI / 8.0).abs()).max(vi.abs()),
            Err(e) => return Check::failed("minkowski", e),
        }
    }
    let detail = format!("{} solutions {worst:.2e}, flat cylinders {cyl:.2e}", sols.len());
    Check::bound("minkowski", worst.max(cyl), 1e-9, detail)
}

/// Monodromy residuals, reducibility at `lambda = 1`, `p(1)` and the Newton
/// iteration count at each solution.
pub fn check_solver_invariants(sols: &[Solution]) -> Check {
    let (mut worst, mut rx, mut p1, mut iters) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for s in sols {
        let c = SolutionChecks::new(s);
        let r = &c.r_x_at_one;
        worst = worst.max(c.q_at_one).max(c.im_p).max(c.im_q).max(c.im_r).max(c.cal_k_minus_one);
        rx = rx.max(r[0].abs()).max(r[1].abs()).max((r[2] + 1.0).abs());
        p1 = p1.max(c.p_at_one_error);
        iters = iters.max(s.iterations);
    }
    Check {
        name: "solver-invariants".into(),
        passed: worst <= 1e-10 && rx <= 1e-9 && p1 <= 1e-8 && iters <= 10,
        value: worst,
        tolerance: 1e-10,
        detail: format!("(r x)(1) err {rx:.2e}, p(1) err {p1:.2e}, max iterations {iters}"),
    }
}

/// `k = 2`, `phi = pi/4`: area `pi^2` and volume `pi^2/4`.
pub fn check_cylinder<E: Executor>(cfg: &SolverConfig, exec: &E) -> Check {
    let r = SurfaceParams::new(2, FRAC_PI_4)
        .and_then(|p| solve_from_central(p, cfg, exec))
        .and_then(|s| compute_invariants(&s));
    match r {
        Ok(g) => {
            let (da, dv) = ((g.area - PI * PI).abs(), (g.volume - PI * PI / 4.0).abs());
            Check {
                name: "cylinder".into(),
                passed: da <= 1e-8 && dv <= 1e-6,
                value: da.max(dv),
                tolerance: 1e-8,
                detail: format!("A - pi^2 = {da:.2e}, V - pi^2/4 = {dv:.2e}"),
            }
        }
        Err(e) => Check::failed("cylinder", e),
    }
}

/// Solutions from the central seed at `phi = pi/4` for `k = 3, 4, 6`.
pub fn reference_solutions<E: Executor>(cfg: &SolverConfig, exec: &E) -> lawson_core::Result<Vec<Solution>> {
    [3, 4, 6].into_iter().map(|k| solve_from_central(SurfaceParams::new(k, FRAC_PI_4)?, cfg, exec)).collect()
}

/// Run the named checks (all when `only` is empty).
pub fn run<E: Executor>(only: &[String], t0_ks: [u32; 2], cfg: &SolverConfig, exec: &E) -> Result<Vec<Check>, CliError> {
    for name in only {
        if !CHECKS.contains(&name.as_str()) {
            return Err(CliError::Usage(format!("unknown check {name}; expected one of {CHECKS:?}")));
        }
    }
    let wanted = |n: &str| only.is_empty() || only.iter().any(|o| o == n);
    let needs_solutions = ["two-route-K", "minkowski", "solver-invariants"].iter().any(|n| wanted(n));
    let sols = if needs_solutions { Some(reference_solutions(cfg, exec)) } else { None };
    let mut out = Vec::new();
    let with_sols = |name: &str, f: fn(&[Solution]) -> Check| match &sols {
        Some(Ok(s)) => f(s),
        Some(Err(e)) => Check::failed(name, e),
        None => unreachable!("solutions requested"),
    };
    if wanted("cylinder-K") {
        out.push(check_cylinder_k(&[1.0, PI, 16.0]));
    }
    if wanted("t0-oracle") {
        out.push(check_t0_oracle(t0_ks, &cfg.numerics, exec));
    }
    if wanted("iwasawa") {
        out.push(check_iwasawa(100, 7));
    }
    if wanted("two-route-K") {
        out.push(with_sols("two-route-K", check_two_route_k));
    }
    if wanted("minkowski") {
        out.push(with_sols("minkowski", check_minkowski));
    }
    if wanted("solver-invariants") {
        out.push(with_sols("solver-invariants", check_solver_invariants));
    }
    if wanted("cylinder") {
        out.push(check_cylinder(cfg, exec));
    }
    Ok(out)
}
