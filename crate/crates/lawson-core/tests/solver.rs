use lawson_core::monodromy::Numerics;
use lawson_core::potential::SurfaceParams;
use lawson_core::solver::{continuation, solve_from_central, ContinuationPolicy, SolverConfig};
use lawson_core::{Error, Serial};
use std::f64::consts::FRAC_PI_4;

fn cfg() -> SolverConfig {
    SolverConfig { numerics: Numerics { samples: 64, ..Numerics::default() }, ..SolverConfig::default() }
}

#[test]
fn central_seed_converges_quickly() {
    for k in [3, 4, 6] {
        let sol = solve_from_central(SurfaceParams::new(k, FRAC_PI_4).unwrap(), &cfg(), &Serial).unwrap();
        assert!(sol.iterations <= 10, "k = {k}: {} iterations", sol.iterations);
        assert!(sol.residual_norm <= 1e-12);
        assert!(sol.delta_at_i > 0.0);
    }
}

#[test]
fn coefficients_decay_geometrically() {
    let sol = solve_from_central(SurfaceParams::new(3, 1.454838491).unwrap(), &cfg(), &Serial).unwrap();
    for x in sol.coeffs.x() {
        for m in 0..=x.hi() {
            let v = x.coeff(m).abs();
            assert!(v <= 10f64.powi(1 - m) + 1e-14, "|x_m| = {v:e} at m = {m}");
        }
    }
}

#[test]
fn continuation_retraces_itself() {
    let cfg = cfg();
    let start = solve_from_central(SurfaceParams::new(3, FRAC_PI_4).unwrap(), &cfg, &Serial).unwrap();
    let policy = ContinuationPolicy { step: 0.1, ..Default::default() };
    let fwd = continuation(start.clone(), 1.2, &policy, &cfg, &Serial);
    assert!(fwd.failure.is_none());
    let end = fwd.solutions.last().unwrap().clone();
    let back = continuation(end, FRAC_PI_4, &policy, &cfg, &Serial);
    assert!(back.failure.is_none());
    let (a, b) = (start.unknowns(), back.solutions.last().unwrap().unknowns());
    let jump = a.x.iter().flatten().zip(b.x.iter().flatten()).map(|(u, v)| (u - v).abs()).fold((a.r - b.r).abs(), f64::max);
    assert!(jump < 1e-9, "round trip moved the coefficients by {jump:e}");
    // Adjacent steps stay close.
    for w in fwd.solutions.windows(2) {
        let (u, v) = (w[0].unknowns(), w[1].unknowns());
        let d = u.x.iter().flatten().zip(v.x.iter().flatten()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(d < 0.5);
    }
}

#[test]
fn extreme_angle_diverges_with_history() {
    let err = solve_from_central(SurfaceParams::new(3, 1.57).unwrap(), &cfg(), &Serial).unwrap_err();
    match err {
        Error::Diverged { history, .. } => assert!(!history.is_empty()),
        e => panic!("expected divergence, got {e}"),
    }
}
