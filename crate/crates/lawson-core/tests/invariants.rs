use lawson_core::invariants::{
    compute_invariants, curvature_k, curvature_residue_general, cylinder_curvature, enclosed_volume,
    lawson_puncture_jets, minkowski_volume, normalize_geometry, tau_expansion,
};
use lawson_core::monodromy::Numerics;
use lawson_core::potential::SurfaceParams;
use lawson_core::solver::{solve, SolverConfig};
use lawson_core::Serial;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI};

fn cfg() -> SolverConfig {
    SolverConfig { numerics: Numerics { samples: 64, ..Numerics::default() }, ..SolverConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn two_routes_to_k_agree(k in prop::sample::select(vec![3u32, 4, 6]), phi in 0.6..1.0f64) {
        let sol = solve(SurfaceParams::new(k, phi).unwrap(), &cfg(), &Serial).unwrap();
        let jet = tau_expansion(&sol.coeffs, 1e-10).unwrap();
        let data = lawson_puncture_jets(&jet, k, phi).unwrap();
        let residue = curvature_residue_general(&data).unwrap();
        prop_assert!((residue - curvature_k(&jet)).norm() < 1e-12);
        let inv = compute_invariants(&sol).unwrap();
        let (v, vi) = enclosed_volume(inv.area, &inv.jet).unwrap();
        let (m, mi) = minkowski_volume(inv.area, inv.k).unwrap();
        prop_assert!((v - m).abs() < 1e-12 && vi.abs() < 1e-9 && mi.abs() < 1e-9);
        let p1 = sol.half_traces.p[0].re;
        prop_assert!((p1 + (2.0 * PI * sol.params.t()).sin()).abs() < 1e-8);
    }
}

proptest! {
    #[test]
    fn normalization_is_covariant(a in 0.1..10.0f64, v in 0.01..5.0f64, l in 0.1..3.0f64, s in 0.2..5.0f64) {
        let (a1, v1, _) = normalize_geometry(a, v, l).unwrap();
        let (a2, v2, _) = normalize_geometry(a * s * s, v * s * s * s, l * s).unwrap();
        prop_assert!((a1 - a2).abs() <= 1e-12 * a1);
        prop_assert!((v1 - v2).abs() <= 1e-12 * v1);
    }

    #[test]
    fn flat_cylinder_curvature(h in 0.1..20.0f64) {
        let (exact, quad) = cylinder_curvature(h).unwrap();
        prop_assert!((exact - quad).norm() < 1e-10);
        let (vol, _) = minkowski_volume(h * PI / 2.0, quad).unwrap();
        prop_assert!((vol - h * PI / 8.0).abs() < 1e-10);
    }
}

#[test]
fn round_cylinder_values() {
    let sol = solve(SurfaceParams::new(2, FRAC_PI_4).unwrap(), &cfg(), &Serial).unwrap();
    let inv = compute_invariants(&sol).unwrap();
    assert!((inv.area - PI * PI).abs() < 1e-8);
    assert!((inv.volume - PI * PI / 4.0).abs() < 1e-6);
    assert_eq!(inv.lattice.basis.len(), 1);
}

#[test]
fn lattice_shapes() {
    for (k, angle) in [(3, PI / 3.0), (4, PI / 2.0), (6, PI / 3.0)] {
        let sol = solve(SurfaceParams::new(k, FRAC_PI_4).unwrap(), &cfg(), &Serial).unwrap();
        let lat = compute_invariants(&sol).unwrap().lattice;
        assert!((lat.angle().unwrap() - angle).abs() < 1e-6, "k = {k}");
        let (a, b) = (lat.basis[0], lat.basis[1]);
        let ratio = (b[1].hypot(b[2])) / (a[1].hypot(a[2]));
        assert!((ratio - 1.0).abs() < 1e-6, "k = {k}: basis lengths differ");
    }
}
