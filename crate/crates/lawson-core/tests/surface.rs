use lawson_core::invariants::compute_invariants;
use lawson_core::linalg::{c, Mat2, C64};
use lawson_core::loops::{circle, MatrixSamples};
use lawson_core::monodromy::Numerics;
use lawson_core::potential::SurfaceParams;
use lawson_core::solver::{solve, SolverConfig};
use lawson_core::surface::{build_patch, extend_symmetry, fit_boundary_planes, iwasawa, mesh_geometry, MeshConfig};
use lawson_core::Serial;
use proptest::prelude::*;

fn laurent(cs: &[(f64, f64)], lam: C64) -> C64 {
    let deg = (cs.len() / 2) as i32;
    cs.iter().zip(-deg..).map(|(&(a, b), m)| c(a, b) * lam.powi(m)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iwasawa_of_random_loops(
        up in prop::collection::vec((-0.5..0.5f64, -0.5..0.5f64), 5),
        low in prop::collection::vec((-0.5..0.5f64, -0.5..0.5f64), 5),
        d in (0.5..2.0f64, -0.5..0.5f64),
    ) {
        let d = c(d.0, d.1);
        let phi = MatrixSamples(
            circle(64)
                .into_iter()
                .map(|l| {
                    let u = Mat2::new(c(1.0, 0.0), laurent(&up, l), c(0.0, 0.0), c(1.0, 0.0));
                    let v = Mat2::new(c(1.0, 0.0), c(0.0, 0.0), laurent(&low, l), c(1.0, 0.0));
                    u * v * Mat2::diag(d, d.inv())
                })
                .collect(),
        );
        let f = iwasawa(&phi, 20).unwrap();
        prop_assert!(f.unitarity_defect() <= 1e-10);
        prop_assert!(f.negative_mass(&phi) <= 1e-10);
        prop_assert!(f.reconstruction_error(&phi) <= 1e-9);
        let b0 = f.b_at_zero();
        prop_assert!(b0.at(1, 0).norm() < 1e-10 && b0.at(0, 0).im.abs() < 1e-10 && b0.at(0, 0).re > 0.0);
    }
}

#[test]
fn counterexample_mesh() {
    let cfg = SolverConfig { numerics: Numerics { samples: 64, ..Numerics::default() }, ..SolverConfig::default() };
    let sol = solve(SurfaceParams::new(3, 1.454838491).unwrap(), &cfg, &Serial).unwrap();
    let inv = compute_invariants(&sol).unwrap();
    let t = sol.params.t();
    let s = inv.scale;
    let mut errors = Vec::new();
    for res in [13, 26, 64] {
        let patch = build_patch(&sol, &inv.unitarizer, &MeshConfig { resolution: res, ..Default::default() }, &Serial).unwrap();
        assert!(patch.skew_defect <= 1e-8);
        assert!(patch.unitarity_defect <= 1e-10);
        if res == 26 {
            assert_eq!(patch.triangles.len(), 2236);
        }
        let planes = fit_boundary_planes(&patch, t).unwrap();
        assert!(planes.max_residual() < 1e-8, "plane residual {:e}", planes.max_residual());
        assert!(planes.angle_errors.iter().all(|a| *a < 1e-8));
        let mesh = extend_symmetry(&patch, t, &inv.lattice).unwrap();
        assert_eq!(mesh.copies, 24);
        let (a, v) = mesh_geometry(&mesh).unwrap();
        let (a, v) = (a * s * s, v * s * s * s);
        errors.push(((a - inv.area_normalized).abs(), (v - inv.volume_normalized).abs()));
        if res == 64 {
            // Triangulations overestimate area and underestimate volume.
            assert!(a >= inv.area_normalized - 1e-5 && v <= inv.volume_normalized + 1e-5);
            assert!(a < 1.73193);
        }
    }
    for w in errors.windows(2) {
        assert!(w[1].0 < w[0].0 && w[1].1 < w[0].1, "errors {errors:?}");
    }
}
