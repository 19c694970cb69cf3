use lawson_core::linalg::{c, Mat2};
use lawson_core::loops::{circle, fit_coefficients};
use lawson_core::potential::{build_eta, cal_k, central_value, PotentialCoeffs, SurfaceParams};
use proptest::prelude::*;

fn coeffs_near_central(k: u32, phi: f64, noise: &[f64]) -> PotentialCoeffs {
    let params = SurfaceParams::new(k, phi).unwrap();
    let cv = central_value(params, 4).unwrap();
    let mut xs: Vec<Vec<f64>> = cv.x().iter().map(|l| l.coeffs()[1..].to_vec()).collect();
    for (i, d) in noise.iter().enumerate() {
        xs[i % 3][i / 3] += d;
    }
    PotentialCoeffs::from_parts(params, cv.r() * (1.0 + noise[0]), [&xs[0], &xs[1], &xs[2]]).unwrap()
}

proptest! {
    #[test]
    fn residue_in_lambda_is_nilpotent(
        k in prop::sample::select(vec![2u32, 3, 4, 6]),
        phi in 0.3..1.3f64,
        noise in prop::collection::vec(-0.3..0.3f64, 15),
        zr in -0.9..0.9f64,
        zi in -0.9..0.9f64,
    ) {
        let pc = coeffs_near_central(k, phi, &noise);
        let lam = circle(32);
        let eta = build_eta(c(zr, zi), &pc, &lam).unwrap();
        let entry = |i: usize, j: usize| {
            let s: Vec<_> = eta.iter().map(|m| m.at(i, j)).collect();
            fit_coefficients(&s, -1, 4).unwrap().coeff(-1)
        };
        let res = Mat2::new(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1));
        prop_assert!(res.det().norm() <= 1e-12 * (1.0 + res.max_abs().powi(2)));
    }

    #[test]
    fn central_value_has_unit_cal_k(k in 2u32..12, phi in 0.1..1.45f64, n in 1usize..24) {
        let cv = central_value(SurfaceParams::new(k, phi).unwrap(), n).unwrap();
        let kk = cal_k(&cv);
        for m in kk.lo()..=kk.hi() {
            let want = if m == 0 { 1.0 } else { 0.0 };
            prop_assert!((kk.coeff(m) - c(want, 0.0)).norm() < 1e-13);
        }
    }
}
