use lawson_core::linalg::{c, Mat2, C64};
use lawson_core::loops::{circle, fit_coefficients, ComplexLoop, MatrixSamples, RealLoop};
use proptest::prelude::*;

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_len)
}

fn complex_loop(lo: i32, cs: &[(f64, f64)]) -> ComplexLoop {
    ComplexLoop::new(lo, cs.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
}

proptest! {
    #[test]
    fn fit_inverts_sampling(lo in -4i32..=0, cs in coeffs(9), extra in 0usize..6) {
        let l = complex_loop(lo, &cs);
        let n = 2 * l.max_degree() + 1 + extra;
        let s = l.samples(n).unwrap();
        let back = fit_coefficients(&s, l.lo(), l.hi()).unwrap();
        let scale = l.max_abs().max(1e-300);
        for m in l.lo()..=l.hi() {
            prop_assert!((back.coeff(m) - l.coeff(m)).norm() <= 1e-13 * scale.max(1.0));
        }
        // And the other way round: refitting reproduces the samples.
        let again = back.samples(n).unwrap();
        for (a, b) in again.iter().zip(&s) {
            prop_assert!((a - b).norm() <= 1e-13 * scale.max(1.0));
        }
    }

    #[test]
    fn star_is_an_involution_and_conjugates_samples(lo in -3i32..=0, re in prop::collection::vec(-1.0..1.0f64, 1..8)) {
        let l = RealLoop::new(lo, re).unwrap();
        prop_assert_eq!(l.star().star(), l.clone());
        let n = 2 * l.max_degree().max(l.star().max_degree()) + 1;
        let s = l.samples(n).unwrap();
        let st = l.star().samples(n).unwrap();
        for (a, b) in s.iter().zip(&st) {
            prop_assert!((a.conj() - b).norm() < 1e-13);
        }
    }

    #[test]
    fn tau_jet_obeys_leibniz(la in -3i32..=0, a in coeffs(6), lb in -3i32..=0, b in coeffs(6)) {
        let (x, y) = (complex_loop(la, &a), complex_loop(lb, &b));
        let (jx, jy, jxy) = (x.tau_jet(), y.tau_jet(), x.mul(&y).tau_jet());
        let want = [jx[0] * jy[0], jx[1] * jy[0] + jx[0] * jy[1], jx[2] * jy[0] + 2.0 * jx[1] * jy[1] + jx[0] * jy[2]];
        for (g, w) in jxy.iter().zip(&want) {
            prop_assert!((g - w).norm() <= 1e-12 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn matrix_samples_invert(entries in prop::collection::vec((-0.3..0.3f64, -0.3..0.3f64), 4 * 16)) {
        let e: Vec<C64> = entries.iter().map(|&(a, b)| c(a, b)).collect();
        let m = MatrixSamples(
            e.chunks(4).map(|q| Mat2::IDENTITY + Mat2::new(q[0], q[1], q[2], q[3])).collect(),
        );
        let prod = m.mul(&m.inv().unwrap());
        for p in &prod.0 {
            prop_assert!((*p - Mat2::IDENTITY).max_abs() < 1e-12);
        }
    }

    #[test]
    fn trace_is_cyclic(e in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 8 * 8)) {
        let e: Vec<C64> = e.iter().map(|&(a, b)| c(a, b)).collect();
        let mats: Vec<Mat2> = e.chunks(4).map(|q| Mat2::new(q[0], q[1], q[2], q[3])).collect();
        let (a, b) = mats.split_at(8);
        let (a, b) = (MatrixSamples(a.to_vec()), MatrixSamples(b.to_vec()));
        for (x, y) in a.mul(&b).tr().iter().zip(b.mul(&a).tr()) {
            prop_assert!((x - y).norm() < 1e-13 * 64.0);
        }
    }
}

#[test]
fn circle_starts_at_one() {
    let l = circle(8);
    assert_eq!(l[0], c(1.0, 0.0));
    assert!((l[2] - c(0.0, 1.0)).norm() < 1e-15);
}
