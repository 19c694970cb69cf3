use lawson_core::linalg::Mat2;
use lawson_core::monodromy::{compute_pq, half_traces, monodromies, Numerics};
use lawson_core::potential::{central_value, SurfaceParams};
use lawson_core::solver::{solve_from_central, SolverConfig};
use lawson_core::Serial;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI};

fn fast_cfg() -> SolverConfig {
    SolverConfig { numerics: Numerics { samples: 64, ..Numerics::default() }, ..SolverConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn transport_is_unimodular(k in prop::sample::select(vec![3u32, 4, 6]), phi in 0.4..1.3f64) {
        let num = Numerics { samples: 32, rk_steps: 200, ..Numerics::fast() };
        let cv = central_value(SurfaceParams::new(k, phi).unwrap(), num.order).unwrap();
        let tr = compute_pq(&cv, &num, &Serial).unwrap();
        for m in tr.p.iter().chain(&tr.q) {
            prop_assert!((m.det() - 1.0).norm() < 1e-10);
        }
        // tr(M2 M3) = 2 - 4 q^2 holds for any coefficients.
        let mono = monodromies(&tr).unwrap();
        let ht = half_traces(&tr, cv.params().t()).unwrap();
        for i in 0..tr.p.len() {
            let lhs = (mono.m[1][i] * mono.m[2][i]).tr();
            prop_assert!((lhs - (2.0 - 4.0 * ht.q[i] * ht.q[i])).norm() < 1e-10);
        }
    }
}

#[test]
fn rk4_converges_at_fourth_order() {
    let cv = central_value(SurfaceParams::new(3, FRAC_PI_4).unwrap(), 12).unwrap();
    let at = |steps: usize| {
        let num = Numerics { samples: 32, rk_steps: steps, grading: 0.0, ..Numerics::fast() };
        compute_pq(&cv, &num, &Serial).unwrap()
    };
    let err = |steps: usize| {
        let (a, b) = (at(steps), at(4 * steps));
        a.p.iter().zip(&b.p).chain(a.q.iter().zip(&b.q)).map(|(x, y)| (*x - *y).max_abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(20), err(40));
    let slope = (e1 / e2).log2();
    assert!((slope - 4.0).abs() <= 0.2, "observed order {slope} ({e1:e}, {e2:e})");
}

#[test]
fn solved_monodromy_relations() {
    let sol = solve_from_central(SurfaceParams::new(3, FRAC_PI_4).unwrap(), &fast_cfg(), &Serial).unwrap();
    let mono = monodromies(&sol.transport).unwrap();
    let ht = &sol.half_traces;
    for i in 0..sol.transport.p.len() {
        let lhs = (mono.m[0][i] * mono.m[2][i]).tr();
        assert!((lhs - (2.0 - 4.0 * ht.r[i] * ht.r[i])).norm() < 1e-9);
        for j in 0..3 {
            let sq = mono.l[j][i] * mono.l[j][i];
            assert!((sq + Mat2::IDENTITY).max_abs() < 1e-9, "L_{}^2 at sample {i}", j + 1);
        }
    }
    // At lambda = 1 the monodromies close up.
    assert!((mono.m[0][0] * mono.m[2][0] - Mat2::IDENTITY).max_abs() < 1e-9);
    assert!((mono.m[0][0] - mono.m[1][0]).max_abs() < 1e-9);
    assert!((ht.p[0].re + (2.0 * PI / 6.0).sin()).abs() < 1e-8);
    assert!(ht.q[0].norm() < 1e-10);
}
