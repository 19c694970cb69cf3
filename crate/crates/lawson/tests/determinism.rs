use lawson::cli::{cmd_solve, NumericArgs, SolveArgs};
use lawson::validate::random_unimodular_loop;
use lawson::{Pool, RunConfig};
use lawson_core::monodromy::{compute_pq, Numerics};
use lawson_core::potential::{central_value, SurfaceParams};
use lawson_core::surface::iwasawa;
use lawson_core::{Executor, Serial};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn solve_json(threads: usize) -> Vec<u8> {
    let d = RunConfig::default();
    let args = SolveArgs {
        k: 4,
        phi: 0.9,
        continuation: false,
        numerics: NumericArgs { order: 16, rk_steps: 300, samples: 64, tol: d.newton_tol, puncture_eps: d.puncture_eps },
        out: None,
    };
    let mut out = Vec::new();
    cmd_solve(&args, &Pool::new(threads).unwrap(), &mut out).unwrap();
    out
}

#[test]
fn solution_json_is_independent_of_parallelism() {
    let one = solve_json(1);
    assert!(!one.is_empty());
    assert_eq!(one, solve_json(4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn executors_agree_bitwise(threads in 1usize..6, phi in 0.4..1.2f64) {
        let num = Numerics { samples: 32, rk_steps: 100, ..Numerics::fast() };
        let cv = central_value(SurfaceParams::new(3, phi).unwrap(), num.order).unwrap();
        let a = compute_pq(&cv, &num, &Serial).unwrap();
        let b = compute_pq(&cv, &num, &Pool::new(threads).unwrap()).unwrap();
        prop_assert_eq!(a.p, b.p);
        prop_assert_eq!(a.q, b.q);
        let order: Vec<usize> = Pool::new(threads).unwrap().map(100, |i| i * i);
        prop_assert_eq!(order, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn random_loops_factor(seed in any::<u64>()) {
        let phi = random_unimodular_loop(&mut ChaCha8Rng::seed_from_u64(seed), 64);
        for m in &phi.0 {
            prop_assert!((m.det() - 1.0).norm() < 1e-12);
        }
        let f = iwasawa(&phi, 20).unwrap();
        prop_assert!(f.unitarity_defect() <= 1e-10);
        prop_assert!(f.negative_mass(&phi) <= 1e-10);
        prop_assert!(f.reconstruction_error(&phi) <= 1e-9);
    }
}
