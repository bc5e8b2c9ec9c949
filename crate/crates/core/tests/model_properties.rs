use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfr_core::metrics::similarity;
use sfr_core::*;

fn reference() -> (RadarConfig, PulseShape) {
    let cfg = RadarConfig::default();
    (cfg, PulseShape::ideal(cfg.pulse_bandwidth))
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

#[test]
fn projection_row_matches_echo_synthesis() {
    let (cfg, shape) = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let h = RangeProfile::new(&cfg, random_complex(&mut rng, cfg.n_cells())).unwrap();
        let c_m = rng.random_range(0..cfg.n_pulses);
        let tau = rng.random::<f64>() * 8.0e-7;
        let row = projection_row(&cfg, &shape, c_m, tau).unwrap();
        let inner: Complex64 = row.iter().zip(h.values.iter()).map(|(a, b)| a * b).sum();
        let direct = synthesize_echo_sample(&h, &shape, c_m, tau).unwrap();
        assert!((inner - direct).norm() <= 1e-12 * direct.norm().max(1e-300));
    }
}

#[test]
fn adjoint_consistency() {
    let (cfg, shape) = reference();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let schedule = random_missing_schedule(32, 12, 5).unwrap();
    let trm = build_trm(&RangeProfile::zeros(&cfg), &shape, &schedule, None).unwrap();
    let sys = build_sensing_system(&cfg, &shape, &schedule, &trm).unwrap();
    for _ in 0..20 {
        let h = random_complex(&mut rng, sys.n_cols());
        let y = random_complex(&mut rng, sys.n_rows());
        let lhs = y.dotc(&sys.apply(&h));
        let rhs = sys.adjoint(&y).dotc(&h);
        assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm());
    }
}

#[test]
fn no_dead_columns() {
    let (cfg, shape) = reference();
    let schedule = random_missing_schedule(32, 12, 6).unwrap();
    let trm = build_trm(&RangeProfile::zeros(&cfg), &shape, &schedule, None).unwrap();
    let sys = build_sensing_system(&cfg, &shape, &schedule, &trm).unwrap();
    for p in 0..sys.n_cols() {
        let norm = sys.phi.column(p).norm();
        assert!(norm.is_finite() && norm > 0.0, "column {p}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trm_is_linear(seed in any::<u64>(), a_re in -3.0..3.0f64, a_im in -3.0..3.0f64, b_re in -3.0..3.0f64) {
        let (cfg, shape) = reference();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schedule = random_missing_schedule(32, rng.random_range(0..32), rng.random()).unwrap();
        let h1 = RangeProfile::random_sparse(&cfg, 12, &mut rng).unwrap();
        let h2 = RangeProfile::random_sparse(&cfg, 12, &mut rng).unwrap();
        let a = Complex64::new(a_re, a_im);
        let b = Complex64::new(b_re, 0.5);
        let mix = RangeProfile::new(&cfg, &h1.values * a + &h2.values * b).unwrap();
        let e1 = build_trm(&h1, &shape, &schedule, None).unwrap();
        let e2 = build_trm(&h2, &shape, &schedule, None).unwrap();
        let em = build_trm(&mix, &shape, &schedule, None).unwrap();
        let combined = &e1.data * a + &e2.data * b;
        let scale = combined.norm().max(1e-300);
        prop_assert!((em.data - combined).norm() <= 1e-12 * scale);
    }

    #[test]
    fn row_deletion_matches_direct_build(seed in any::<u64>(), missing in 0usize..32) {
        let (cfg, shape) = reference();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schedule = random_missing_schedule(32, missing, rng.random()).unwrap();
        let h = RangeProfile::random_sparse(&cfg, 20, &mut rng).unwrap();
        let full = build_trm(&h, &shape, &PulseSchedule::full(32), None).unwrap();
        let direct = build_trm(&h, &shape, &schedule, None).unwrap();
        prop_assert_eq!(full.select_pulses(&schedule).unwrap().data, direct.data);
    }

    #[test]
    fn operator_matches_trm(seed in any::<u64>()) {
        let (cfg, shape) = reference();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schedule = random_missing_schedule(32, 12, rng.random()).unwrap();
        let h = RangeProfile::random_sparse(&cfg, 24, &mut rng).unwrap();
        let trm = build_trm(&h, &shape, &schedule, None).unwrap();
        let sys = build_sensing_system(&cfg, &shape, &schedule, &trm).unwrap();
        prop_assert!((sys.apply(&h.values) - &sys.y).norm() <= 1e-12 * sys.y.norm());
    }

    #[test]
    fn similarity_symmetric_and_bounded(seed in any::<u64>(), k1 in 1usize..40, k2 in 1usize..40) {
        let (cfg, _) = reference();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = RangeProfile::random_sparse(&cfg, k1, &mut rng).unwrap();
        let b = RangeProfile::random_sparse(&cfg, k2, &mut rng).unwrap();
        let ab = similarity(&a, &b).unwrap().similarity;
        let ba = similarity(&b, &a).unwrap().similarity;
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn similarity_invariant_to_complex_scale(seed in any::<u64>(), re in -5.0..5.0f64, im in -5.0..5.0f64) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let (cfg, _) = reference();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = RangeProfile::random_sparse(&cfg, 24, &mut rng).unwrap();
        let scaled = RangeProfile::new(&cfg, &h.values * Complex64::new(re, im)).unwrap();
        prop_assert!((similarity(&h, &scaled).unwrap().similarity - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn carrier_steps_are_constant(n in 1usize..32) {
        let cfg = RadarConfig::default();
        let step = carrier_frequency(&cfg, n).unwrap() - carrier_frequency(&cfg, n - 1).unwrap();
        prop_assert!(step > 0.0);
        prop_assert!((step - cfg.delta_f).abs() <= 1e-6 * cfg.delta_f);
    }
}
