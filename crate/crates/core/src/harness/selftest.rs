//! Quick invariant checks behind `sfr selftest`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::echo::{build_trm, random_missing_schedule, RangeProfile};
use crate::metrics::similarity;
use crate::radar::{range_axis, PulseShape, RadarConfig};
use crate::sensing::build_sensing_system;
use crate::solvers::{idft, solve_least_squares, solve_sparse_l1, EpsilonRule, SolverOptions};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, bound: f64) -> Check {
    Check {
        name,
        passed: value <= bound,
        detail: format!("{value:.3e} <= {bound:.1e}"),
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let cfg = RadarConfig::default();
    let shape = PulseShape::ideal(cfg.pulse_bandwidth);

    let spacing = range_axis(&cfg).map(|a| a[1] - a[0]).unwrap_or(f64::NAN);
    checks.push(check("range resolution 0.29277 m", (spacing - 0.29277).abs(), 1e-5));

    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let sched = random_missing_schedule(32, 12, rng.random()).expect("schedule");
        let h = RangeProfile::random_sparse(&cfg, 24, &mut rng).expect("profile");
        let trm = build_trm(&h, &shape, &sched, None).expect("trm");
        let sys = build_sensing_system(&cfg, &shape, &sched, &trm).expect("system");
        worst = worst.max((sys.apply(&h.values) - &sys.y).norm() / sys.y.norm());
    }
    checks.push(check("operator matches echo synthesis", worst, 1e-12));

    let sched = random_missing_schedule(32, 12, rng.random()).expect("schedule");
    let trm = build_trm(&RangeProfile::zeros(&cfg), &shape, &sched, None).expect("trm");
    let sys = build_sensing_system(&cfg, &shape, &sched, &trm).expect("system");
    let h = random_vector(&mut rng, sys.n_cols());
    let y = random_vector(&mut rng, sys.n_rows());
    let lhs = sys.apply(&h).dotc(&y);
    let rhs = h.dotc(&sys.adjoint(&y));
    checks.push(check("adjoint consistency", (lhs - rhs).norm() / lhs.norm(), 1e-10));

    let small = RadarConfig { l_bins: 4, ..cfg };
    let sched = random_missing_schedule(32, 12, rng.random()).expect("schedule");
    let h = RangeProfile::random_sparse(&small, 5, &mut rng).expect("profile");
    let trm = build_trm(&h, &shape, &sched, None).expect("trm");
    let sys = build_sensing_system(&small, &shape, &sched, &trm).expect("system");
    let opts = SolverOptions {
        epsilon_rule: EpsilonRule::Explicit(1e-6 * sys.y.norm()),
        ..Default::default()
    };
    match solve_sparse_l1(&sys, &opts) {
        Ok(res) => {
            checks.push(check(
                "noiseless sparse recovery",
                (&res.h_est - &h.values).norm() / h.values.norm(),
                1e-3,
            ));
            checks.push(check(
                "sparse residual within epsilon",
                res.residual_l2 / res.epsilon_used.max(f64::MIN_POSITIVE),
                1.001,
            ));
        }
        Err(e) => checks.push(Check {
            name: "noiseless sparse recovery",
            passed: false,
            detail: e.to_string(),
        }),
    }

    match solve_least_squares(&sys, &SolverOptions::default()) {
        Ok(res) => {
            let gram = sys.phi.ad_mul(&sys.phi);
            let rhs = sys.adjoint(&sys.y);
            let ridge = 1e-6 * crate::sensing::largest_eigenvalue(|x| &gram * x, gram.ncols());
            let lhs = &gram * &res.h_est + &res.h_est * Complex64::from(ridge);
            checks.push(check("least-squares normal equations", (lhs - &rhs).norm() / rhs.norm(), 1e-8));
        }
        Err(e) => checks.push(Check {
            name: "least-squares normal equations",
            passed: false,
            detail: e.to_string(),
        }),
    }

    let x: Vec<Complex64> = random_vector(&mut rng, 32).iter().copied().collect();
    let conj: Vec<Complex64> = x.iter().map(|v| v.conj()).collect();
    let n = x.len();
    let mut worst = 0.0_f64;
    for (k, got) in idft(&x).iter().enumerate() {
        let dft_k: Complex64 = conj
            .iter()
            .enumerate()
            .map(|(m, v)| v * Complex64::from_polar(1.0, -std::f64::consts::TAU * (m * k) as f64 / n as f64))
            .sum();
        worst = worst.max((got - dft_k.conj() / n as f64).norm());
    }
    checks.push(check("inverse DFT identity", worst, 1e-12));

    let h = RangeProfile::random_sparse(&cfg, 24, &mut rng).expect("profile");
    let rotated = RangeProfile::new(&cfg, &h.values * Complex64::new(-0.3, 2.2)).expect("profile");
    let s = similarity(&h, &rotated).map(|r| r.similarity).unwrap_or(0.0);
    checks.push(check("similarity scale invariance", (1.0 - s).abs(), 1e-12));

    checks
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        for c in super::run(3) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
