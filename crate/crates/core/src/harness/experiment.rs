//! Seeded Monte Carlo sweeps over missing-pulse count and SNR.
//!
//! Every trial draws its target, pulse schedule and noise from a child seed
//! derived from `(seed, missing_count, trial)` alone, so results for one sweep
//! point do not depend on which other points are run, in what order, or on
//! how many worker threads are used.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::io::load_profile;
use super::spec::{ExperimentSpec, TargetSpec};
use crate::echo::{build_trm, random_missing_schedule, NoiseModel, PulseSchedule, RangeProfile, Trm};
use crate::error::{Error, Result};
use crate::metrics::{peak_sidelobe_db, similarity, SIDELOBE_FLOOR_DB};
use crate::seed::derive_seed;
use crate::sensing::{build_sensing_system, SensingSystem};
use crate::solvers::{
    solve_least_squares, solve_sparse_l1, solve_stretch_idft, Method, RecoveryResult,
};

/// Environment variable capping the worker pool (0 or unset = all cores).
pub const THREADS_ENV: &str = "SFR_THREADS";

const TARGET_STREAM: u64 = 1;
const SCHEDULE_STREAM: u64 = 2;
const NOISE_STREAM: u64 = 3;

/// Mainlobe halfwidth, in cells, used for the sidelobe column.
pub const SIDELOBE_HALFWIDTH: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// Child seed of the trial.
    pub seed: u64,
    pub missing_count: usize,
    pub snr_db: f64,
    pub trial: usize,
    pub method: Method,
    pub similarity: f64,
    pub rel_l2_error: f64,
    pub peak_sidelobe_db: f64,
    pub residual_l2: f64,
    pub epsilon: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Content hash of the observation the method consumed.
    pub y_hash: String,
    pub wall_time_s: f64,
}

pub const TRIALS_CSV_HEADER: &str = "seed,missing_count,snr_db,trial,method,similarity,rel_l2_error,\
peak_sidelobe_db,residual_l2,epsilon,iterations,converged,y_hash,wall_time_s";

impl TrialRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:e},{},{:e},{:e},{},{},{},{:.6}",
            self.seed,
            self.missing_count,
            self.snr_db,
            self.trial,
            self.method,
            self.similarity,
            self.rel_l2_error,
            self.peak_sidelobe_db,
            self.residual_l2,
            self.epsilon,
            self.iterations,
            self.converged,
            self.y_hash,
            self.wall_time_s
        )
    }
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    out.push_str(TRIALS_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

pub fn write_trials_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    fs::write(path, trials_csv(records)).map_err(|e| Error::io(path, e))
}

/// SHA-256 (first 16 hex digits) of little-endian `re, im` pairs.
pub fn observation_hash<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> String {
    let mut hasher = Sha256::new();
    for v in values {
        hasher.update(v.re.to_le_bytes());
        hasher.update(v.im.to_le_bytes());
    }
    let digest = hasher.finalize();
    hex::encode(&digest[..8])
}

/// Child seed of one trial.
pub fn trial_seed(seed: u64, missing_count: usize, trial: usize) -> u64 {
    derive_seed(seed, &[missing_count as u64, trial as u64])
}

/// Target source resolved once per experiment.
#[derive(Debug, Clone)]
pub enum PreparedTarget {
    Synthetic { n_scatterers: usize },
    Fixed(RangeProfile),
}

impl PreparedTarget {
    pub fn new(spec: &ExperimentSpec) -> Result<Self> {
        Ok(match &spec.target {
            TargetSpec::SyntheticSparse { n_scatterers } => PreparedTarget::Synthetic {
                n_scatterers: *n_scatterers,
            },
            TargetSpec::FromFile { path } => PreparedTarget::Fixed(load_profile(path, &spec.radar)?),
        })
    }

    fn draw(&self, spec: &ExperimentSpec, child: u64) -> Result<RangeProfile> {
        match self {
            PreparedTarget::Synthetic { n_scatterers } => {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(child, &[TARGET_STREAM]));
                RangeProfile::random_sparse(&spec.radar, *n_scatterers, &mut rng)
            }
            PreparedTarget::Fixed(profile) => Ok(profile.clone()),
        }
    }
}

/// Everything produced by one trial at one SNR.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub truth: RangeProfile,
    pub schedule: PulseSchedule,
    pub trm: Trm,
    pub results: Vec<(RecoveryResult, TrialRecord)>,
}

fn run_method(method: &Method, spec: &ExperimentSpec, sys: &SensingSystem, trm: &Trm) -> Result<(RecoveryResult, String)> {
    match method {
        Method::SparseL1 => Ok((solve_sparse_l1(sys, &spec.solver_opts)?, observation_hash(sys.y.iter()))),
        Method::LeastSquares => Ok((solve_least_squares(sys, &spec.solver_opts)?, observation_hash(sys.y.iter()))),
        // Column-major TRM storage is the observation order.
        Method::StretchIdft => Ok((
            solve_stretch_idft(trm, &spec.radar, &spec.shape())?,
            observation_hash(trm.data.iter()),
        )),
    }
}

/// Runs one trial: one target, schedule and noise realization, every
/// requested method.
pub fn run_trial(
    spec: &ExperimentSpec,
    target: &PreparedTarget,
    missing_count: usize,
    snr_db: f64,
    trial: usize,
) -> Result<TrialOutcome> {
    let child = trial_seed(spec.seed, missing_count, trial);
    let truth = target.draw(spec, child)?;
    let schedule = random_missing_schedule(
        spec.radar.n_pulses,
        missing_count,
        derive_seed(child, &[SCHEDULE_STREAM]),
    )?;
    let noise = snr_db
        .is_finite()
        .then(|| NoiseModel::new(snr_db, derive_seed(child, &[NOISE_STREAM])));
    let shape = spec.shape();
    let trm = build_trm(&truth, &shape, &schedule, noise.as_ref())?;
    let sys = build_sensing_system(&spec.radar, &shape, &schedule, &trm)?;

    let mut results = Vec::with_capacity(spec.solvers.len());
    for method in &spec.solvers {
        let started = Instant::now();
        let (result, y_hash) = run_method(method, spec, &sys, &trm)?;
        let wall_time_s = started.elapsed().as_secs_f64();
        let estimate = RangeProfile::new(&spec.radar, result.h_est.clone())?;
        let report = similarity(&truth, &estimate)?;
        let psl = if estimate.values.norm() > 0.0 {
            peak_sidelobe_db(&estimate, SIDELOBE_HALFWIDTH)?
        } else {
            SIDELOBE_FLOOR_DB
        };
        let record = TrialRecord {
            seed: child,
            missing_count,
            snr_db,
            trial,
            method: *method,
            similarity: report.similarity,
            rel_l2_error: report.rel_l2_error,
            peak_sidelobe_db: psl,
            residual_l2: result.residual_l2,
            epsilon: result.epsilon_used,
            iterations: result.iterations,
            converged: result.converged,
            y_hash,
            wall_time_s,
        };
        results.push((result, record));
    }
    Ok(TrialOutcome {
        truth,
        schedule,
        trm,
        results,
    })
}

/// Worker count from `SFR_THREADS`; 0 means one per core.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    run_experiment_with_threads(spec, threads_from_env())
}

/// Runs the full sweep on a pool of `threads` workers (0 = one per core).
/// Records come back sorted by (missing count, SNR, trial, method).
pub fn run_experiment_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let target = PreparedTarget::new(spec)?;
    let jobs: Vec<(usize, f64, usize)> = spec
        .sweep
        .iter()
        .flat_map(|&missing| {
            spec.snr_db.iter().flat_map(move |&snr| {
                (0..spec.trials_per_point).map(move |trial| (missing, snr, trial))
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<Vec<TrialRecord>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(missing, snr, trial)| {
                run_trial(spec, &target, missing, snr, trial)
                    .map(|o| o.results.into_iter().map(|(_, r)| r).collect())
            })
            .collect()
    });
    let mut records = Vec::new();
    for outcome in outcomes {
        records.extend(outcome?);
    }
    records.sort_by(|a, b| {
        a.missing_count
            .cmp(&b.missing_count)
            .then(a.snr_db.total_cmp(&b.snr_db))
            .then(a.trial.cmp(&b.trial))
            .then(a.method.cmp(&b.method))
    });
    Ok(records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub missing_count: usize,
    pub snr_db: f64,
    pub method: Method,
    pub trials: usize,
    pub mean_similarity: f64,
    pub mean_rel_l2_error: f64,
    pub mean_peak_sidelobe_db: f64,
}

/// Per (missing count, SNR, method) means.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(usize, u64, Method), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        // Bit pattern keys order correctly for the non-negative and infinite
        // SNRs used here, but sort explicitly below anyway.
        groups
            .entry((r.missing_count, r.snr_db.to_bits(), r.method))
            .or_default()
            .push(r);
    }
    let mut rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((missing_count, snr_bits, method), group)| {
            let n = group.len() as f64;
            let mean = |f: fn(&TrialRecord) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / n;
            SummaryRow {
                missing_count,
                snr_db: f64::from_bits(snr_bits),
                method,
                trials: group.len(),
                mean_similarity: mean(|r| r.similarity),
                mean_rel_l2_error: mean(|r| r.rel_l2_error),
                mean_peak_sidelobe_db: mean(|r| r.peak_sidelobe_db),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.missing_count
            .cmp(&b.missing_count)
            .then(a.snr_db.total_cmp(&b.snr_db))
            .then(a.method.cmp(&b.method))
    });
    rows
}
