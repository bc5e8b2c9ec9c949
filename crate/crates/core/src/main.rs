use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sfr_core::harness::experiment::{run_trial, summarize, write_trials_csv, PreparedTarget};
use sfr_core::harness::io::{export_profile, export_result, load_trm_file, write_trm_file};
use sfr_core::harness::{run_experiment, selftest, ExperimentSpec};
use sfr_core::sensing::build_sensing_system;
use sfr_core::solvers::{solve_least_squares, solve_sparse_l1, solve_stretch_idft, EpsilonRule, Method};
use sfr_core::{range_axis, Error, PulseSchedule, Result};

#[derive(Parser)]
#[command(name = "sfr", version, about = "Stepped-frequency radar range profiling with missing pulses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment file (TOML). Built-in reference setup when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial and dump the truth and reconstructed profiles.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Restrict to one method (sparse-l1, least-squares, stretch-idft).
        #[arg(long)]
        method: Option<Method>,
    },
    /// Run the configured sweep and write trials.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Restrict to one method.
        #[arg(long)]
        method: Option<Method>,
    },
    /// Reconstruct a profile from a recorded TRM file.
    Recover {
        #[command(flatten)]
        common: Common,
        /// TRM file to load.
        #[arg(long)]
        trm: PathBuf,
        /// Comma-separated carrier indices of the TRM rows; all pulses when omitted.
        #[arg(long, value_delimiter = ',')]
        pulses: Option<Vec<usize>>,
        #[arg(long, default_value = "sparse-l1")]
        method: Method,
        /// Explicit data-fit bound for sparse recovery.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run the built-in invariant checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn load_spec(common: &Common, method: Option<Method>) -> Result<ExperimentSpec> {
    let mut spec = match &common.config {
        Some(path) => ExperimentSpec::from_toml_file(path)?,
        None => ExperimentSpec::default(),
    };
    if let Some(seed) = common.seed {
        spec.seed = seed;
    }
    if let Some(method) = method {
        spec.solvers = vec![method];
    }
    spec.validate()?;
    Ok(spec)
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn simulate(common: Common, method: Option<Method>) -> Result<()> {
    let spec = load_spec(&common, method)?;
    create_dir(&common.out)?;
    let target = PreparedTarget::new(&spec)?;
    let missing = spec.sweep[0];
    let snr = spec.snr_db[0];
    let outcome = run_trial(&spec, &target, missing, snr, 0)?;
    let axis = range_axis(&spec.radar)?;
    export_profile(outcome.truth.values.as_slice(), &axis, &common.out.join("truth.csv"))?;
    write_trm_file(&common.out.join("trm.sfrtrm"), &outcome.trm, spec.radar.delta_t)?;
    println!(
        "missing={missing} snr_db={snr} valid_pulses={:?}",
        outcome.schedule.valid_indices()
    );
    for (result, record) in &outcome.results {
        let path = common.out.join(format!("{}.csv", result.method));
        export_result(result, &axis, &path)?;
        println!(
            "{:<14} similarity={:.4} rel_l2={:.4} psl_db={:.2} residual={:.3e} converged={}",
            record.method.name(),
            record.similarity,
            record.rel_l2_error,
            record.peak_sidelobe_db,
            record.residual_l2,
            record.converged
        );
    }
    Ok(())
}

fn sweep(common: Common, method: Option<Method>) -> Result<()> {
    let spec = load_spec(&common, method)?;
    create_dir(&common.out)?;
    let records = run_experiment(&spec)?;
    let path = common.out.join("trials.csv");
    write_trials_csv(&records, &path)?;
    println!("missing  snr_db  method          trials  similarity  rel_l2   psl_db");
    for row in summarize(&records) {
        println!(
            "{:>7}  {:>6}  {:<14}  {:>6}  {:>10.4}  {:>6.3}  {:>7.2}",
            row.missing_count,
            row.snr_db,
            row.method.name(),
            row.trials,
            row.mean_similarity,
            row.mean_rel_l2_error,
            row.mean_peak_sidelobe_db
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn recover(
    common: Common,
    trm_path: PathBuf,
    pulses: Option<Vec<usize>>,
    method: Method,
    epsilon: Option<f64>,
) -> Result<()> {
    let mut spec = load_spec(&common, None)?;
    if let Some(eps) = epsilon {
        spec.solver_opts.epsilon_rule = EpsilonRule::Explicit(eps);
    }
    let n = spec.radar.n_pulses;
    let schedule = match pulses {
        Some(list) => PulseSchedule::new(n, list)?,
        None => PulseSchedule::full(n),
    };
    let shape = spec.shape();
    let trm = load_trm_file(&trm_path, &spec.radar, &schedule)?;
    let result = match method {
        Method::StretchIdft => solve_stretch_idft(&trm, &spec.radar, &shape)?,
        Method::SparseL1 | Method::LeastSquares => {
            let sys = build_sensing_system(&spec.radar, &shape, &schedule, &trm)?;
            if method == Method::SparseL1 {
                solve_sparse_l1(&sys, &spec.solver_opts)?
            } else {
                solve_least_squares(&sys, &spec.solver_opts)?
            }
        }
    };
    create_dir(&common.out)?;
    let path = common.out.join(format!("{method}.csv"));
    export_result(&result, &range_axis(&spec.radar)?, &path)?;
    println!(
        "{method}: residual={:.4e} epsilon={:.4e} iterations={} converged={} degraded={}",
        result.residual_l2, result.epsilon_used, result.iterations, result.converged, result.degraded
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { common, method } => simulate(common, method),
        Command::Sweep { common, method } => sweep(common, method),
        Command::Recover {
            common,
            trm,
            pulses,
            method,
            epsilon,
        } => recover(common, trm, pulses, method, epsilon),
        Command::Selftest { seed } => {
            let checks = selftest::run(seed);
            let mut failed = 0;
            for c in &checks {
                println!("[{}] {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                Err(Error::Solver(format!("{failed} self-test check(s) failed")))
            } else {
                Ok(())
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
