//! Experiment configuration and its TOML file form.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::radar::{PulseKind, PulseShape, RadarConfig, SPEED_OF_LIGHT};
use crate::solvers::{Method, SolverOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    /// Scatterers at distinct uniformly drawn cells, unit-mean Rayleigh
    /// magnitudes, uniform phases.
    SyntheticSparse { n_scatterers: usize },
    /// Profile CSV in the export format.
    FromFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub radar: RadarConfig,
    pub pulse_shape: PulseKind,
    pub target: TargetSpec,
    /// Missing-pulse counts.
    pub sweep: Vec<usize>,
    /// SNR points in dB; `+inf` means noiseless.
    pub snr_db: Vec<f64>,
    pub trials_per_point: usize,
    pub seed: u64,
    pub solvers: Vec<Method>,
    pub solver_opts: SolverOptions,
}

impl Default for ExperimentSpec {
    /// The reference simulation: default radar, 12 of 32 pulses missing,
    /// 15 dB SNR, 24-scatterer synthetic target.
    fn default() -> Self {
        Self {
            radar: RadarConfig::default(),
            pulse_shape: PulseKind::IdealSinc,
            target: TargetSpec::SyntheticSparse { n_scatterers: 24 },
            sweep: vec![12],
            snr_db: vec![15.0],
            trials_per_point: 1,
            seed: 1,
            solvers: vec![Method::SparseL1, Method::LeastSquares],
            solver_opts: SolverOptions::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn shape(&self) -> PulseShape {
        PulseShape {
            kind: self.pulse_shape,
            bandwidth: self.radar.pulse_bandwidth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.radar.validate()?;
        self.shape().validate()?;
        self.solver_opts.validate()?;
        if self.trials_per_point < 1 {
            return Err(Error::Config("trials_per_point must be >= 1".into()));
        }
        if self.sweep.is_empty() {
            return Err(Error::Config("sweep must list at least one missing-pulse count".into()));
        }
        if let Some(&bad) = self.sweep.iter().find(|&&m| m >= self.radar.n_pulses) {
            return Err(Error::Config(format!(
                "sweep value {bad} outside [0, {}]",
                self.radar.n_pulses - 1
            )));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("snr_db must list at least one value".into()));
        }
        if let Some(bad) = self.snr_db.iter().find(|v| v.is_nan() || **v == f64::NEG_INFINITY) {
            return Err(Error::Config(format!("invalid snr_db {bad}")));
        }
        if self.solvers.is_empty() {
            return Err(Error::Config("no solvers selected".into()));
        }
        if let TargetSpec::SyntheticSparse { n_scatterers } = self.target {
            if n_scatterers == 0 || n_scatterers > self.radar.n_cells() {
                return Err(Error::Config(format!(
                    "n_scatterers must lie in [1, {}], got {n_scatterers}",
                    self.radar.n_cells()
                )));
            }
        }
        Ok(())
    }

    /// Parses a TOML experiment file. Relative target paths resolve against
    /// the file's directory.
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { reason, .. } => Error::Parse {
                path: path.to_path_buf(),
                reason,
            },
            other => other,
        })?;
        if let TargetSpec::FromFile { path: target } = &mut spec.target {
            if target.is_relative() {
                if let Some(dir) = path.parent() {
                    *target = dir.join(&*target);
                }
            }
        }
        Ok(spec)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SpecFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<config>"),
            reason: e.to_string(),
        })?;
        let spec = file.into_spec()?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadarSection {
    f_c: Option<f64>,
    delta_f: Option<f64>,
    n_pulses: Option<usize>,
    pulse_bandwidth: Option<f64>,
    /// Defaults to `1 / pulse_bandwidth`.
    delta_t: Option<f64>,
    q_start: Option<usize>,
    l_bins: Option<usize>,
    c_light: Option<f64>,
    pulse_shape: Option<PulseKind>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum TargetSection {
    SyntheticSparse { n_scatterers: usize },
    FromFile { path: PathBuf },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    seed: Option<u64>,
    trials_per_point: Option<usize>,
    sweep: Option<OneOrMany<usize>>,
    snr_db: Option<OneOrMany<f64>>,
    solvers: Option<Vec<Method>>,
    #[serde(default)]
    radar: RadarSection,
    target: Option<TargetSection>,
    solver: Option<SolverOptions>,
}

impl SpecFile {
    fn into_spec(self) -> Result<ExperimentSpec> {
        let base = ExperimentSpec::default();
        let r = self.radar;
        let d = base.radar;
        let pulse_bandwidth = r.pulse_bandwidth.unwrap_or(d.pulse_bandwidth);
        let radar = RadarConfig {
            f_c: r.f_c.unwrap_or(d.f_c),
            delta_f: r.delta_f.unwrap_or(d.delta_f),
            n_pulses: r.n_pulses.unwrap_or(d.n_pulses),
            pulse_bandwidth,
            delta_t: r.delta_t.unwrap_or(1.0 / pulse_bandwidth),
            q_start: r.q_start.unwrap_or(d.q_start),
            l_bins: r.l_bins.unwrap_or(d.l_bins),
            c_light: r.c_light.unwrap_or(SPEED_OF_LIGHT),
        };
        let target = match self.target {
            None => base.target,
            Some(TargetSection::SyntheticSparse { n_scatterers }) => {
                TargetSpec::SyntheticSparse { n_scatterers }
            }
            Some(TargetSection::FromFile { path }) => TargetSpec::FromFile { path },
        };
        Ok(ExperimentSpec {
            radar,
            pulse_shape: r.pulse_shape.unwrap_or(base.pulse_shape),
            target,
            sweep: self.sweep.map(OneOrMany::into_vec).unwrap_or(base.sweep),
            snr_db: self.snr_db.map(OneOrMany::into_vec).unwrap_or(base.snr_db),
            trials_per_point: self.trials_per_point.unwrap_or(base.trials_per_point),
            seed: self.seed.unwrap_or(base.seed),
            solvers: self.solvers.unwrap_or(base.solvers),
            solver_opts: self.solver.unwrap_or(base.solver_opts),
        })
    }
}
