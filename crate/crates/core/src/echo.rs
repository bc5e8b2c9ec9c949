//! Echo synthesis for a stationary scene: target response matrix (TRM)
//! assembly, missing-pulse deletion and additive noise.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::radar::{PulseShape, RadarConfig};
use crate::seed::derive_seed;

/// Complex reflectivity `h_p` of every high-resolution cell in the gate.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    pub values: DVector<Complex64>,
    pub cfg: RadarConfig,
}

impl RangeProfile {
    pub fn zeros(cfg: &RadarConfig) -> Self {
        Self {
            values: DVector::zeros(cfg.n_cells()),
            cfg: *cfg,
        }
    }

    pub fn new(cfg: &RadarConfig, values: DVector<Complex64>) -> Result<Self> {
        if values.len() != cfg.n_cells() {
            return Err(Error::DimensionMismatch {
                what: "profile length",
                expected: cfg.n_cells(),
                found: values.len(),
            });
        }
        Ok(Self { values, cfg: *cfg })
    }

    /// Profile with unit amplitude at the listed cells.
    pub fn with_unit_scatterers(cfg: &RadarConfig, cells: &[usize]) -> Result<Self> {
        let mut profile = Self::zeros(cfg);
        for &p in cells {
            if p >= cfg.n_cells() {
                return Err(Error::IndexOutOfRange {
                    what: "cell",
                    index: p,
                    bound: cfg.n_cells(),
                });
            }
            profile.values[p] = Complex64::new(1.0, 0.0);
        }
        Ok(profile)
    }

    /// `k` scatterers at distinct uniformly drawn cells, with Rayleigh
    /// magnitudes of unit mean and uniform phases.
    pub fn random_sparse<R: Rng + ?Sized>(cfg: &RadarConfig, k: usize, rng: &mut R) -> Result<Self> {
        let n = cfg.n_cells();
        if k > n {
            return Err(Error::Config(format!(
                "cannot place {k} scatterers in {n} cells"
            )));
        }
        // Rayleigh scale giving E|h| = 1.
        let scale = (2.0 / PI).sqrt();
        let mut profile = Self::zeros(cfg);
        let mut cells = index::sample(rng, n, k).into_vec();
        cells.sort_unstable();
        for p in cells {
            let u: f64 = rng.random();
            let magnitude = scale * (-2.0 * (1.0 - u).ln()).sqrt();
            let phase = TAU * rng.random::<f64>();
            profile.values[p] = Complex64::from_polar(magnitude, phase);
        }
        Ok(profile)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of cells with nonzero modulus.
    pub fn sparsity(&self) -> usize {
        self.values.iter().filter(|v| v.norm() > 0.0).count()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

/// Carrier indices `C_m` of the pulses whose returns were kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulseSchedule {
    n_pulses: usize,
    valid: Vec<usize>,
}

impl PulseSchedule {
    pub fn new(n_pulses: usize, valid: Vec<usize>) -> Result<Self> {
        if valid.is_empty() {
            return Err(Error::Config("pulse schedule keeps no pulses".into()));
        }
        if valid.len() > n_pulses {
            return Err(Error::Config(format!(
                "schedule has {} pulses but the train has {n_pulses}",
                valid.len()
            )));
        }
        if let Some(&bad) = valid.iter().find(|&&c| c >= n_pulses) {
            return Err(Error::IndexOutOfRange {
                what: "pulse",
                index: bad,
                bound: n_pulses,
            });
        }
        if valid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "pulse indices must be unique and ascending".into(),
            ));
        }
        Ok(Self { n_pulses, valid })
    }

    pub fn full(n_pulses: usize) -> Self {
        Self {
            n_pulses,
            valid: (0..n_pulses).collect(),
        }
    }

    pub fn n_pulses(&self) -> usize {
        self.n_pulses
    }

    pub fn valid_indices(&self) -> &[usize] {
        &self.valid
    }

    /// `M`, the number of valid pulses.
    pub fn m_count(&self) -> usize {
        self.valid.len()
    }

    pub fn is_full(&self) -> bool {
        self.valid.len() == self.n_pulses
    }
}

/// Drops a uniformly drawn subset of `n_missing` pulses.
pub fn random_missing_schedule(n_pulses: usize, n_missing: usize, seed: u64) -> Result<PulseSchedule> {
    if n_missing >= n_pulses {
        return Err(Error::Config(format!(
            "cannot discard {n_missing} of {n_pulses} pulses"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let missing = index::sample(&mut rng, n_pulses, n_missing);
    let mut keep = vec![true; n_pulses];
    for i in missing.iter() {
        keep[i] = false;
    }
    let valid = (0..n_pulses).filter(|&n| keep[n]).collect();
    PulseSchedule::new(n_pulses, valid)
}

/// Circular complex white Gaussian noise at a fixed SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(snr_db: f64, seed: u64) -> Self {
        Self { snr_db, seed }
    }

    /// Per-sample noise variance for a given mean signal power.
    pub fn variance(&self, signal_power: f64) -> f64 {
        signal_power / 10f64.powf(self.snr_db / 10.0)
    }

    /// Unit-variance noise draw for TRM entry (`pulse`, `sample`). Keyed by
    /// entry, so deleting rows never changes the draws of surviving rows.
    pub fn unit_draw(&self, pulse: usize, sample: usize) -> Complex64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            self.seed,
            &[pulse as u64, sample as u64],
        ));
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Target response matrix: one row per valid pulse, one column per
/// fast-time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trm {
    pub data: DMatrix<Complex64>,
    pub row_pulse_indices: Vec<usize>,
    /// Sample instants `s·Δt`, referenced to the gate start.
    pub col_instants: Vec<f64>,
    pub snr_db: Option<f64>,
    /// Per-sample noise standard deviation, 0 when noiseless or unknown.
    pub noise_sigma: f64,
}

impl Trm {
    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.data.ncols()
    }

    /// Keeps only the rows whose pulse index is in `schedule`.
    pub fn select_pulses(&self, schedule: &PulseSchedule) -> Result<Trm> {
        let mut rows = Vec::with_capacity(schedule.m_count());
        for &c in schedule.valid_indices() {
            let row = self
                .row_pulse_indices
                .iter()
                .position(|&r| r == c)
                .ok_or_else(|| Error::Input(format!("pulse {c} is not present in the TRM")))?;
            rows.push(row);
        }
        Ok(Trm {
            data: self.data.select_rows(rows.iter()),
            row_pulse_indices: schedule.valid_indices().to_vec(),
            col_instants: self.col_instants.clone(),
            snr_db: self.snr_db,
            noise_sigma: self.noise_sigma,
        })
    }

    pub fn mean_power(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.data.len() as f64
    }
}

/// Noise-free echo of pulse `pulse` at fast-time `tau` (gate-referenced).
pub fn synthesize_echo_sample(
    profile: &RangeProfile,
    shape: &PulseShape,
    pulse: usize,
    tau: f64,
) -> Result<Complex64> {
    let cfg = &profile.cfg;
    if pulse >= cfg.n_pulses {
        return Err(Error::IndexOutOfRange {
            what: "pulse",
            index: pulse,
            bound: cfg.n_pulses,
        });
    }
    let n = cfg.n_pulses;
    let cell_delay = cfg.cell_delay();
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, h) in profile.values.iter().enumerate() {
        if *h == Complex64::new(0.0, 0.0) {
            continue;
        }
        let envelope = shape.eval_real(tau - p as f64 * cell_delay);
        // (pulse·p) mod N keeps the phase argument exact for large p.
        let phase = -TAU * ((pulse * p) % n) as f64 / n as f64;
        acc += h * Complex64::from_polar(envelope, phase);
    }
    Ok(acc)
}

/// Assembles the TRM of `profile` over the pulses in `schedule`, adding
/// noise when a model is given.
pub fn build_trm(
    profile: &RangeProfile,
    shape: &PulseShape,
    schedule: &PulseSchedule,
    noise: Option<&NoiseModel>,
) -> Result<Trm> {
    let cfg = &profile.cfg;
    cfg.validate()?;
    shape.validate()?;
    if profile.len() != cfg.n_cells() {
        return Err(Error::DimensionMismatch {
            what: "profile length",
            expected: cfg.n_cells(),
            found: profile.len(),
        });
    }
    if schedule.n_pulses() != cfg.n_pulses {
        return Err(Error::DimensionMismatch {
            what: "schedule pulse count",
            expected: cfg.n_pulses,
            found: schedule.n_pulses(),
        });
    }
    let m = schedule.m_count();
    let s_count = cfg.n_samples();
    let col_instants: Vec<f64> = (0..s_count).map(|s| cfg.sample_instant(s)).collect();
    let mut data = DMatrix::zeros(m, s_count);
    for (row, &c) in schedule.valid_indices().iter().enumerate() {
        for (col, &tau) in col_instants.iter().enumerate() {
            data[(row, col)] = synthesize_echo_sample(profile, shape, c, tau)?;
        }
    }
    let mut trm = Trm {
        data,
        row_pulse_indices: schedule.valid_indices().to_vec(),
        col_instants,
        snr_db: None,
        noise_sigma: 0.0,
    };
    if let Some(noise) = noise {
        let sigma = noise.variance(trm.mean_power()).sqrt();
        for (row, &c) in schedule.valid_indices().iter().enumerate() {
            for col in 0..s_count {
                trm.data[(row, col)] += noise.unit_draw(c, col) * sigma;
            }
        }
        trm.snr_db = Some(noise.snr_db);
        trm.noise_sigma = sigma;
    }
    Ok(trm)
}
