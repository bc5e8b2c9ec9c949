//! Linear measurement model `Y = Φh + U` over the surviving TRM entries.
//!
//! Rows are ordered column-major over the TRM: every valid pulse of sample
//! 0 (pulse order ascending), then every valid pulse of sample 1, and so on.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::echo::{PulseSchedule, Trm};
use crate::error::{Error, Result};
use crate::radar::{PulseShape, RadarConfig};

/// Projection row `φ(C_m, τ)`: the weights that map the profile onto the
/// echo of pulse `c_m` at gate-referenced instant `tau`.
pub fn projection_row(
    cfg: &RadarConfig,
    shape: &PulseShape,
    c_m: usize,
    tau: f64,
) -> Result<DVector<Complex64>> {
    if c_m >= cfg.n_pulses {
        return Err(Error::IndexOutOfRange {
            what: "pulse",
            index: c_m,
            bound: cfg.n_pulses,
        });
    }
    let n = cfg.n_pulses;
    let cell_delay = cfg.cell_delay();
    Ok(DVector::from_fn(cfg.n_cells(), |p, _| {
        let envelope = shape.eval_real(tau - p as f64 * cell_delay);
        let phase = -TAU * ((c_m * p) % n) as f64 / n as f64;
        Complex64::from_polar(envelope, phase)
    }))
}

#[derive(Debug, Clone)]
pub struct SensingSystem {
    /// `(M·S) × (N·L)` measurement operator.
    pub phi: DMatrix<Complex64>,
    /// Vectorized TRM in `row_keys` order.
    pub y: DVector<Complex64>,
    /// `(C_m, s)` of every row.
    pub row_keys: Vec<(usize, usize)>,
    pub noise_sigma: f64,
    pub underdetermined: bool,
}

impl SensingSystem {
    pub fn n_rows(&self) -> usize {
        self.phi.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.phi.ncols()
    }

    /// `Φ h`.
    pub fn apply(&self, h: &DVector<Complex64>) -> DVector<Complex64> {
        &self.phi * h
    }

    /// `Φᴴ r`.
    pub fn adjoint(&self, r: &DVector<Complex64>) -> DVector<Complex64> {
        self.phi.ad_mul(r)
    }

    /// `‖Y − Φh‖₂`.
    pub fn residual_norm(&self, h: &DVector<Complex64>) -> f64 {
        (&self.y - self.apply(h)).norm()
    }

    /// Same operator with a different observation vector.
    pub fn with_observation(&self, y: DVector<Complex64>) -> Result<Self> {
        if y.len() != self.n_rows() {
            return Err(Error::DimensionMismatch {
                what: "observation length",
                expected: self.n_rows(),
                found: y.len(),
            });
        }
        Ok(Self { y, ..self.clone() })
    }

    /// Largest squared singular value of `Φ` by power iteration on `ΦᴴΦ`.
    pub fn operator_norm_sq(&self) -> f64 {
        largest_eigenvalue(|v| self.adjoint(&self.apply(v)), self.n_cols())
    }
}

/// Dominant eigenvalue of a Hermitian positive semidefinite operator.
/// Runs at least 30 iterations and stops once the estimate changes by less
/// than 1e-6 relative (capped at 1000). The estimate approaches from below.
pub(crate) fn largest_eigenvalue(
    op: impl Fn(&DVector<Complex64>) -> DVector<Complex64>,
    dim: usize,
) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    // Fixed, non-degenerate start vector.
    let mut v = DVector::from_fn(dim, |i, _| {
        let x = crate::seed::splitmix64(i as u64) as f64 / u64::MAX as f64;
        Complex64::from_polar(1.0 + x, TAU * x)
    });
    v /= Complex64::from(v.norm());
    let mut lambda = 0.0;
    for iter in 0..1000 {
        let w = op(&v);
        let next = w.norm();
        if next == 0.0 {
            return 0.0;
        }
        v = w / Complex64::from(next);
        let settled = (next - lambda).abs() <= 1e-6 * next;
        lambda = next;
        if iter >= 30 && settled {
            break;
        }
    }
    lambda
}

pub fn build_sensing_system(
    cfg: &RadarConfig,
    shape: &PulseShape,
    schedule: &PulseSchedule,
    trm: &Trm,
) -> Result<SensingSystem> {
    cfg.validate()?;
    shape.validate()?;
    let m = schedule.m_count();
    let s_count = cfg.n_samples();
    if schedule.n_pulses() != cfg.n_pulses {
        return Err(Error::DimensionMismatch {
            what: "schedule pulse count",
            expected: cfg.n_pulses,
            found: schedule.n_pulses(),
        });
    }
    if trm.n_rows() != m {
        return Err(Error::DimensionMismatch {
            what: "TRM rows",
            expected: m,
            found: trm.n_rows(),
        });
    }
    if trm.n_cols() != s_count {
        return Err(Error::DimensionMismatch {
            what: "TRM columns",
            expected: s_count,
            found: trm.n_cols(),
        });
    }
    if trm.row_pulse_indices != schedule.valid_indices() {
        return Err(Error::Input(
            "TRM row pulse indices differ from the schedule".into(),
        ));
    }

    let rows = m * s_count;
    let row_keys: Vec<(usize, usize)> = (0..s_count)
        .flat_map(|s| schedule.valid_indices().iter().map(move |&c| (c, s)))
        .collect();
    let mut phi = DMatrix::zeros(rows, cfg.n_cells());
    for (r, &(c, s)) in row_keys.iter().enumerate() {
        let row = projection_row(cfg, shape, c, cfg.sample_instant(s))?;
        phi.row_mut(r).copy_from(&row.transpose());
    }
    // Column-major TRM storage matches the row key order.
    let y = DVector::from_iterator(rows, trm.data.iter().copied());

    Ok(SensingSystem {
        underdetermined: rows < cfg.n_cells(),
        phi,
        y,
        row_keys,
        noise_sigma: trm.noise_sigma,
    })
}
