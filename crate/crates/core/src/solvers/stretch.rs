//! Stretch processing: inverse DFT across pulses, one TRM column per coarse
//! range bin.
//!
//! With more samples than bins (Δt < 1/Δf), each bin is served by the column
//! whose instant lies nearest the bin center; the remaining columns are
//! discarded.

use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;

use super::{Method, RecoveryResult};
use crate::echo::{PulseSchedule, Trm};
use crate::error::{Error, Result};
use crate::radar::{PulseShape, RadarConfig};
use crate::sensing::build_sensing_system;

/// Length-`n` inverse DFT, `x_k = (1/n) Σ_m X_m e^{+j2πmk/n}`.
pub fn idft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|k| {
            spectrum
                .iter()
                .enumerate()
                .map(|(m, &x)| x * Complex64::from_polar(1.0, TAU * ((m * k) % n) as f64 / n as f64))
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// Column serving coarse bin `bin`: the sample instant nearest the bin center.
pub(crate) fn column_for_bin(cfg: &RadarConfig, n_cols: usize, bin: usize) -> usize {
    let center = (bin as f64 + 0.5) / cfg.delta_f;
    let s = (center / cfg.delta_t).round() as usize;
    let s = s.min(n_cols - 1);
    // `round` breaks exact ties upward; prefer the earlier column instead.
    if s > 0 && (center - cfg.sample_instant(s - 1)).abs() <= (cfg.sample_instant(s) - center).abs() {
        s - 1
    } else {
        s
    }
}

pub fn solve_stretch_idft(trm: &Trm, cfg: &RadarConfig, shape: &PulseShape) -> Result<RecoveryResult> {
    cfg.validate()?;
    let n = cfg.n_pulses;
    if trm.n_cols() != cfg.n_samples() {
        return Err(Error::DimensionMismatch {
            what: "TRM columns",
            expected: cfg.n_samples(),
            found: trm.n_cols(),
        });
    }
    let schedule = PulseSchedule::new(n, trm.row_pulse_indices.clone())?;
    let mut h = DVector::zeros(cfg.n_cells());
    for bin in 0..cfg.l_bins {
        let s = column_for_bin(cfg, trm.n_cols(), bin);
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for (row, &c) in trm.row_pulse_indices.iter().enumerate() {
            column[c] = trm.data[(row, s)];
        }
        for (k, v) in idft(&column).into_iter().enumerate() {
            h[bin * n + k] = v;
        }
    }
    let sys = build_sensing_system(cfg, shape, &schedule, trm)?;
    Ok(RecoveryResult {
        residual_l2: sys.residual_norm(&h),
        h_est: h,
        method: Method::StretchIdft,
        iterations: 1,
        converged: true,
        epsilon_used: 0.0,
        degraded: !schedule.is_full(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::echo::{build_trm, random_missing_schedule, RangeProfile};

    /// Independent route: `IDFT(x) = conj(DFT(conj(x))) / n`.
    fn idft_via_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, v) in x.iter().enumerate() {
                    let angle = -TAU * (m as f64) * (k as f64) / n as f64;
                    acc += v.conj() * Complex64::new(angle.cos(), angle.sin());
                }
                acc.conj() / n as f64
            })
            .collect()
    }

    #[test]
    fn idft_matches_dft_identity() {
        let x: Vec<Complex64> = (0..32)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos() - 0.2))
            .collect();
        for (a, b) in idft(&x).iter().zip(idft_via_dft(&x)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn column_mapping_nearest_center() {
        let cfg = RadarConfig::default();
        // Bin centers at 31.25 ns, 93.75 ns, ...; samples every 41.67 ns.
        assert_eq!(column_for_bin(&cfg, 18, 0), 1);
        assert_eq!(column_for_bin(&cfg, 18, 1), 2);
        assert_eq!(column_for_bin(&cfg, 18, 11), 17);
        let cols: Vec<usize> = (0..12).map(|b| column_for_bin(&cfg, 18, b)).collect();
        assert!(cols.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn zero_trm_gives_zero_profile() {
        let cfg = RadarConfig::default();
        let shape = PulseShape::ideal(cfg.pulse_bandwidth);
        let trm = build_trm(&RangeProfile::zeros(&cfg), &shape, &PulseSchedule::full(32), None).unwrap();
        let res = solve_stretch_idft(&trm, &cfg, &shape).unwrap();
        assert!(res.h_est.iter().all(|v| v.norm() == 0.0));
        assert!(!res.degraded);
    }

    fn peak_cell(res: &RecoveryResult) -> usize {
        res.h_est
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0
    }

    #[test]
    fn sample_aligned_scatterer_peaks_at_its_cell() {
        // One sample per coarse bin: bin b is served by column b, whose
        // instant coincides with cell b·N.
        let cfg = RadarConfig {
            pulse_bandwidth: 16.0e6,
            delta_t: 1.0 / 16.0e6,
            ..RadarConfig::default()
        };
        let shape = PulseShape::ideal(cfg.pulse_bandwidth);
        assert_eq!(cfg.n_samples(), cfg.l_bins);
        for bin in [0, 3, 11] {
            let p = bin * cfg.n_pulses;
            let h = RangeProfile::with_unit_scatterers(&cfg, &[p]).unwrap();
            let trm = build_trm(&h, &shape, &PulseSchedule::full(32), None).unwrap();
            let res = solve_stretch_idft(&trm, &cfg, &shape).unwrap();
            assert_eq!(peak_cell(&res), p);
            assert!((res.h_est[p].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scatterer_near_serving_column_peaks_at_its_cell() {
        // Bin 0 is served by column 1 at Δt ≈ 21.3 cells.
        let cfg = RadarConfig::default();
        let shape = PulseShape::ideal(cfg.pulse_bandwidth);
        for p in [20, 21, 22] {
            let h = RangeProfile::with_unit_scatterers(&cfg, &[p]).unwrap();
            let trm = build_trm(&h, &shape, &PulseSchedule::full(32), None).unwrap();
            let res = solve_stretch_idft(&trm, &cfg, &shape).unwrap();
            assert_eq!(peak_cell(&res), p);
        }
    }

    #[test]
    fn missing_rows_are_zero_filled() {
        let cfg = RadarConfig::default();
        let shape = PulseShape::ideal(cfg.pulse_bandwidth);
        let sched = random_missing_schedule(32, 12, 6).unwrap();
        let h = RangeProfile::with_unit_scatterers(&cfg, &[40]).unwrap();
        let trm = build_trm(&h, &shape, &sched, None).unwrap();
        let res = solve_stretch_idft(&trm, &cfg, &shape).unwrap();
        assert!(res.degraded);
        let s = column_for_bin(&cfg, 18, 1);
        let mut column = vec![Complex64::new(0.0, 0.0); 32];
        for (row, &c) in sched.valid_indices().iter().enumerate() {
            column[c] = trm.data[(row, s)];
        }
        let oracle = idft_via_dft(&column);
        for k in 0..32 {
            assert!((res.h_est[32 + k] - oracle[k]).norm() < 1e-12);
        }
    }
}
