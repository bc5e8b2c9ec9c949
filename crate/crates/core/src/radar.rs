//! Waveform and range-gate geometry for a stepped-frequency pulse train.
//!
//! A train of `N` pulses steps its carrier by `Δf` per pulse. The range gate
//! `[R0, R0 + D]` spans `L` coarse range bins of extent `c / 2Δf`, each split
//! into `N` high-resolution cells of width `c / 2NΔf`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarConfig {
    /// Carrier of the first pulse (Hz). Bookkeeping only; the echo model is baseband.
    pub f_c: f64,
    /// Carrier step between consecutive pulses (Hz).
    pub delta_f: f64,
    /// Number of carrier steps `N`.
    pub n_pulses: usize,
    /// Compressed single-pulse bandwidth (Hz).
    pub pulse_bandwidth: f64,
    /// Baseband sampling interval (s).
    pub delta_t: f64,
    /// Range-gate start index `Q`; the gate starts at `c Q / 2Δf`.
    pub q_start: usize,
    /// Number of coarse range bins `L` covered by the gate.
    pub l_bins: usize,
    /// Propagation speed (m/s).
    pub c_light: f64,
}

impl Default for RadarConfig {
    /// Simulation setup of the reference study: 32 pulses stepped by 16 MHz,
    /// 24 MHz pulses sampled at the pulse bandwidth, 12 coarse bins.
    fn default() -> Self {
        let pulse_bandwidth = 24.0e6;
        Self {
            f_c: 5.0e9,
            delta_f: 16.0e6,
            n_pulses: 32,
            pulse_bandwidth,
            delta_t: 1.0 / pulse_bandwidth,
            q_start: 0,
            l_bins: 12,
            c_light: SPEED_OF_LIGHT,
        }
    }
}

impl RadarConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("delta_f", self.delta_f)?;
        positive("pulse_bandwidth", self.pulse_bandwidth)?;
        positive("delta_t", self.delta_t)?;
        positive("c_light", self.c_light)?;
        if !self.f_c.is_finite() {
            return Err(Error::Config(format!("f_c must be finite, got {}", self.f_c)));
        }
        if self.n_pulses < 2 {
            return Err(Error::Config(format!(
                "n_pulses must be >= 2, got {}",
                self.n_pulses
            )));
        }
        if self.l_bins < 1 {
            return Err(Error::Config("l_bins must be >= 1".into()));
        }
        if self.n_samples() == 0 {
            return Err(Error::Config(format!(
                "gate of {} bins holds no samples at delta_t = {}",
                self.l_bins, self.delta_t
            )));
        }
        Ok(())
    }

    /// Range extent of one coarse bin, `c / 2Δf`.
    pub fn coarse_bin_extent(&self) -> f64 {
        self.c_light / (2.0 * self.delta_f)
    }

    /// High-resolution cell width, `c / 2NΔf`.
    pub fn range_resolution(&self) -> f64 {
        self.coarse_bin_extent() / self.n_pulses as f64
    }

    /// Range-gate start `R0 = c Q / 2Δf`.
    pub fn gate_start(&self) -> f64 {
        self.coarse_bin_extent() * self.q_start as f64
    }

    /// Range-gate depth `D = c L / 2Δf`.
    pub fn gate_depth(&self) -> f64 {
        self.coarse_bin_extent() * self.l_bins as f64
    }

    /// Fast-time samples per pulse, `S = round(2D / cΔt)`.
    pub fn n_samples(&self) -> usize {
        (2.0 * self.gate_depth() / (self.c_light * self.delta_t)).round() as usize
    }

    /// Length `N·L` of the high-resolution profile.
    pub fn n_cells(&self) -> usize {
        self.n_pulses * self.l_bins
    }

    /// Round-trip delay spanned by one high-resolution cell, `1 / NΔf`.
    pub fn cell_delay(&self) -> f64 {
        1.0 / (self.n_pulses as f64 * self.delta_f)
    }

    /// Fast-time instant of sample `s`, measured from the gate start.
    pub fn sample_instant(&self, s: usize) -> f64 {
        s as f64 * self.delta_t
    }
}

pub fn carrier_frequency(cfg: &RadarConfig, n: usize) -> Result<f64> {
    if n >= cfg.n_pulses {
        return Err(Error::IndexOutOfRange {
            what: "pulse",
            index: n,
            bound: cfg.n_pulses,
        });
    }
    Ok(cfg.f_c + n as f64 * cfg.delta_f)
}

/// Range of every high-resolution cell in the gate, `R0 + p·c/2NΔf`.
pub fn range_axis(cfg: &RadarConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let r0 = cfg.gate_start();
    let dr = cfg.range_resolution();
    Ok((0..cfg.n_cells()).map(|p| r0 + p as f64 * dr).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    Hamming,
    Hann,
    Rect,
}

impl Window {
    /// Window weight at `x = τ / halfwidth`, for `|x| <= 1`.
    fn weight(self, x: f64) -> f64 {
        match self {
            Window::Hamming => 0.54 + 0.46 * (PI * x).cos(),
            Window::Hann => 0.5 + 0.5 * (PI * x).cos(),
            Window::Rect => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PulseKind {
    IdealSinc,
    WindowedSinc {
        window: Window,
        /// Support halfwidth in seconds; the shape is zero beyond it.
        truncation_halfwidth: f64,
    },
}

/// Compressed baseband pulse shape `R_X(τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    pub kind: PulseKind,
    pub bandwidth: f64,
}

impl PulseShape {
    pub fn ideal(bandwidth: f64) -> Self {
        Self {
            kind: PulseKind::IdealSinc,
            bandwidth,
        }
    }

    pub fn windowed(bandwidth: f64, window: Window, truncation_halfwidth: f64) -> Self {
        Self {
            kind: PulseKind::WindowedSinc {
                window,
                truncation_halfwidth,
            },
            bandwidth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::Config(format!(
                "pulse bandwidth must be > 0, got {}",
                self.bandwidth
            )));
        }
        if let PulseKind::WindowedSinc {
            truncation_halfwidth,
            ..
        } = self.kind
        {
            if !(truncation_halfwidth.is_finite() && truncation_halfwidth > 0.0) {
                return Err(Error::Config(format!(
                    "truncation halfwidth must be > 0, got {truncation_halfwidth}"
                )));
            }
        }
        Ok(())
    }

    /// Real-valued evaluation of `R_X(τ)`.
    pub fn eval_real(&self, tau: f64) -> f64 {
        let main = sinc(self.bandwidth * tau);
        match self.kind {
            PulseKind::IdealSinc => main,
            PulseKind::WindowedSinc {
                window,
                truncation_halfwidth,
            } => {
                let x = tau / truncation_halfwidth;
                if x.abs() > 1.0 {
                    0.0
                } else {
                    main * window.weight(x)
                }
            }
        }
    }
}

/// Normalized sinc, `sin(πx) / (πx)` with value 1 at the origin.
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

pub fn pulse_shape_eval(shape: &PulseShape, tau: f64) -> Complex64 {
    Complex64::new(shape.eval_real(tau), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn carrier_schedule() {
        let cfg = RadarConfig::default();
        assert_eq!(carrier_frequency(&cfg, 0).unwrap(), 5.0e9);
        assert_relative_eq!(carrier_frequency(&cfg, 5).unwrap(), 5.08e9, max_relative = 1e-15);
        assert_relative_eq!(carrier_frequency(&cfg, 31).unwrap(), 5.496e9, max_relative = 1e-15);
        assert!(matches!(
            carrier_frequency(&cfg, 32),
            Err(Error::IndexOutOfRange { index: 32, .. })
        ));
        for n in 1..cfg.n_pulses {
            let step = carrier_frequency(&cfg, n).unwrap() - carrier_frequency(&cfg, n - 1).unwrap();
            assert_relative_eq!(step, cfg.delta_f, max_relative = 1e-6);
        }
    }

    #[test]
    fn axis_geometry() {
        let cfg = RadarConfig::default();
        let axis = range_axis(&cfg).unwrap();
        assert_eq!(axis.len(), 384);
        assert_eq!(axis[0], 0.0);
        let spacing = axis[1] - axis[0];
        assert!((spacing - 0.29277).abs() < 1e-5, "spacing {spacing}");
        assert_eq!(
            cfg.range_resolution() * cfg.n_pulses as f64,
            cfg.coarse_bin_extent()
        );
        let c3 = RadarConfig {
            c_light: 3.0e8,
            ..cfg
        };
        assert_relative_eq!(c3.gate_depth(), 112.5, max_relative = 1e-15);
        assert_eq!(cfg.n_samples(), 18);
    }

    #[test]
    fn gate_start_offsets_axis() {
        let cfg = RadarConfig {
            q_start: 3,
            ..RadarConfig::default()
        };
        let axis = range_axis(&cfg).unwrap();
        assert_relative_eq!(axis[0], 3.0 * cfg.coarse_bin_extent());
    }

    #[test]
    fn rejects_bad_config() {
        let bad = [
            RadarConfig { delta_f: 0.0, ..Default::default() },
            RadarConfig { n_pulses: 1, ..Default::default() },
            RadarConfig { l_bins: 0, ..Default::default() },
            RadarConfig { delta_t: -1.0, ..Default::default() },
            RadarConfig { pulse_bandwidth: f64::NAN, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn ideal_sinc_values() {
        let shape = PulseShape::ideal(24.0e6);
        assert_eq!(pulse_shape_eval(&shape, 0.0), Complex64::new(1.0, 0.0));
        assert!(shape.eval_real(1.0 / 24.0e6).abs() < 1e-15);
        assert!(shape.eval_real(-3.0 / 24.0e6).abs() < 1e-15);
        assert_relative_eq!(shape.eval_real(0.5 / 24.0e6), 2.0 / PI, max_relative = 1e-14);
    }

    #[test]
    fn windowed_sinc_is_truncated() {
        let half = 2.0 / 24.0e6;
        for window in [Window::Hamming, Window::Hann, Window::Rect] {
            let shape = PulseShape::windowed(24.0e6, window, half);
            assert_eq!(shape.eval_real(0.0), 1.0);
            assert_eq!(shape.eval_real(1.01 * half), 0.0);
            assert_eq!(shape.eval_real(-1.5 * half), 0.0);
        }
    }

    #[test]
    fn shape_peak_and_symmetry_on_dense_grid() {
        let shapes = [
            PulseShape::ideal(24.0e6),
            PulseShape::windowed(24.0e6, Window::Hamming, 3.0 / 24.0e6),
            PulseShape::windowed(24.0e6, Window::Hann, 1.5 / 24.0e6),
        ];
        for shape in shapes {
            let peak = shape.eval_real(0.0);
            for i in -4000..=4000 {
                let tau = i as f64 * 1e-10;
                let v = pulse_shape_eval(&shape, tau);
                assert!(v.norm() <= peak);
                assert_eq!(pulse_shape_eval(&shape, -tau), v.conj());
            }
        }
    }
}
