//! Profile quality metrics.

use crate::echo::RangeProfile;
use crate::error::{Error, Result};

/// Reported in place of −∞ when no sidelobe energy exists.
pub const SIDELOBE_FLOOR_DB: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityReport {
    pub similarity: f64,
    pub rel_l2_error: f64,
    pub peak_sidelobe_db: f64,
    /// Shift applied to the estimate at the best correlation.
    pub alignment_shift: isize,
}

/// Largest alignment shift searched for a profile of `len` cells.
pub fn max_shift(len: usize) -> usize {
    len / 8
}

/// Normalized correlation of magnitude profiles, `⟨a, shift(b, d)⟩ / ‖a‖‖b‖`,
/// maximized over `|d| ≤ max_shift`. Shifts are linear (zero fill), with
/// `shift(b, d)[i] = b[i − d]`. Returns the best value and its shift; ties
/// resolve to the smallest `|d|`, then the negative shift.
pub fn magnitude_correlation(a: &[f64], b: &[f64], max_shift: usize) -> (f64, isize) {
    let norm_a = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_a == 0.0 || norm_b == 0.0 {
        return (0.0, 0);
    }
    let n = a.len() as isize;
    let max_shift = max_shift as isize;
    let mut best = (f64::NEG_INFINITY, 0);
    let mut shifts = vec![0];
    for d in 1..=max_shift {
        shifts.push(-d);
        shifts.push(d);
    }
    for d in shifts {
        let mut dot = 0.0;
        for i in 0..n {
            let j = i - d;
            if (0..n).contains(&j) {
                dot += a[i as usize] * b[j as usize];
            }
        }
        let value = dot / (norm_a * norm_b);
        if value > best.0 {
            best = (value, d);
        }
    }
    (best.0.clamp(0.0, 1.0), best.1)
}

fn check_lengths(truth: &RangeProfile, estimate: &RangeProfile) -> Result<()> {
    if truth.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            what: "profile length",
            expected: truth.len(),
            found: estimate.len(),
        });
    }
    Ok(())
}

pub fn similarity(truth: &RangeProfile, estimate: &RangeProfile) -> Result<SimilarityReport> {
    check_lengths(truth, estimate)?;
    if truth.values.norm() == 0.0 {
        return Err(Error::Input("reference profile is identically zero".into()));
    }
    let a = truth.magnitudes();
    let b = estimate.magnitudes();
    let (similarity, alignment_shift) = magnitude_correlation(&a, &b, max_shift(a.len()));
    let peak_sidelobe_db = if estimate.values.norm() > 0.0 {
        peak_sidelobe_db(estimate, 1)?
    } else {
        SIDELOBE_FLOOR_DB
    };
    Ok(SimilarityReport {
        similarity,
        rel_l2_error: rel_l2_error(truth, estimate)?,
        peak_sidelobe_db,
        alignment_shift,
    })
}

pub fn rel_l2_error(truth: &RangeProfile, estimate: &RangeProfile) -> Result<f64> {
    check_lengths(truth, estimate)?;
    let norm = truth.values.norm();
    if norm == 0.0 {
        return Err(Error::Input("reference profile is identically zero".into()));
    }
    Ok((&truth.values - &estimate.values).norm() / norm)
}

/// Strongest response outside `±mainlobe_halfwidth` cells of the global
/// peak, relative to the peak, in dB.
pub fn peak_sidelobe_db(profile: &RangeProfile, mainlobe_halfwidth: usize) -> Result<f64> {
    peak_sidelobe_db_of(&profile.magnitudes(), mainlobe_halfwidth)
}

pub fn peak_sidelobe_db_of(magnitudes: &[f64], mainlobe_halfwidth: usize) -> Result<f64> {
    let (peak_at, peak) = magnitudes
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    if peak == 0.0 {
        return Err(Error::Input("profile is identically zero".into()));
    }
    let sidelobe = magnitudes
        .iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(peak_at) > mainlobe_halfwidth)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max);
    if sidelobe == 0.0 {
        return Ok(SIDELOBE_FLOOR_DB);
    }
    Ok((20.0 * (sidelobe / peak).log10()).max(SIDELOBE_FLOOR_DB))
}
