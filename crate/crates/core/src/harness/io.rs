//! File formats: TRM ingestion/export and profile CSVs.
//!
//! TRM files are plain text. The first line is
//!
//! ```text
//! SFRTRM v1 M=<rows> S=<columns> dt=<seconds> order=row-major
//! ```
//!
//! followed by `M·S` lines of `re,im`, row by row.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::echo::{PulseSchedule, RangeProfile, Trm};
use crate::error::{Error, Result};
use crate::radar::RadarConfig;
use crate::solvers::RecoveryResult;

pub const TRM_MAGIC: &str = "SFRTRM";
pub const TRM_VERSION: &str = "v1";
pub const PROFILE_HEADER: &str = "range_m,magnitude,phase_rad";

/// Relative tolerance when matching the file's `dt` against the config.
const DT_REL_TOL: f64 = 1e-9;

fn header_error(path: &Path, reason: impl Into<String>) -> Error {
    Error::TrmHeader {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrmHeader {
    pub rows: usize,
    pub cols: usize,
    pub dt: f64,
}

fn keyed<'a>(path: &Path, token: &'a str, key: &str) -> Result<&'a str> {
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| header_error(path, format!("expected {key}=<value>, found {token:?}")))
}

pub fn parse_trm_header(path: &Path, line: &str) -> Result<TrmHeader> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 6 {
        return Err(header_error(path, format!("expected 6 fields, found {}", tokens.len())));
    }
    if tokens[0] != TRM_MAGIC {
        return Err(header_error(path, format!("bad magic {:?}", tokens[0])));
    }
    if tokens[1] != TRM_VERSION {
        return Err(header_error(path, format!("unsupported version {:?}", tokens[1])));
    }
    let rows = keyed(path, tokens[2], "M")?
        .parse::<usize>()
        .map_err(|e| header_error(path, format!("M: {e}")))?;
    let cols = keyed(path, tokens[3], "S")?
        .parse::<usize>()
        .map_err(|e| header_error(path, format!("S: {e}")))?;
    let dt = keyed(path, tokens[4], "dt")?
        .parse::<f64>()
        .map_err(|e| header_error(path, format!("dt: {e}")))?;
    let order = keyed(path, tokens[5], "order")?;
    if order != "row-major" {
        return Err(header_error(path, format!("unsupported order {order:?}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(header_error(path, format!("dt must be > 0, got {dt}")));
    }
    Ok(TrmHeader { rows, cols, dt })
}

fn parse_sample(path: &Path, line_no: usize, line: &str) -> Result<Complex64> {
    let sample_error = |reason: String| Error::TrmSample {
        path: path.to_path_buf(),
        line: line_no,
        reason,
    };
    let (re, im) = line
        .split_once(',')
        .ok_or_else(|| sample_error(format!("expected `re,im`, found {line:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| sample_error(format!("{s:?}: {e}")))
    };
    let value = Complex64::new(parse(re)?, parse(im)?);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(sample_error(format!("non-finite sample {line:?}")));
    }
    Ok(value)
}

/// Reads a TRM file whose rows are the pulses of `schedule`.
pub fn load_trm_file(path: &Path, cfg: &RadarConfig, schedule: &PulseSchedule) -> Result<Trm> {
    cfg.validate()?;
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| header_error(path, "file is empty"))?;
    let header = parse_trm_header(path, first)?;

    if header.rows != schedule.m_count() {
        return Err(Error::DimensionMismatch {
            what: "TRM rows (header M vs schedule)",
            expected: schedule.m_count(),
            found: header.rows,
        });
    }
    if header.cols != cfg.n_samples() {
        return Err(Error::DimensionMismatch {
            what: "TRM columns (header S vs config)",
            expected: cfg.n_samples(),
            found: header.cols,
        });
    }
    if (header.dt - cfg.delta_t).abs() > DT_REL_TOL * cfg.delta_t {
        return Err(header_error(
            path,
            format!("dt={} does not match configured delta_t={}", header.dt, cfg.delta_t),
        ));
    }

    let expected = header.rows * header.cols;
    let mut samples = Vec::with_capacity(expected);
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        samples.push(parse_sample(path, i + 1, line)?);
    }
    if samples.len() != expected {
        return Err(Error::TrmSampleCount {
            path: path.to_path_buf(),
            expected,
            found: samples.len(),
        });
    }
    Ok(Trm {
        data: DMatrix::from_row_slice(header.rows, header.cols, &samples),
        row_pulse_indices: schedule.valid_indices().to_vec(),
        col_instants: (0..header.cols).map(|s| cfg.sample_instant(s)).collect(),
        snr_db: None,
        noise_sigma: 0.0,
    })
}

/// Writes `trm` in the format read by [`load_trm_file`]. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_trm_file(path: &Path, trm: &Trm, delta_t: f64) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{TRM_MAGIC} {TRM_VERSION} M={} S={} dt={:e} order=row-major",
        trm.n_rows(),
        trm.n_cols(),
        delta_t
    );
    for r in 0..trm.n_rows() {
        for c in 0..trm.n_cols() {
            let v = trm.data[(r, c)];
            let _ = writeln!(out, "{:e},{:e}", v.re, v.im);
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// One CSV row per cell: range, linear magnitude, phase, 9 significant digits.
pub fn export_profile(values: &[Complex64], axis: &[f64], path: &Path) -> Result<()> {
    if values.len() != axis.len() {
        return Err(Error::DimensionMismatch {
            what: "range axis length",
            expected: values.len(),
            found: axis.len(),
        });
    }
    let mut out = String::with_capacity(48 * (values.len() + 1));
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for (v, r) in values.iter().zip(axis) {
        let _ = writeln!(out, "{:.8e},{:.8e},{:.8e}", r, v.norm(), v.arg());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn export_result(result: &RecoveryResult, axis: &[f64], path: &Path) -> Result<()> {
    export_profile(result.h_est.as_slice(), axis, path)
}

/// Rows of a profile CSV as `(range_m, value)`.
pub fn read_profile_csv(path: &Path) -> Result<Vec<(f64, Complex64)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_error = |reason: String| Error::Parse {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == PROFILE_HEADER => {}
        other => {
            return Err(parse_error(format!(
                "expected header {PROFILE_HEADER:?}, found {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_error(format!("line {}: expected 3 fields", i + 2)));
        }
        let mut parsed = [0.0; 3];
        for (slot, f) in parsed.iter_mut().zip(&fields) {
            *slot = f
                .trim()
                .parse::<f64>()
                .map_err(|e| parse_error(format!("line {}: {e}", i + 2)))?;
        }
        rows.push((parsed[0], Complex64::from_polar(parsed[1], parsed[2])));
    }
    Ok(rows)
}

/// Loads a ground-truth profile from a CSV in the export format.
pub fn load_profile(path: &Path, cfg: &RadarConfig) -> Result<RangeProfile> {
    let rows = read_profile_csv(path)?;
    let values = nalgebra::DVector::from_iterator(rows.len(), rows.into_iter().map(|(_, v)| v));
    RangeProfile::new(cfg, values)
}
