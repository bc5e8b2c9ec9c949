//! Profile reconstruction from a [`SensingSystem`](crate::sensing::SensingSystem).
//!
//! * [`solve_sparse_l1`]: ℓ1-minimal profile within an ε-ball of the data.
//! * [`solve_least_squares`]: ridge-regularized least squares baseline.
//! * [`solve_stretch_idft`]: classical per-column inverse DFT.

mod least_squares;
mod sparse;
mod stretch;

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sensing::SensingSystem;

pub use least_squares::solve_least_squares;
pub use sparse::{complex_soft_threshold, penalized_objective, solve_penalized, solve_sparse_l1, PenalizedSolve};
pub use stretch::{idft, solve_stretch_idft};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SparseL1,
    LeastSquares,
    StretchIdft,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SparseL1, Method::LeastSquares, Method::StretchIdft];

    pub fn name(self) -> &'static str {
        match self {
            Method::SparseL1 => "sparse-l1",
            Method::LeastSquares => "least-squares",
            Method::StretchIdft => "stretch-idft",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown method {s:?} (expected sparse-l1, least-squares or stretch-idft)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub h_est: DVector<Complex64>,
    pub method: Method,
    /// `‖Y − Φ·h_est‖₂`, recomputed on the returned estimate.
    pub residual_l2: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Data-fit bound ε (sparse recovery only, 0 otherwise).
    pub epsilon_used: f64,
    /// Set when stretch processing had to zero-fill missing pulses.
    pub degraded: bool,
}

/// ε used by [`EpsilonRule::FromNoise`] when the observation carries no noise,
/// relative to `‖Y‖₂`.
pub const NOISELESS_EPSILON_RATIO: f64 = 1e-6;

/// How the data-fit bound ε is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum EpsilonRule {
    Explicit(f64),
    /// `factor · σ · sqrt(M·S)`: a multiple of the expected noise norm.
    /// Falls back to `NOISELESS_EPSILON_RATIO · ‖Y‖₂` when σ is zero.
    FromNoise(f64),
}

impl EpsilonRule {
    pub fn resolve(&self, sys: &SensingSystem) -> Result<f64> {
        let eps = match *self {
            EpsilonRule::Explicit(eps) => eps,
            EpsilonRule::FromNoise(factor) => {
                if !(factor.is_finite() && factor > 0.0) {
                    return Err(Error::Config(format!("epsilon factor must be > 0, got {factor}")));
                }
                if sys.noise_sigma == 0.0 {
                    NOISELESS_EPSILON_RATIO * sys.y.norm()
                } else {
                    factor * sys.noise_sigma * (sys.n_rows() as f64).sqrt()
                }
            }
        };
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::Config(format!("epsilon must be finite and >= 0, got {eps}")));
        }
        Ok(eps)
    }
}

/// Tikhonov weight of the least-squares baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RidgeRule {
    Absolute(f64),
    /// Multiple of the largest squared singular value of `Φ`.
    Relative(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Iteration cap for each penalized solve along the path.
    pub max_iters: usize,
    /// Stop once `‖h_k − h_{k−1}‖₂ / max(‖h_k‖₂, 1e−12)` drops below this.
    pub rel_change_tol: f64,
    pub epsilon_rule: EpsilonRule,
    /// Number of geometric steps from `λ_max` down to `λ_max · lambda_min_ratio`.
    pub lambda_path_steps: usize,
    pub lambda_min_ratio: f64,
    /// Log-scale bisection steps between the last λ that missed ε and the
    /// first that met it.
    pub lambda_refine_steps: usize,
    pub ls_ridge: RidgeRule,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            rel_change_tol: 1e-6,
            epsilon_rule: EpsilonRule::FromNoise(1.1),
            lambda_path_steps: 8,
            lambda_min_ratio: 1e-7,
            lambda_refine_steps: 6,
            ls_ridge: RidgeRule::Relative(1e-6),
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if !(self.rel_change_tol.is_finite() && self.rel_change_tol > 0.0) {
            return Err(Error::Config("rel_change_tol must be > 0".into()));
        }
        if self.lambda_path_steps < 1 {
            return Err(Error::Config("lambda_path_steps must be >= 1".into()));
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < 1.0) {
            return Err(Error::Config("lambda_min_ratio must lie in (0, 1)".into()));
        }
        let ridge = match self.ls_ridge {
            RidgeRule::Absolute(v) | RidgeRule::Relative(v) => v,
        };
        if !(ridge.is_finite() && ridge > 0.0) {
            return Err(Error::Config(format!("ls_ridge must be > 0, got {ridge}")));
        }
        let (EpsilonRule::Explicit(eps) | EpsilonRule::FromNoise(eps)) = self.epsilon_rule;
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::Config(format!("epsilon setting must be >= 0, got {eps}")));
        }
        Ok(())
    }
}

pub(crate) fn check_finite(sys: &SensingSystem) -> Result<()> {
    if sys.phi.iter().chain(sys.y.iter()).any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Input("sensing system contains non-finite values".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("omp".parse::<Method>().is_err());
    }

    #[test]
    fn options_validation() {
        assert!(SolverOptions::default().validate().is_ok());
        let bad = SolverOptions {
            max_iters: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverOptions {
            ls_ridge: RidgeRule::Absolute(0.0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
