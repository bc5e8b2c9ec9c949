//! Ridge-regularized least squares on the same linear model.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use super::{check_finite, Method, RecoveryResult, RidgeRule, SolverOptions};
use crate::error::{Error, Result};
use crate::sensing::SensingSystem;

/// Minimizes `‖Y − Φh‖₂² + ridge·‖h‖₂²` through a Cholesky factorization of
/// the regularized normal matrix, followed by one step of iterative
/// refinement.
pub fn solve_least_squares(sys: &SensingSystem, opts: &SolverOptions) -> Result<RecoveryResult> {
    opts.validate()?;
    check_finite(sys)?;
    let gram = sys.phi.ad_mul(&sys.phi);
    let ridge = match opts.ls_ridge {
        RidgeRule::Absolute(v) => v,
        RidgeRule::Relative(v) => {
            v * crate::sensing::largest_eigenvalue(|x| &gram * x, gram.ncols())
        }
    };
    let h = ridge_solve(&gram, ridge, &sys.adjoint(&sys.y))?;
    Ok(RecoveryResult {
        residual_l2: sys.residual_norm(&h),
        h_est: h,
        method: Method::LeastSquares,
        iterations: 1,
        converged: true,
        epsilon_used: 0.0,
        degraded: false,
    })
}

fn ridge_solve(
    gram: &DMatrix<Complex64>,
    ridge: f64,
    rhs: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    let n = gram.ncols();
    let mut normal = gram.clone();
    for i in 0..n {
        normal[(i, i)] += Complex64::from(ridge);
    }
    let chol = Cholesky::new(normal.clone()).ok_or_else(|| {
        Error::Solver(format!(
            "regularized normal matrix is not positive definite (ridge = {ridge:e})"
        ))
    })?;
    let mut h = chol.solve(rhs);
    let correction = chol.solve(&(rhs - &normal * &h));
    h += correction;
    if h.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Solver("least-squares solution is not finite".into()));
    }
    Ok(h)
}
