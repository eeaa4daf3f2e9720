//! Central-difference Jacobians of the inverse simplex maps, with a dense LU
//! determinant. Independent of the closed-form log-determinants in
//! [`crate::simplex`].

use nalgebra::DMatrix;

use crate::error::Result;
use crate::simplex::{log_ratio_inverse, ratio_inverse, LogRatioVector, RatioVector};

/// Central-difference step.
pub const FD_STEP: f64 = 1e-6;

/// `J[i][j] = (f(x + h e_j)_i - f(x - h e_j)_i) / 2h`.
pub fn central_difference_jacobian<F>(f: F, x: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let cols = x.len();
    let rows = f(x)?.len();
    let mut jac = DMatrix::zeros(rows, cols);
    let mut probe = x.to_vec();
    for j in 0..cols {
        probe[j] = x[j] + h;
        let plus = f(&probe)?;
        probe[j] = x[j] - h;
        let minus = f(&probe)?;
        probe[j] = x[j];
        for i in 0..rows {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// `ln |det|` by LU decomposition.
pub fn lu_log_abs_det(matrix: DMatrix<f64>) -> f64 {
    matrix.lu().determinant().abs().ln()
}

/// Finite-difference `ln |det J|` of the inverse ratio map restricted to the
/// first `n - 1` simplex coordinates.
pub fn fd_log_det_ratio_inverse(y: &RatioVector) -> Result<f64> {
    let chart = |v: &[f64]| -> Result<Vec<f64>> {
        let x = ratio_inverse(&RatioVector::new(v.to_vec())?)?;
        Ok(x.as_slice()[..v.len()].to_vec())
    };
    Ok(lu_log_abs_det(central_difference_jacobian(chart, y.entries(), FD_STEP)?))
}

/// Same for the inverse additive log-ratio map.
pub fn fd_log_det_log_ratio_inverse(y: &LogRatioVector) -> Result<f64> {
    let chart = |v: &[f64]| -> Result<Vec<f64>> {
        let x = log_ratio_inverse(&LogRatioVector::new(v.to_vec())?)?;
        Ok(x.as_slice()[..v.len()].to_vec())
    };
    Ok(lu_log_abs_det(central_difference_jacobian(chart, y.entries(), FD_STEP)?))
}
