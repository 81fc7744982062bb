//! Small dense least-squares solves.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Minimises `|A c - y|` for `A` given as columns. Returns the coefficients
/// and the RMS residual.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = columns.len();
    let n = y.len();
    if m == 0 || n < m || columns.iter().any(|c| c.len() != n) {
        return Err(Error::arg(format!(
            "least squares needs {m} columns of length {n} >= {m}"
        )));
    }
    // equilibrate columns so the rank test is scale free
    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    if norms.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::Precondition("least-squares basis has a zero column".into()));
    }
    let a = DMatrix::from_fn(n, m, |i, j| columns[j][i] / norms[j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-14 * smax {
        return Err(Error::Precondition("least-squares basis is degenerate".into()));
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::Precondition(format!("least-squares solve failed: {e}")))?;
    let resid = &a * &x - &b;
    let rms = (resid.norm_squared() / n as f64).sqrt();
    Ok((x.iter().zip(&norms).map(|(c, s)| c / s).collect(), rms))
}
