//! Linear least squares and Richardson extrapolation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Outcome of a linear least-squares fit.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    pub residual_rms: f64,
    /// Ratio of largest to smallest singular value of the design matrix.
    pub condition: f64,
}

/// Fits `y ~ sum_j c_j basis_j(x)` for the given basis functions.
pub fn fit_basis(xs: &[f64], ys: &[f64], basis: &[&dyn Fn(f64) -> f64]) -> Result<LinearFit> {
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| basis.iter().map(|b| b(x)).collect()).collect();
    least_squares(&rows, ys)
}

/// Solves the overdetermined system `rows * c = ys` in the least-squares sense via SVD.
pub fn least_squares(rows: &[Vec<f64>], ys: &[f64]) -> Result<LinearFit> {
    let m = rows.len();
    if m != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: ys.len(),
        });
    }
    let k = rows.first().map_or(0, Vec::len);
    if k == 0 || m < k {
        return Err(Error::FitIllConditioned(format!("{m} observations for {k} parameters")));
    }
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::FitIllConditioned("ragged design matrix".into()));
    }
    if rows.iter().flatten().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::FitIllConditioned("non-finite data".into()));
    }
    let a = DMatrix::from_fn(m, k, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(Error::FitIllConditioned(format!("singular values {smax:e} / {smin:e}")));
    }
    let c = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::FitIllConditioned(e.to_string()))?;
    let resid = &a * &c - &b;
    Ok(LinearFit {
        coefficients: c.iter().copied().collect(),
        residual_rms: (resid.norm_squared() / m as f64).sqrt(),
        condition: smax / smin,
    })
}

/// One Richardson step for a grid refined by a factor of two with error `O(h^order)`.
pub fn richardson(coarse: f64, fine: f64, order: u32) -> f64 {
    let f = 2f64.powi(order as i32);
    (f * fine - coarse) / (f - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_quadratic() {
        let xs: Vec<f64> = (1..=8).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 2.0 * x + 0.25 / x).collect();
        let fit = fit_basis(&xs, &ys, &[&|_| 1.0, &|x| x, &|x| 1.0 / x]).unwrap();
        assert!((fit.coefficients[0] - 1.5).abs() < 1e-10);
        assert!((fit.coefficients[1] + 2.0).abs() < 1e-10);
        assert!((fit.coefficients[2] - 0.25).abs() < 1e-10);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn rejects_collinear_design() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [1.0, 2.0, 3.0];
        let err = fit_basis(&xs, &ys, &[&|x| x, &|x| 2.0 * x]).unwrap_err();
        assert!(matches!(err, Error::FitIllConditioned(_)));
    }

    #[test]
    fn rejects_underdetermined() {
        let err = least_squares(&[vec![1.0, 2.0]], &[1.0]).unwrap_err();
        assert!(matches!(err, Error::FitIllConditioned(_)));
    }

    #[test]
    fn richardson_cancels_leading_error() {
        let exact = 2.0;
        let f = |h: f64| exact + 0.3 * h * h + 0.01 * h.powi(3);
        let r = richardson(f(0.1), f(0.05), 2);
        assert!((r - exact).abs() < 1e-5);
    }
}
