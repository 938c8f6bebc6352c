use nalgebra::DMatrix;
use num_complex::Complex64;

/// Determinant of a square complex matrix given row-major as `rows[j][k]`.
pub(crate) fn det(rows: &[Vec<Complex64>]) -> Complex64 {
    let n = rows.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let m = DMatrix::from_fn(n, n, |j, k| rows[j][k]);
    m.determinant()
}

/// Relative condition number of the determinant, `sum_{jk} |M_jk (M^-1)_kj|`;
/// infinite for a singular matrix.
pub(crate) fn det_condition(rows: &[Vec<Complex64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    let m = DMatrix::from_fn(n, n, |j, k| rows[j][k]);
    match m.clone().try_inverse() {
        Some(inv) => (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .map(|(j, k)| (m[(j, k)] * inv[(k, j)]).norm())
            .sum(),
        None => f64::INFINITY,
    }
}

/// Largest entry modulus, used as the scale for absolute comparisons.
pub(crate) fn max_entry(rows: &[Vec<Complex64>]) -> f64 {
    rows.iter().flat_map(|r| r.iter()).map(|z| z.norm()).fold(0.0, f64::max)
}
