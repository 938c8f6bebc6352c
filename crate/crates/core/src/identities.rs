//! Numerical checks of the theta-Vandermonde and Frobenius determinant identities,
//! and of the Fourier-matrix determinant constants.
//!
//! Each check returns an [`IdentityResidual`] holding both sides as computed,
//! so callers can inspect the ratio as well as the difference.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::qtheta::{self, Nome};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Both sides of an identity and their discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_residual: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|)`, or `abs_residual` when both sides vanish.
    pub rel_residual: f64,
    /// Both sides are zero relative to `scale`.
    pub both_vanish: bool,
    /// Magnitude of the largest matrix entry entering the left side.
    pub scale: f64,
    /// Relative condition number of the determinant side; 1 when there is none.
    pub condition: f64,
}

/// Below this, relative to `scale`, a side counts as zero.
pub const VANISHING_THRESHOLD: f64 = 1e-12;

impl IdentityResidual {
    pub fn new(lhs: Complex64, rhs: Complex64, scale: f64) -> Self {
        let abs_residual = (lhs - rhs).norm();
        let big = lhs.norm().max(rhs.norm());
        let scale = scale.max(f64::MIN_POSITIVE);
        let both_vanish = big <= VANISHING_THRESHOLD * scale.max(1.0);
        let rel_residual = if both_vanish {
            abs_residual
        } else {
            abs_residual / big.max(f64::MIN_POSITIVE)
        };
        Self {
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            both_vanish,
            scale,
            condition: 1.0,
        }
    }

    fn with_condition(mut self, condition: f64) -> Self {
        self.condition = condition;
        self
    }

    /// Whether `f64` can resolve the determinant to `rel_tol`, given roughly
    /// `1e-15` relative error in each entry.
    pub fn well_conditioned(&self, rel_tol: f64) -> bool {
        self.condition * 1e-15 <= 1e-2 * rel_tol
    }

    /// `lhs / rhs`, NaN if the right side vanishes.
    pub fn ratio(&self) -> Complex64 {
        if self.rhs.norm() == 0.0 {
            Complex64::new(f64::NAN, f64::NAN)
        } else {
            self.lhs / self.rhs
        }
    }

    /// Relative check, or an absolute one scaled by the entries when both sides vanish.
    pub fn passes(&self, rel_tol: f64) -> bool {
        if self.both_vanish {
            self.abs_residual < VANISHING_THRESHOLD * self.scale.max(1.0)
        } else {
            self.rel_residual < rel_tol
        }
    }
}

/// `(-1)^{N(N-1)/2}`.
pub fn vandermonde_sign(n: usize) -> f64 {
    if (n * n.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Determinant of `theta_{3|1}(pi (x_j + alpha - l/N); q^{1/N})` against
/// `theta_{3|4}(pi sum (x_j + alpha); q) f_N(q) prod_{j<k} theta1(pi (x_k - x_j); q)`.
///
/// `theta3`/`theta3` is used for odd `N`, `theta1`/`theta4` for even `N`.
pub fn theta_vandermonde_residual(
    xs: &[Complex64],
    alpha: Complex64,
    nome: &Nome,
    n: usize,
) -> Result<IdentityResidual> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    if xs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: xs.len(),
        });
    }
    if nome.is_zero() {
        return Err(Error::NomeOutOfRange(0.0));
    }
    let odd = n % 2 == 1;
    let root = nome.power_nome(1.0 / n as f64)?;
    let nf = n as f64;
    let mut rows = Vec::with_capacity(n);
    for &x in xs {
        let mut row = Vec::with_capacity(n);
        for l in 1..=n {
            let u = PI * (x + alpha - l as f64 / nf);
            row.push(if odd {
                qtheta::theta3(u, &root)?
            } else {
                qtheta::theta1(u, &root)?
            });
        }
        rows.push(row);
    }
    let lhs = linalg::det(&rows);
    let condition = linalg::det_condition(&rows);

    let total: Complex64 = xs.iter().map(|&x| x + alpha).sum();
    let mut rhs = if odd {
        qtheta::theta3(PI * total, nome)?
    } else {
        qtheta::theta4(PI * total, nome)?
    };
    rhs *= qtheta::f_n_complex(n, nome)?;
    for j in 0..n {
        for k in (j + 1)..n {
            rhs *= qtheta::theta1(PI * (xs[k] - xs[j]), nome)?;
        }
    }
    Ok(IdentityResidual::new(lhs, rhs, linalg::max_entry(&rows)).with_condition(condition))
}

fn near_lattice(z: Complex64, tau: Complex64, period: f64, tol: f64) -> bool {
    // Lattice period * (m + n tau); only nearby translates matter.
    let w = z / period;
    let n0 = (w.im / tau.im).round() as i64;
    for n in (n0 - 1)..=(n0 + 1) {
        let r = w - tau * n as f64;
        let m = r.re.round();
        if (r - m).norm() * period < tol {
            return true;
        }
    }
    false
}

/// `F(w; z; q) = (-1)^{N(N-1)/2} prod_{j<k} theta1(w_k - w_j) theta1(z_k - z_j) / prod_{j,k} theta1(w_j - z_k)`.
pub fn frobenius_factor(ws: &[Complex64], zs: &[Complex64], nome: &Nome) -> Result<Complex64> {
    let n = ws.len();
    if zs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: zs.len(),
        });
    }
    let tau = nome.tau();
    let mut num = Complex64::new(vandermonde_sign(n), 0.0);
    for j in 0..n {
        for k in (j + 1)..n {
            num *= qtheta::theta1(ws[k] - ws[j], nome)? * qtheta::theta1(zs[k] - zs[j], nome)?;
        }
    }
    let mut den = Complex64::new(1.0, 0.0);
    for &w in ws {
        for &z in zs {
            if near_lattice(w - z, tau, PI, 1e-12) {
                return Err(Error::SingularConfiguration(format!(
                    "w - z = {} lies on the period lattice",
                    w - z
                )));
            }
            den *= qtheta::theta1(w - z, nome)?;
        }
    }
    Ok(num / den)
}

/// `theta4(sum (w_j - z_j) - alpha) F(w; z)` against
/// `theta4(alpha) det[theta4(w_j - z_k - alpha) / (theta4(alpha) theta1(w_j - z_k))]`.
pub fn frobenius_residual(
    ws: &[Complex64],
    zs: &[Complex64],
    alpha: Complex64,
    nome: &Nome,
) -> Result<IdentityResidual> {
    let n = ws.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one point".into()));
    }
    if zs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: zs.len(),
        });
    }
    if nome.is_zero() {
        return Err(Error::NomeOutOfRange(0.0));
    }
    let th4a = qtheta::theta4(alpha, nome)?;
    if th4a.norm() < 1e-300 {
        return Err(Error::SingularConfiguration("theta4(alpha) = 0".into()));
    }
    let f = frobenius_factor(ws, zs, nome)?;
    let shift: Complex64 = ws.iter().zip(zs).map(|(w, z)| w - z).sum();
    let lhs = qtheta::theta4(shift - alpha, nome)? * f;

    let mut rows = Vec::with_capacity(n);
    for &w in ws {
        let mut row = Vec::with_capacity(n);
        for &z in zs {
            let d = w - z;
            row.push(qtheta::theta4(d - alpha, nome)? / (th4a * qtheta::theta1(d, nome)?));
        }
        rows.push(row);
    }
    let rhs = th4a * linalg::det(&rows);
    Ok(IdentityResidual::new(lhs, rhs, linalg::max_entry(&rows)).with_condition(linalg::det_condition(&rows)))
}

/// `det[e^{2 pi i l k / N}]` (or with `k + 1/2`) against
/// `N^{N/2} i^{(N-1)(3N/2+1)}` (times `i^{N+1}` for the half shift).
pub fn fourier_det_constant(n: usize, half_shift: bool) -> Result<IdentityResidual> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let nf = n as f64;
    let offset = if half_shift { 0.5 } else { 0.0 };
    let rows: Vec<Vec<Complex64>> = (1..=n)
        .map(|l| {
            (0..n)
                .map(|k| (2.0 * PI * I * (l as f64) * (k as f64 + offset) / nf).exp())
                .collect()
        })
        .collect();
    let lhs = linalg::det(&rows);
    let condition = linalg::det_condition(&rows);
    // (N-1)(3N/2+1) = (N-1)(3N+2)/2 is always an integer.
    let mut power = ((n - 1) * (3 * n + 2) / 2) % 4;
    if half_shift {
        power = (power + n + 1) % 4;
    }
    let rhs = nf.powf(nf / 2.0) * i_pow(power);
    Ok(IdentityResidual::new(lhs, rhs, 1.0).with_condition(condition))
}

/// `i^k`.
pub fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// Draws `n` points with `Re` uniform in `[0, 1)` and `Im` uniform in `[-0.2, 0.2]`,
/// redrawing until all pairwise differences stay at least `1e-3` away from the
/// zeros of `theta1(pi .; q)`.
pub fn random_points<R: Rng + ?Sized>(rng: &mut R, n: usize, nome: &Nome) -> Vec<Complex64> {
    let tau = nome.tau();
    loop {
        let pts: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(0.0..1.0), rng.random_range(-0.2..=0.2)))
            .collect();
        let ok = (0..n).all(|j| ((j + 1)..n).all(|k| !near_lattice(pts[k] - pts[j], tau, 1.0, 1e-3)));
        if ok {
            return pts;
        }
    }
}

/// Two point sets for identities in the raw argument (period `pi`): [`random_points`]
/// scaled by `pi`, with cross differences also kept away from the zeros.
pub fn random_point_pairs<R: Rng + ?Sized>(rng: &mut R, n: usize, nome: &Nome) -> (Vec<Complex64>, Vec<Complex64>) {
    let tau = nome.tau();
    loop {
        let ws: Vec<Complex64> = random_points(rng, n, nome).into_iter().map(|z| PI * z).collect();
        let zs: Vec<Complex64> = random_points(rng, n, nome).into_iter().map(|z| PI * z).collect();
        // Raw theta arguments: zeros at pi (m + n tau).
        let clear = ws
            .iter()
            .all(|&w| zs.iter().all(|&z| !near_lattice(w - z, tau, PI, 1e-3)));
        let spread = (0..n).all(|j| {
            ((j + 1)..n)
                .all(|k| !near_lattice(ws[k] - ws[j], tau, PI, 1e-3) && !near_lattice(zs[k] - zs[j], tau, PI, 1e-3))
        });
        if clear && spread {
            return (ws, zs);
        }
    }
}
