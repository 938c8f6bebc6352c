//! Two-component Coulomb gas at `Gamma = 2`: the pair kernel, its Fourier
//! reduction to one-dimensional integral operators, the eigenvalue condition,
//! the grand partition function and its large-torus asymptotics.
//!
//! Fourier modes are labelled by `n` in `Z` with `mu = pi (2n + 1) / L`. Within
//! one mode the operator has eigenvalues `+-2 pi i / sqrt(mu^2 + (2 pi k / W)^2)`,
//! twice degenerate for each `k >= 1` (from `+-k`). Modes `n` and `-(n + 1)`
//! share a spectrum, which is how the closed form squares a product over `n >= 1`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coulomb::{TorusGeometry, COINCIDENCE_THRESHOLD};
use crate::error::{Error, Result};
use crate::fit::{self, LinearFit};
use crate::qtheta::{self, Nome};

/// Smallest accepted oracle grid.
pub const MIN_GRID: usize = 16;

/// `mu = pi (2n + 1) / L`.
pub fn mode_mu(n: i64, length: f64) -> f64 {
    PI * (2 * n + 1) as f64 / length
}

/// `pi theta1'(0) / (L theta4(0))`.
fn kernel_prefactor(geom: &TorusGeometry, nome: &Nome) -> Result<Complex64> {
    Ok(PI * qtheta::theta1_prime0(nome) / (geom.length * qtheta::theta4(Complex64::new(0.0, 0.0), nome)?))
}

/// The pair kernel `K(w - z) = (pi theta1'(0)/(L theta4(0))) theta4(pi(w-z)/L) / theta1(pi(w-z)/L)`
/// at `q = exp(-pi W / L)`.
pub fn kernel_k(w: Complex64, z: Complex64, geom: &TorusGeometry) -> Result<Complex64> {
    let d = w - z;
    if geom.lattice_distance(d) < COINCIDENCE_THRESHOLD {
        return Err(Error::SingularSeparation);
    }
    let nome = geom.nome()?;
    let u = PI * d / geom.length;
    let t1 = qtheta::theta1(u, &nome)?;
    if t1.norm() == 0.0 {
        return Err(Error::SingularSeparation);
    }
    Ok(kernel_prefactor(geom, &nome)? * qtheta::theta4(u, &nome)? / t1)
}

/// Real profile `r` with `g_n(y) = 2i (theta4(0)/theta1'(0)) r(y)`, written to
/// avoid overflow of `q^{-(2n+1)} = exp(mu W)`. `upper` selects the `0 < y` branch.
fn mode_profile(mu: f64, width: f64, y: f64, upper: bool) -> f64 {
    let branch = if upper { mu * width } else { 0.0 };
    if mu > 0.0 {
        (-mu * y + branch - mu * width).exp() / (-mu * width).exp_m1()
    } else {
        -(-mu * y + branch).exp() / (mu * width).exp_m1()
    }
}

/// Fourier coefficient of `theta4(pi(x+iy)/L) / theta1(pi(x+iy)/L)` against `exp(i pi (2n+1) x / L)`.
pub fn g_fourier(n: i64, y: f64, geom: &TorusGeometry) -> Result<Complex64> {
    if y == 0.0 {
        return Err(Error::JumpPoint);
    }
    if !(y.abs() < geom.width) {
        return Err(Error::InvalidArgument(format!(
            "y = {y} outside (-W, W) with W = {}",
            geom.width
        )));
    }
    let nome = geom.nome()?;
    let ratio = qtheta::theta4(Complex64::new(0.0, 0.0), &nome)? / qtheta::theta1_prime0(&nome);
    let r = mode_profile(mode_mu(n, geom.length), geom.width, y, y > 0.0);
    Ok(2.0 * Complex64::i() * ratio * r)
}

/// Analytic roots of `cosh(W sqrt(mu^2 + v^2)) = 1` for one Fourier mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub n: i64,
    pub mu: f64,
    /// `v` in `+-` pairs: `+i a_k, -i a_k` for `k = 0..=k_max`.
    pub roots: Vec<Complex64>,
    /// `2 pi / v`, aligned with `roots`.
    pub lambdas: Vec<Complex64>,
    /// Degeneracy of each root: 1 for `k = 0`, 2 otherwise.
    pub multiplicities: Vec<usize>,
    /// Largest `|cosh(W sqrt(mu^2 + v^2)) - 1|` over the roots.
    pub max_residual: f64,
}

impl ModeSpectrum {
    /// `|lambda|` for `k = 0..=k_max`.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.lambdas.iter().step_by(2).map(|l| l.norm()).collect()
    }

    /// `d log det(1 + zeta K) / d zeta^2` at zero fugacity from the truncated root set.
    pub fn pair_sum(&self) -> f64 {
        self.lambdas
            .iter()
            .zip(&self.multiplicities)
            .step_by(2)
            .map(|(l, &m)| m as f64 * l.norm_sqr())
            .sum()
    }
}

/// `v_k = +-i sqrt(mu^2 + (2 pi k / W)^2)` for `k = 0..=k_max`, each checked by its residual.
pub fn eigen_roots(n: i64, geom: &TorusGeometry, k_max: usize) -> ModeSpectrum {
    let mu = mode_mu(n, geom.length);
    let w = geom.width;
    let mut roots = Vec::with_capacity(2 * k_max + 2);
    let mut multiplicities = Vec::with_capacity(2 * k_max + 2);
    for k in 0..=k_max {
        let a = mu.hypot(2.0 * PI * k as f64 / w);
        let mult = if k == 0 { 1 } else { 2 };
        for s in [1.0, -1.0] {
            roots.push(Complex64::new(0.0, s * a));
            multiplicities.push(mult);
        }
    }
    let max_residual = roots
        .iter()
        .map(|v| ((w * (mu * mu + v * v).sqrt()).cosh() - 1.0).norm())
        .fold(0.0, f64::max);
    let lambdas = roots.iter().map(|v| 2.0 * PI / v).collect();
    ModeSpectrum {
        n,
        mu,
        roots,
        lambdas,
        multiplicities,
        max_residual,
    }
}

/// The two `M x M` Nystrom blocks of one Fourier mode, divided by `2 pi i`.
///
/// Midpoint grid on `[0, W]`; the diagonal cells straddle the kernel jump and
/// are integrated exactly.
fn mode_blocks(n: i64, geom: &TorusGeometry, m: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if m < MIN_GRID {
        return Err(Error::GridTooCoarse { got: m, min: MIN_GRID });
    }
    let mu = mode_mu(n, geom.length);
    let w = geom.width;
    let h = w / m as f64;
    // The kernel prefactor pi theta1'/theta4 cancels the 2 theta4/theta1'
    // in g_n, leaving 2 pi i r(y).
    let lower = mode_profile(mu, w, 0.0, false);
    let upper = mode_profile(mu, w, 0.0, true);
    let left = (mu * h / 2.0).exp_m1() / mu;
    let right = -(-mu * h / 2.0).exp_m1() / mu;
    let diag_a = lower * left + upper * right;
    let diag_b = upper * left + lower * right;
    let y = |i: usize| (i as f64 + 0.5) * h;
    let a = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            diag_a
        } else {
            let d = y(i) - y(j);
            h * mode_profile(mu, w, d, d > 0.0)
        }
    });
    let b = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            diag_b
        } else {
            let d = y(j) - y(i);
            h * mode_profile(mu, w, d, d > 0.0)
        }
    });
    Ok((a, b))
}

/// Discretized spectrum and Fredholm determinant of one Fourier mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub n: i64,
    pub grid: usize,
    /// All `2M` eigenvalues, largest magnitude first.
    pub eigenvalues: Vec<Complex64>,
    /// `log det(1 + zeta K)` restricted to this mode.
    pub log_det: f64,
}

/// Nystrom discretization of the coupled one-dimensional equations for mode `n`.
///
/// The block operator `[[0, A], [B, 0]]` has eigenvalues `+-sqrt(eig(A B))`, and
/// `det(1 + zeta T) = det(1 - zeta^2 A B)`. Both blocks are `2 pi i` times a
/// real matrix, so everything reduces to real linear algebra.
pub fn mode_oracle(n: i64, geom: &TorusGeometry, m: usize, zeta: f64) -> Result<OracleSpectrum> {
    let (ra, rb) = mode_blocks(n, geom, m)?;
    let prod = &ra * &rb;
    let four_pi2 = 4.0 * PI * PI;
    let mut eigenvalues: Vec<Complex64> = prod
        .complex_eigenvalues()
        .iter()
        .flat_map(|e| {
            let s = (-four_pi2 * e).sqrt();
            [s, -s]
        })
        .collect();
    eigenvalues.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    let log_det = log_det_mode(&prod, zeta)?;
    Ok(OracleSpectrum {
        n,
        grid: m,
        eigenvalues,
        log_det,
    })
}

fn log_det_mode(prod: &DMatrix<f64>, zeta: f64) -> Result<f64> {
    let m = prod.nrows();
    let mat = DMatrix::identity(m, m) + prod * (4.0 * PI * PI * zeta * zeta);
    let det = mat.lu().determinant();
    if !(det > 0.0) {
        return Err(Error::SingularConfiguration(format!(
            "mode determinant {det:e} is not positive"
        )));
    }
    Ok(det.ln())
}

/// `|lambda|` of the oracle spectrum, averaged within each degenerate cluster
/// (2 values for `k = 0`, 4 for each `k >= 1`), for `k = 0..=k_max`.
pub fn oracle_magnitudes(n: i64, geom: &TorusGeometry, m: usize, k_max: usize) -> Result<Vec<f64>> {
    let spec = mode_oracle(n, geom, m, 0.0)?;
    let mut out = Vec::with_capacity(k_max + 1);
    let mut start = 0;
    for k in 0..=k_max {
        let size = if k == 0 { 2 } else { 4 };
        let cluster = spec.eigenvalues.get(start..start + size).ok_or(Error::GridTooCoarse {
            got: m,
            min: start + size,
        })?;
        out.push(cluster.iter().map(|e| e.norm()).sum::<f64>() / size as f64);
        start += size;
    }
    Ok(out)
}

/// Order-2 Richardson extrapolation of [`oracle_magnitudes`] from grids `m` and `2m`.
pub fn extrapolated_magnitudes(n: i64, geom: &TorusGeometry, m: usize, k_max: usize) -> Result<Vec<f64>> {
    let coarse = oracle_magnitudes(n, geom, m, k_max)?;
    let fine = oracle_magnitudes(n, geom, 2 * m, k_max)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(&c, &f)| fit::richardson(c, f, 2))
        .collect())
}

/// Oracle `log det(1 + zeta K)` summed over the modes in `modes`.
pub fn oracle_log_det(zeta: f64, geom: &TorusGeometry, modes: RangeInclusive<i64>, m: usize) -> Result<f64> {
    let parts: Vec<Result<f64>> = modes
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let (ra, rb) = mode_blocks(n, geom, m)?;
            log_det_mode(&(&ra * &rb), zeta)
        })
        .collect();
    parts.into_iter().sum()
}

/// [`oracle_log_det`] extrapolated from grids `m, 2m, 4m`: first-order then second-order Richardson.
pub fn extrapolated_log_det(zeta: f64, geom: &TorusGeometry, modes: RangeInclusive<i64>, m: usize) -> Result<f64> {
    let f1 = oracle_log_det(zeta, geom, modes.clone(), m)?;
    let f2 = oracle_log_det(zeta, geom, modes.clone(), 2 * m)?;
    let f4 = oracle_log_det(zeta, geom, modes, 4 * m)?;
    Ok(fit::richardson(
        fit::richardson(f1, f2, 1),
        fit::richardson(f2, f4, 1),
        2,
    ))
}

fn check_zeta(zeta: f64) -> Result<()> {
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(Error::InvalidArgument(format!("fugacity must be >= 0, got {zeta}")));
    }
    Ok(())
}

/// `log[(cosh(W a) - 1) / (cosh(W mu) - 1)]`, `a = sqrt(mu^2 + (2 pi zeta)^2)`.
pub fn log_mode_factor(mu: f64, width: f64, zeta: f64) -> f64 {
    let mu = mu.abs();
    let a = mu.hypot(2.0 * PI * zeta);
    if width * a < 600.0 {
        ((width * a).cosh() - 1.0).ln() - ((width * mu).cosh() - 1.0).ln()
    } else {
        width * (a - mu) + 2.0 * ((-(-width * a).exp()).ln_1p() - (-(-width * mu).exp()).ln_1p())
    }
}

/// Modes `n` and `-(n+1)` of `n = 0..n_max-1` as `mu = pi (2p - 1)/L`, `p = 1..=n_max`.
fn paired_mus(geom: &TorusGeometry, n_max: usize) -> impl Iterator<Item = f64> + '_ {
    (1..=n_max).map(move |p| PI * (2 * p - 1) as f64 / geom.length)
}

fn check_truncation(zeta: f64, n_max: usize) -> Result<()> {
    check_zeta(zeta)?;
    if n_max == 0 && zeta > 0.0 {
        return Err(Error::TruncationInsufficient("n_max = 0 omits every mode".into()));
    }
    Ok(())
}

/// `log Xi_2`: `log theta4(0)^2 + 2 sum_{p=1}^{n_max} log[(cosh(W a) - 1)/(cosh(W mu) - 1)]`.
///
/// The product diverges logarithmically as `n_max` grows, so `n_max` is the
/// short-distance cutoff rather than a truncation error control.
pub fn log_xi2_closed(zeta: f64, geom: &TorusGeometry, n_max: usize) -> Result<f64> {
    check_truncation(zeta, n_max)?;
    let nome = geom.nome()?;
    let t4 = qtheta::theta4(Complex64::new(0.0, 0.0), &nome)?.re;
    let modes: f64 = paired_mus(geom, n_max)
        .map(|mu| log_mode_factor(mu, geom.width, zeta))
        .sum();
    Ok(2.0 * t4.ln() + 2.0 * modes)
}

/// `Xi_2`; at `zeta = 0` this is `theta4(0)^2` exactly.
pub fn xi2_closed(zeta: f64, geom: &TorusGeometry, n_max: usize) -> Result<f64> {
    check_truncation(zeta, n_max)?;
    let t4 = qtheta::theta4(Complex64::new(0.0, 0.0), &geom.nome()?)?.re;
    let modes: f64 = paired_mus(geom, n_max)
        .map(|mu| log_mode_factor(mu, geom.width, zeta))
        .sum();
    Ok(t4 * t4 * (2.0 * modes).exp())
}

/// `log Xi_2` from the grouped form: `theta4(0)^2` as a q-product, times
/// `prod e^{2W(a - mu)} ((1 - e^{-W a}) / (1 - e^{-W mu}))^4`.
pub fn log_xi2_grouped(zeta: f64, geom: &TorusGeometry, n_max: usize) -> Result<f64> {
    check_truncation(zeta, n_max)?;
    let log_q = -PI * geom.width / geom.length;
    let mut log_t4 = 0.0;
    for k in 1.. {
        let odd = (log_q * (2 * k - 1) as f64).exp();
        let even = (log_q * (2 * k) as f64).exp();
        log_t4 += 2.0 * (-odd).ln_1p() + (-even).ln_1p();
        if odd < 1e-18 {
            break;
        }
    }
    let w = geom.width;
    let modes: f64 = paired_mus(geom, n_max)
        .map(|mu| {
            let a = mu.hypot(2.0 * PI * zeta);
            2.0 * w * (a - mu) + 4.0 * ((-(-w * a).exp()).ln_1p() - (-(-w * mu).exp()).ln_1p())
        })
        .sum();
    Ok(2.0 * log_t4 + modes)
}

/// `4 pi sum_{n=1}^{cutoff} [sqrt(zeta^2 + (n - 1/2)^2 / L^2) - (n - 1/2) / L]`.
pub fn pressure_sum(zeta: f64, length: f64, cutoff: usize) -> f64 {
    let z2 = zeta * zeta;
    4.0 * PI
        * (1..=cutoff)
            .map(|n| {
                let m = (n as f64 - 0.5) / length;
                // sqrt(z^2 + m^2) - m without cancellation
                z2 / ((z2 + m * m).sqrt() + m)
            })
            .sum::<f64>()
}

/// Fit `pressure_sum ~ a + b L + c / L` at cutoff `floor(lambda L)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureFit {
    pub zeta: f64,
    pub cutoff_density: f64,
    pub lengths: Vec<f64>,
    pub a: f64,
    pub b: f64,
    /// Coefficient of `1 / L`.
    pub c: f64,
    pub residual_rms: f64,
}

pub fn fit_pressure(zeta: f64, cutoff_density: f64, lengths: &[f64]) -> Result<PressureFit> {
    check_zeta(zeta)?;
    if !(cutoff_density > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cutoff density must be > 0, got {cutoff_density}"
        )));
    }
    let ys: Vec<f64> = lengths
        .iter()
        .map(|&l| pressure_sum(zeta, l, (cutoff_density * l).floor() as usize))
        .collect();
    let LinearFit {
        coefficients,
        residual_rms,
        ..
    } = fit::fit_basis(lengths, &ys, &[&|_| 1.0, &|l| l, &|l| 1.0 / l])?;
    Ok(PressureFit {
        zeta,
        cutoff_density,
        lengths: lengths.to_vec(),
        a: coefficients[0],
        b: coefficients[1],
        c: coefficients[2],
        residual_rms,
    })
}

/// Large-torus decomposition `-log Xi_2 ~ -L W beta P + casimir`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrandPotentialBreakdown {
    pub zeta: f64,
    /// `W / L`, fixed along the ladder.
    pub aspect: f64,
    /// Modes kept per unit length: `n_max = floor(cutoff L)`.
    pub cutoff: f64,
    /// Reference geometry: the largest rung.
    pub length: f64,
    pub width: f64,
    /// Fitted renormalized pressure at this cutoff.
    pub beta_p: f64,
    /// `-L W beta P` at the reference geometry.
    pub bulk: f64,
    /// Predicted signed `O(1)` part of `-log Xi_2`: `-2 log eta_q(exp(-pi W / L))`.
    pub casimir: f64,
    /// Fitted `O(1)` part of `-log Xi_2`.
    pub remainder: f64,
    /// `|remainder / casimir - 1|`.
    pub rel_error: f64,
    /// `-bulk - casimir`.
    pub asymptote: f64,
    /// Exact `log Xi_2` at the reference geometry.
    pub log_xi2: f64,
}

/// Fits `-log Xi_2 = r + b L W + d / (L W)` over `W = aspect L`, `L` in `lengths`,
/// at fixed `zeta` and cutoff density, and compares `r` with the eta prediction.
pub fn log_xi2_asymptotic(zeta: f64, aspect: f64, cutoff: f64, lengths: &[f64]) -> Result<GrandPotentialBreakdown> {
    check_zeta(zeta)?;
    if !(cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cutoff density must be > 0, got {cutoff}"
        )));
    }
    let rungs: Vec<Result<(f64, f64)>> = lengths
        .par_iter()
        .map(|&l| {
            let g = TorusGeometry::new(l, aspect * l, 0)?;
            let n_max = (cutoff * l).floor() as usize;
            Ok((g.area(), -log_xi2_closed(zeta, &g, n_max)?))
        })
        .collect();
    let rungs = rungs.into_iter().collect::<Result<Vec<_>>>()?;
    let (areas, ys): (Vec<f64>, Vec<f64>) = rungs.into_iter().unzip();
    let f = fit::fit_basis(&areas, &ys, &[&|_| 1.0, &|s| s, &|s| 1.0 / s])?;
    let casimir = -2.0 * qtheta::log_eta_ratio(aspect)?;
    let l_ref = lengths.iter().copied().fold(f64::MIN, f64::max);
    let geom = TorusGeometry::new(l_ref, aspect * l_ref, 0)?;
    let bulk = f.coefficients[1] * geom.area();
    Ok(GrandPotentialBreakdown {
        zeta,
        aspect,
        cutoff,
        length: geom.length,
        width: geom.width,
        beta_p: -f.coefficients[1],
        bulk,
        casimir,
        remainder: f.coefficients[0],
        rel_error: (f.coefficients[0] / casimir - 1.0).abs(),
        asymptote: -bulk - casimir,
        log_xi2: log_xi2_closed(zeta, &geom, (cutoff * l_ref).floor() as usize)?,
    })
}

/// The standard ladder `L = 4, 5, ..., 16`.
pub fn default_ladder() -> Vec<f64> {
    (4..=16).map(f64::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;

    fn geom(l: f64, w: f64) -> TorusGeometry {
        TorusGeometry::new(l, w, 0).unwrap()
    }

    #[test]
    fn kernel_antiperiodic_in_x() {
        let g = geom(1.0, 1.3);
        let w = Complex64::new(0.31, 0.42);
        let z = Complex64::new(0.07, 0.11);
        let a = kernel_k(w + 1.0, z, &g).unwrap();
        let b = kernel_k(w, z, &g).unwrap();
        assert!((a + b).norm() < 1e-12 * b.norm());
    }

    #[test]
    fn kernel_laurent_limit_is_one() {
        let g = geom(1.0, 0.8);
        let z = Complex64::new(0.3, 0.2);
        for eps in [1e-4, 1e-5, 1e-6] {
            let d = Complex64::from_polar(eps, 0.7);
            let v = d * kernel_k(z + d, z, &g).unwrap();
            assert!((v - 1.0).norm() < 10.0 * eps, "{eps}: {v}");
        }
        assert_eq!(kernel_k(z, z, &g), Err(Error::SingularSeparation));
        assert_eq!(
            kernel_k(z + Complex64::new(1.0, 0.8), z, &g),
            Err(Error::SingularSeparation)
        );
    }

    #[test]
    fn g_fourier_jump_ratio() {
        let g = geom(1.0, 0.7);
        for n in -2..=2 {
            let eps = 1e-9;
            let ratio = g_fourier(n, eps, &g).unwrap() / g_fourier(n, -eps, &g).unwrap();
            let expected = (PI * (2 * n + 1) as f64 * 0.7).exp();
            assert!((ratio.re / expected - 1.0).abs() < 1e-6, "n={n}");
        }
        assert_eq!(g_fourier(0, 0.0, &g), Err(Error::JumpPoint));
        assert!(g_fourier(0, 0.7, &g).is_err());
    }

    #[test]
    fn g_fourier_matches_numerical_transform() {
        let g = geom(1.0, 1.0);
        let nome = g.nome().unwrap();
        for &y in &[-0.6, -0.25, 0.3, 0.55] {
            for n in -2..=2 {
                let mu = mode_mu(n, 1.0);
                let pts = quadrature::periodic_points(0.0, 1.0, 256);
                let coef: Complex64 = pts
                    .iter()
                    .map(|&(x, w)| {
                        let u = PI * Complex64::new(x, y);
                        let gv = qtheta::theta4(u, &nome).unwrap() / qtheta::theta1(u, &nome).unwrap();
                        w * gv * Complex64::new(0.0, -mu * x).exp()
                    })
                    .sum();
                let exact = g_fourier(n, y, &g).unwrap();
                assert!((coef - exact).norm() < 1e-8 * exact.norm().max(1.0), "y={y} n={n}");
            }
        }
    }

    #[test]
    fn g_fourier_decays_in_mode_index() {
        let g = geom(1.0, 1.0);
        for &y in &[-0.4, 0.3] {
            let mags: Vec<f64> = (0..8).map(|n| g_fourier(n, y, &g).unwrap().norm()).collect();
            assert!(mags.windows(2).all(|w| w[1] < w[0]));
            let mags: Vec<f64> = (0..8).map(|n| g_fourier(-n - 1, y, &g).unwrap().norm()).collect();
            assert!(mags.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn kernel_fourier_synthesis() {
        let g = geom(1.0, 1.0);
        let nome = g.nome().unwrap();
        let pre = kernel_prefactor(&g, &nome).unwrap();
        for (x, y) in [(0.13, 0.35), (0.71, -0.42), (0.5, 0.6)] {
            let d = Complex64::new(x, y);
            let synth: Complex64 = (-200..200)
                .map(|n| g_fourier(n, y, &g).unwrap() * Complex64::new(0.0, mode_mu(n, 1.0) * x).exp())
                .sum();
            let direct = kernel_k(d, Complex64::new(0.0, 0.0), &g).unwrap();
            assert!((pre * synth - direct).norm() < 1e-8 * direct.norm(), "{x},{y}");
        }
    }

    #[test]
    fn roots_satisfy_condition() {
        let g = geom(1.0, 1.5);
        for n in -3..=3 {
            let s = eigen_roots(n, &g, 6);
            assert!(s.max_residual < 1e-12, "n={n}: {}", s.max_residual);
            assert_eq!(s.roots.len(), 14);
            for pair in s.roots.chunks(2) {
                assert_eq!(pair[0], -pair[1]);
            }
            let mu = mode_mu(n, 1.0);
            let l0 = s.lambdas[0];
            assert!((l0 - Complex64::new(0.0, -2.0 * PI / mu.abs())).norm() < 1e-14);
        }
    }

    #[test]
    fn oracle_spectrum_pairs_and_mode_symmetry() {
        let g = geom(1.0, 1.0);
        let s = mode_oracle(1, &g, 64, 0.0).unwrap();
        assert_eq!(s.eigenvalues.len(), 128);
        for pair in s.eigenvalues.chunks(2) {
            assert!((pair[0] + pair[1]).norm() < 1e-10 * pair[0].norm().max(1e-3));
        }
        let a = oracle_magnitudes(1, &g, 64, 3).unwrap();
        let b = oracle_magnitudes(-2, &g, 64, 3).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
        assert_eq!(
            mode_oracle(0, &g, 8, 0.1),
            Err(Error::GridTooCoarse { got: 8, min: MIN_GRID })
        );
    }

    #[test]
    fn oracle_converges_to_roots() {
        let g = geom(1.0, 1.0);
        let exact = eigen_roots(0, &g, 0).magnitudes()[0];
        let e1 = (oracle_magnitudes(0, &g, 50, 0).unwrap()[0] - exact).abs();
        let e2 = (oracle_magnitudes(0, &g, 100, 0).unwrap()[0] - exact).abs();
        assert!((e1 / e2).log2() >= 1.0, "observed order {}", (e1 / e2).log2());
        let ext = extrapolated_magnitudes(0, &g, 50, 2).unwrap();
        for (e, x) in ext.iter().zip(eigen_roots(0, &g, 2).magnitudes()) {
            assert!((e / x - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn closed_mode_factor_matches_oracle() {
        let g = geom(1.0, 1.0);
        let zeta = 0.5;
        for n in [0, 1, -1, 3] {
            let exact = log_mode_factor(mode_mu(n, 1.0), 1.0, zeta);
            let ext = extrapolated_log_det(zeta, &g, n..=n, 100).unwrap();
            assert!((ext - exact).abs() < 1e-5, "n={n}");
        }
    }

    #[test]
    fn xi2_empty_gas() {
        for (l, w) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)] {
            let g = geom(l, w);
            let t4 = qtheta::theta4(Complex64::new(0.0, 0.0), &g.nome().unwrap()).unwrap().re;
            for n_max in [0, 5] {
                assert_eq!(xi2_closed(0.0, &g, n_max).unwrap(), t4 * t4);
            }
        }
        assert!(matches!(
            xi2_closed(0.3, &geom(1.0, 1.0), 0),
            Err(Error::TruncationInsufficient(_))
        ));
        assert!(xi2_closed(-0.1, &geom(1.0, 1.0), 3).is_err());
    }

    #[test]
    fn grouped_form_agrees() {
        for (l, w) in [(1.0, 1.0), (3.0, 1.5), (8.0, 8.0)] {
            let g = geom(l, w);
            for zeta in [0.0, 0.2, 1.0] {
                let a = log_xi2_closed(zeta, &g, 300).unwrap();
                let b = log_xi2_grouped(zeta, &g, 300).unwrap();
                assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{l}x{w} zeta={zeta}: {a} {b}");
            }
        }
    }

    #[test]
    fn xi2_derivative_matches_pair_sum() {
        let g = geom(1.0, 1.2);
        let h: f64 = 1e-6;
        let fd = (log_xi2_closed(h.sqrt(), &g, 1).unwrap() - log_xi2_closed(0.0, &g, 1).unwrap()) / h;
        // One paired mode: n = 0 and n = -1, each contributing sum_k mult |lambda_k|^2.
        let pair: f64 = [0, -1].iter().map(|&n| eigen_roots(n, &g, 20000).pair_sum()).sum();
        assert!((fd / pair - 1.0).abs() < 1e-4, "{fd} vs {pair}");
    }

    #[test]
    fn pressure_sum_basics() {
        assert_eq!(pressure_sum(0.0, 3.0, 100), 0.0);
        let direct: f64 = 4.0
            * PI
            * (1..=10)
                .map(|n| {
                    let m = (n as f64 - 0.5) / 2.0;
                    (0.25 + m * m).sqrt() - m
                })
                .sum::<f64>();
        assert!((pressure_sum(0.5, 2.0, 10) - direct).abs() < 1e-13);
    }

    #[test]
    fn pressure_coefficient_is_cutoff_stable() {
        let ls = default_ladder();
        let c40 = fit_pressure(1.0, 40.0, &ls).unwrap().c;
        let c80 = fit_pressure(1.0, 80.0, &ls).unwrap().c;
        assert!((c40 / c80 - 1.0).abs() < 0.01);
        // Midpoint Euler-Maclaurin gives -pi/6.
        assert!((c80 / (-PI / 6.0) - 1.0).abs() < 1e-3, "{c80}");
    }

    #[test]
    fn asymptotic_remainder_tracks_eta() {
        let ls = default_ladder();
        for aspect in [1.0, 2.0] {
            for zeta in [0.3, 0.6] {
                let b = log_xi2_asymptotic(zeta, aspect, 40.0, &ls).unwrap();
                assert!(b.rel_error < 0.02, "aspect={aspect} zeta={zeta}: {b:?}");
                assert!((b.asymptote + b.bulk + b.casimir).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn xi2_increases_with_fugacity() {
        let g = geom(1.0, 1.0);
        let vals: Vec<f64> = (0..10)
            .map(|k| log_xi2_closed(0.1 * k as f64, &g, 20).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }
}
