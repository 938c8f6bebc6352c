//! Doubly periodic electrostatics on the rectangle `[0, L) x [0, W)`.
//!
//! All theta functions here use the nome `q = exp(-pi W / L)` with arguments
//! scaled by `pi / L`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qtheta::{self, Nome};

/// Separations closer than this to a lattice point (after scaling by `pi/L`) are rejected.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-9;

/// A rectangular torus with `n` particles at density `rho = n / (L W)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGeometry {
    pub length: f64,
    pub width: f64,
    pub n: usize,
    pub rho: f64,
    /// `exp(-pi W / L)`.
    pub nome_wl: f64,
    /// `exp(-pi L / W)`.
    pub nome_lw: f64,
}

impl TorusGeometry {
    pub fn new(length: f64, width: f64, n: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite() && width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "periods must be positive and finite, got L = {length}, W = {width}"
            )));
        }
        let nome_wl = (-PI * width / length).exp();
        let nome_lw = (-PI * length / width).exp();
        for q in [nome_wl, nome_lw] {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::InvalidGeometry(format!(
                    "aspect ratio W/L = {} leaves a nome outside (0, 1)",
                    width / length
                )));
            }
        }
        Ok(Self {
            length,
            width,
            n,
            rho: n as f64 / (length * width),
            nome_wl,
            nome_lw,
        })
    }

    /// Same aspect ratio and particle number scaled so that `rho` is fixed.
    pub fn with_particles(&self, n: usize) -> Result<Self> {
        Self::new(self.length, self.width, n)
    }

    /// The theta nome `exp(-pi W / L)`.
    pub fn nome(&self) -> Result<Nome> {
        Nome::from_ratio(self.width / self.length)
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    /// Representative of `z` in `[0, L) x [0, W)`.
    pub fn canonicalize(&self, z: Complex64) -> Complex64 {
        Complex64::new(wrap(z.re, self.length), wrap(z.im, self.width))
    }

    /// Distance from `d` to the nearest lattice point `m L + i n W`.
    pub fn lattice_distance(&self, d: Complex64) -> f64 {
        let dx = d.re - self.length * (d.re / self.length).round();
        let dy = d.im - self.width * (d.im / self.width).round();
        dx.hypot(dy)
    }
}

fn wrap(v: f64, period: f64) -> f64 {
    let r = v.rem_euclid(period);
    // rem_euclid can round up to the period itself.
    if r >= period {
        0.0
    } else {
        r
    }
}

fn centred(v: f64, period: f64) -> f64 {
    v - period * (v / period).round()
}

/// Particle coordinates reduced to the fundamental domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleConfig {
    zs: Vec<Complex64>,
}

impl ParticleConfig {
    pub fn new(zs: &[Complex64], geom: &TorusGeometry) -> Self {
        Self {
            zs: zs.iter().map(|&z| geom.canonicalize(z)).collect(),
        }
    }

    pub fn zs(&self) -> &[Complex64] {
        &self.zs
    }

    pub fn len(&self) -> usize {
        self.zs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zs.is_empty()
    }
}

impl std::ops::Deref for ParticleConfig {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.zs
    }
}

fn check_separation(d: Complex64, geom: &TorusGeometry) -> Result<()> {
    if geom.lattice_distance(d) * PI / geom.length < COINCIDENCE_THRESHOLD {
        Err(Error::CoincidentPoints)
    } else {
        Ok(())
    }
}

/// `log |theta1(pi d / L; q)|` with the `x` part of `d` reduced first.
fn log_abs_theta1(d: Complex64, geom: &TorusGeometry, nome: &Nome) -> Result<f64> {
    let d = Complex64::new(centred(d.re, geom.length), d.im);
    let t = qtheta::theta1(PI * d / geom.length, nome)?;
    let m = t.norm();
    if m == 0.0 || !m.is_finite() {
        return Err(Error::CoincidentPoints);
    }
    Ok(m.ln())
}

fn log_theta1_prime0(nome: &Nome) -> f64 {
    qtheta::theta1_prime0(nome).re.ln()
}

/// `-log( L |theta1(pi (z - zp)/L; q)| / (pi theta1'(0; q)) )`.
///
/// Periodic in `x`; a shift of `z` by `iW` adds `-(pi/L)(2(y - y') + W)`.
pub fn phi_quasi(z: Complex64, zp: Complex64, geom: &TorusGeometry) -> Result<f64> {
    let d = z - zp;
    check_separation(d, geom)?;
    let nome = geom.nome()?;
    let lt = log_abs_theta1(d, geom, &nome)?;
    Ok(-(geom.length.ln() + lt - PI.ln() - log_theta1_prime0(&nome)))
}

/// `pi (y - y')^2 / (L W) + phi_quasi(z, zp)`, doubly periodic.
pub fn phi_periodic(z: Complex64, zp: Complex64, geom: &TorusGeometry) -> Result<f64> {
    let d = z - zp;
    check_separation(d, geom)?;
    // Both terms are evaluated on the representative with |dy| <= W/2.
    let d = Complex64::new(centred(d.re, geom.length), centred(d.im, geom.width));
    let nome = geom.nome()?;
    let lt = log_abs_theta1(d, geom, &nome)?;
    let quasi = -(geom.length.ln() + lt - PI.ln() - log_theta1_prime0(&nome));
    Ok(PI * d.im * d.im / geom.area() + quasi)
}

/// `int_0^L dx int_0^W dy log |theta1(pi((x - x') + i(y - y'))/L; q)|`
/// `= (LW/3) log(theta1'(0;q)/2) + pi (y' - W/2)^2 + pi W^2/12`.
pub fn background_i(yp: f64, geom: &TorusGeometry) -> Result<f64> {
    let nome = geom.nome()?;
    let w = geom.width;
    Ok(geom.area() / 3.0 * (log_theta1_prime0(&nome) - 2f64.ln()) + PI * (yp - 0.5 * w).powi(2) + PI * w * w / 12.0)
}

/// Logarithm of the Boltzmann factor of the one-component plasma at coupling `gamma`:
///
/// `(N gamma/2) log(pi theta1'/L) - (gamma N^2/6) log(theta1'/2)
///  - pi rho gamma sum (y_j - W/2)^2 + gamma sum_{j<k} log|theta1(pi (z_k - z_j)/L)|`.
pub fn ocp_log_boltzmann(zs: &[Complex64], gamma: f64, geom: &TorusGeometry) -> Result<f64> {
    let nome = geom.nome()?;
    let n = zs.len() as f64;
    let rho = n / geom.area();
    let lt1p = log_theta1_prime0(&nome);
    let mut v = 0.5 * n * gamma * (PI.ln() + lt1p - geom.length.ln()) - gamma * n * n / 6.0 * (lt1p - 2f64.ln());
    for z in zs {
        let y = wrap(z.im, geom.width);
        v -= PI * rho * gamma * (y - 0.5 * geom.width).powi(2);
    }
    for j in 0..zs.len() {
        for k in (j + 1)..zs.len() {
            let d = zs[k] - zs[j];
            check_separation(d, geom)?;
            v += gamma * pair_log_theta(zs[j], zs[k], geom, &nome)?;
        }
    }
    Ok(v)
}

/// `log|theta1(pi (z_k - z_j)/L)|` for canonical representatives of both points.
fn pair_log_theta(zj: Complex64, zk: Complex64, geom: &TorusGeometry, nome: &Nome) -> Result<f64> {
    let d = geom.canonicalize(zk) - geom.canonicalize(zj);
    log_abs_theta1(d, geom, nome)
}

/// `|theta1(pi sum_j (conj(z_j) - (L - iW)/2) / L; q)|^2`.
pub fn nbody_weight(zs: &[Complex64], geom: &TorusGeometry) -> Result<f64> {
    let nome = geom.nome()?;
    Ok(nbody_theta(zs, geom, &nome)?.norm_sqr())
}

pub(crate) fn nbody_theta(zs: &[Complex64], geom: &TorusGeometry, nome: &Nome) -> Result<Complex64> {
    let shift = Complex64::new(geom.length, -geom.width) * 0.5;
    let s: Complex64 = zs.iter().map(|z| geom.canonicalize(*z).conj() - shift).sum();
    let s = Complex64::new(centred(s.re, geom.length), s.im);
    qtheta::theta1(PI * s / geom.length, nome)
}
