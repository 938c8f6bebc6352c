//! Lowest-Landau-level states on a torus and the `N`-particle free-fermion state.
//!
//! Units: `hbar c / e = 1`, so the field is `B = 1 / l^2` and a flux quantum is `2 pi`.
//! The second period is `W1 + i W2` and `tau = (-W1 + i W2) / L`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::i_pow;
use crate::linalg;
use crate::qtheta::{self, Nome};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance on the flux quantization condition.
pub const FLUX_TOLERANCE: f64 = 1e-12;

/// `W2 = 2 pi l^2 N / L`.
pub fn flux_constraint(n: usize, l: f64, length: f64) -> f64 {
    2.0 * PI * l * l * n as f64 / length
}

/// Torus with `N` flux quanta through the cell spanned by `L` and `W1 + i W2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagneticSetup {
    pub n: usize,
    pub l: f64,
    pub length: f64,
    pub w1: f64,
    pub w2: f64,
}

impl MagneticSetup {
    /// Chooses `W2` from the flux constraint.
    pub fn new(n: usize, l: f64, length: f64, w1: f64) -> Result<Self> {
        Self::with_periods(n, l, length, w1, flux_constraint(n, l, length))
    }

    /// The plasma mapping: `W1 = 0`, `l^2 = 1/(2 pi)`, so `W = N / L` and `rho = 1`.
    pub fn plasma(n: usize, length: f64) -> Result<Self> {
        Self::new(n, (2.0 * PI).sqrt().recip(), length, 0.0)
    }

    pub fn with_periods(n: usize, l: f64, length: f64, w1: f64, w2: f64) -> Result<Self> {
        let s = Self { n, l, length, w1, w2 };
        s.check()?;
        Ok(s)
    }

    /// Validates the invariants, in particular flux quantization.
    pub fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("flux integer N must be >= 1".into()));
        }
        if !(self.l > 0.0 && self.length > 0.0 && self.w1.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "need l > 0 and L > 0, got l = {}, L = {}",
                self.l, self.length
            )));
        }
        let expected = flux_constraint(self.n, self.l, self.length);
        if !((self.w2 - expected).abs() <= FLUX_TOLERANCE * expected.max(1.0)) {
            return Err(Error::FluxMismatch {
                expected,
                found: self.w2,
            });
        }
        Ok(())
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(-self.w1, self.w2) / self.length
    }

    pub fn nome(&self) -> Result<Nome> {
        Nome::from_tau(self.tau())
    }

    /// `B = 1 / l^2`.
    pub fn field(&self) -> f64 {
        1.0 / (self.l * self.l)
    }
}

/// `(B/2)(W2 x^2/(2 W1) + x y - W1 y^2/(2 W2))`; `B x y / 2` when `W1 = 0`.
pub fn gauge_f(x: f64, y: f64, b: f64, w1: f64, w2: f64) -> Result<f64> {
    if w2 == 0.0 {
        return Err(Error::DegenerateGeometry("W2 = 0".into()));
    }
    if w1 == 0.0 {
        return Ok(0.5 * b * x * y);
    }
    Ok(0.5 * b * (w2 * x * x / (2.0 * w1) + x * y - w1 * y * y / (2.0 * w2)))
}

/// `(A^L, A^W)` at `(x, y)`. For `W1 = 0`, `A^W` is the symmetric gauge `(B/2)(-y, x)`.
pub fn vector_potentials(x: f64, y: f64, b: f64, w1: f64, w2: f64) -> Result<([f64; 2], [f64; 2])> {
    if w2 == 0.0 {
        return Err(Error::DegenerateGeometry("W2 = 0".into()));
    }
    let a_l = [-b * y, 0.0];
    let a_w = if w1 == 0.0 {
        [-0.5 * b * y, 0.5 * b * x]
    } else {
        [0.5 * b * (w2 / w1 * x - y), 0.5 * b * (x - w1 / w2 * y)]
    };
    Ok((a_l, a_w))
}

fn check_level(m: usize, setup: &MagneticSetup) -> Result<()> {
    if m >= setup.n {
        return Err(Error::InvalidArgument(format!(
            "state index m = {m} outside 0..{}",
            setup.n
        )));
    }
    Ok(())
}

/// `psi_m(z) = e^{-y^2/2l^2} / sqrt(L l sqrt(pi)) q^{m^2/N} e^{-2 pi i m conj(z)/L}
/// theta3(pi (tau m - N conj(z)/L); q^N)`.
///
/// Evaluated as the single sum over `k = m (mod N)` of
/// `exp(i pi tau k^2/N - 2 pi i k conj(z)/L - y^2/2l^2)`, whose moduli form a
/// Gaussian in `k`, so no intermediate factor can overflow.
pub fn psi_lll(m: usize, z: Complex64, setup: &MagneticSetup) -> Result<Complex64> {
    setup.check()?;
    check_level(m, setup)?;
    Ok(psi_sum(m, z, setup))
}

fn psi_sum(m: usize, z: Complex64, setup: &MagneticSetup) -> Complex64 {
    let n = setup.n as i64;
    let l2 = setup.l * setup.l;
    let ipt = I * PI * setup.tau();
    let zb = z.conj();
    // Real exponent is -(2 pi l^2 k / L + y)^2 / (2 l^2).
    let a = 2.0 * PI * PI * l2 / (setup.length * setup.length);
    let centre = -z.im * setup.length / (2.0 * PI * l2);
    let reach = (36.0 / a).sqrt() + 1.0;
    let lo = (centre - reach).floor() as i64;
    let hi = (centre + reach).ceil() as i64;
    let first = lo + (m as i64 - lo).rem_euclid(n);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut k = first;
    while k <= hi {
        let kf = k as f64;
        let e = ipt * (kf * kf / n as f64) - 2.0 * PI * I * kf * zb / setup.length - z.im * z.im / (2.0 * l2);
        sum += e.exp();
        k += n;
    }
    sum / (setup.length * setup.l * PI.sqrt()).sqrt()
}

/// `psi_m` evaluated literally through `theta3`; agrees with [`psi_lll`] where nothing overflows.
pub fn psi_lll_theta(m: usize, z: Complex64, setup: &MagneticSetup) -> Result<Complex64> {
    setup.check()?;
    check_level(m, setup)?;
    let nome = setup.nome()?;
    let nome_n = Nome::from_tau(setup.tau() * setup.n as f64)?;
    let nf = setup.n as f64;
    let mf = m as f64;
    let zb = z.conj();
    let pre = (-z.im * z.im / (2.0 * setup.l * setup.l)).exp() / (setup.length * setup.l * PI.sqrt()).sqrt();
    let th = qtheta::theta3(PI * (setup.tau() * mf - nf * zb / setup.length), &nome_n)?;
    Ok(pre * nome.pow(mf * mf / nf) * (-2.0 * PI * I * mf * zb / setup.length).exp() * th)
}

fn check_particles(zs: &[Complex64], setup: &MagneticSetup) -> Result<()> {
    setup.check()?;
    if zs.len() != setup.n {
        return Err(Error::DimensionMismatch {
            expected: setup.n,
            found: zs.len(),
        });
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `det[psi_{k-1}(z_j)] / sqrt(N!)`.
pub fn slater_state(zs: &[Complex64], setup: &MagneticSetup) -> Result<Complex64> {
    check_particles(zs, setup)?;
    let rows: Vec<Vec<Complex64>> = zs
        .iter()
        .map(|&z| (0..setup.n).map(|m| psi_sum(m, z, setup)).collect())
        .collect();
    Ok(linalg::det(&rows) / factorial(setup.n).sqrt())
}

/// `i^{(N-1)(3N/2+1)} f_N(q) / (sqrt(N!) (L N l sqrt(pi))^{N/2}) e^{-sum y_j^2/2l^2}
/// theta_s(-pi sum conj(z_j)/L; q) prod_{j<k} theta1(-pi (conj(z_k) - conj(z_j))/L; q)`
/// with `s = 3` for odd `N` and `s = 1` for even `N`.
pub fn factored_state(zs: &[Complex64], setup: &MagneticSetup) -> Result<Complex64> {
    check_particles(zs, setup)?;
    let n = setup.n;
    let nf = n as f64;
    let nome = setup.nome()?;
    let l2 = setup.l * setup.l;
    let mut v = i_pow((n - 1) * (3 * n + 2) / 2) * qtheta::f_n_complex(n, &nome)?
        / (factorial(n).sqrt() * (setup.length * nf * setup.l * PI.sqrt()).powf(nf / 2.0));
    v *= (-zs.iter().map(|z| z.im * z.im).sum::<f64>() / (2.0 * l2)).exp();
    let total: Complex64 = zs.iter().map(|z| z.conj()).sum();
    let arg = -PI * total / setup.length;
    v *= if n % 2 == 1 {
        qtheta::theta3(arg, &nome)?
    } else {
        qtheta::theta1(arg, &nome)?
    };
    for j in 0..n {
        for k in (j + 1)..n {
            v *= qtheta::theta1(-PI * (zs[k].conj() - zs[j].conj()) / setup.length, &nome)?;
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coulomb::{self, TorusGeometry};
    use crate::quadrature::{periodic_points, GaussLegendre};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_config(rng: &mut ChaCha8Rng, s: &MagneticSetup) -> Vec<Complex64> {
        (0..s.n)
            .map(|_| c(rng.random_range(0.0..s.length), rng.random_range(0.0..s.w2)))
            .collect()
    }

    #[test]
    fn flux_constraint_examples() {
        assert!((flux_constraint(3, (2.0 * PI).sqrt().recip(), 1.0) - 3.0).abs() < 1e-14);
        assert!((flux_constraint(1, 1.0, 2.0 * PI) - 1.0).abs() < 1e-15);
        // B L W2 / (2 pi) = N
        let (n, l, len) = (5, 0.7, 1.9);
        let w2 = flux_constraint(n, l, len);
        assert!((len * w2 / (l * l) / (2.0 * PI) - n as f64).abs() < 1e-12);
    }

    #[test]
    fn flux_mismatch_is_reported() {
        let err = MagneticSetup::with_periods(2, 0.5, 1.0, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::FluxMismatch { .. }));
        let mut s = MagneticSetup::new(2, 0.5, 1.0, 0.0).unwrap();
        s.w2 *= 1.001;
        assert!(matches!(psi_lll(0, c(0.1, 0.1), &s), Err(Error::FluxMismatch { .. })));
    }

    #[test]
    fn gauge_function() {
        assert_eq!(gauge_f(0.0, 0.0, 1.3, 0.4, 0.9).unwrap(), 0.0);
        assert!(matches!(
            gauge_f(1.0, 1.0, 1.0, 0.3, 0.0),
            Err(Error::DegenerateGeometry(_))
        ));
        let h = 1e-5;
        for &(b, w1, w2) in &[(1.3, 0.4, 0.9), (2.0, -0.7, 1.5), (0.8, 0.0, 1.1)] {
            for &(x, y) in &[(0.3, 0.2), (-1.1, 0.7), (2.0, -0.4)] {
                let fx = (gauge_f(x + h, y, b, w1, w2).unwrap() - gauge_f(x - h, y, b, w1, w2).unwrap()) / (2.0 * h);
                let fy = (gauge_f(x, y + h, b, w1, w2).unwrap() - gauge_f(x, y - h, b, w1, w2).unwrap()) / (2.0 * h);
                let (al, aw) = vector_potentials(x, y, b, w1, w2).unwrap();
                assert!((fx - (aw[0] - al[0])).abs() < 1e-6);
                assert!((fy - (aw[1] - al[1])).abs() < 1e-6);
            }
        }
        // Small W1 approaches B x y / 2.
        let lim = gauge_f(0.4, 0.3, 1.0, 0.0, 1.0).unwrap();
        assert!((lim - 0.06).abs() < 1e-15);
    }

    #[test]
    fn periodicity_of_single_particle_states() {
        let s = MagneticSetup::new(3, 0.7, 1.3, 0.4).unwrap();
        for m in 0..3 {
            for z in [c(0.3, 0.2), c(1.1, -0.4), c(-0.6, 0.9)] {
                let v = psi_lll(m, z, &s).unwrap();
                assert!((psi_lll(m, z + s.length, &s).unwrap() - v).norm() < 1e-10);
                let shifted = psi_lll(m, z + c(s.w1, s.w2), &s).unwrap();
                let phase = (-I * s.w2 * (2.0 * z.re + s.w1) / (2.0 * s.l * s.l)).exp();
                assert!((v - shifted * phase).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn stable_sum_matches_theta_form() {
        let s = MagneticSetup::new(4, 0.6, 1.1, 0.25).unwrap();
        for m in 0..4 {
            for z in [c(0.2, 0.3), c(0.9, 1.2), c(0.5, -0.2)] {
                let a = psi_lll(m, z, &s).unwrap();
                let b = psi_lll_theta(m, z, &s).unwrap();
                assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()), "m={m} z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn orthonormality() {
        for n in 1..=4 {
            let s = MagneticSetup::plasma(n, 1.0).unwrap();
            let xs = periodic_points(0.0, s.length, 48);
            let ys = GaussLegendre::new(64).points(0.0, s.w2);
            let mut gram = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            for &(x, wx) in &xs {
                for &(y, wy) in &ys {
                    let v: Vec<Complex64> = (0..n).map(|m| psi_lll(m, c(x, y), &s).unwrap()).collect();
                    for a in 0..n {
                        for b in 0..n {
                            gram[a][b] += v[a] * v[b].conj() * wx * wy;
                        }
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let target = if a == b { 1.0 } else { 0.0 };
                    assert!((gram[a][b] - target).norm() < 1e-6, "N={n} ({a},{b}) {}", gram[a][b]);
                }
            }
        }
    }

    #[test]
    fn slater_antisymmetry() {
        let s = MagneticSetup::plasma(2, 1.2).unwrap();
        let zs = [c(0.3, 0.5), c(0.8, 1.1)];
        let a = slater_state(&zs, &s).unwrap();
        let b = slater_state(&[zs[1], zs[0]], &s).unwrap();
        assert!((a + b).norm() < 1e-15 * a.norm().max(1.0));
        assert!(matches!(
            slater_state(&zs[..1], &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn slater_over_factored_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=5 {
            for w1 in [0.0, 0.3] {
                let l = 0.8;
                let len = (2.0 * PI * l * l * n as f64).sqrt() * 0.9;
                let s = MagneticSetup::new(n, l, len, w1).unwrap();
                let mut first = None;
                for _ in 0..20 {
                    let zs = random_config(&mut rng, &s);
                    let ratio = slater_state(&zs, &s).unwrap() / factored_state(&zs, &s).unwrap();
                    let r0 = *first.get_or_insert(ratio);
                    assert!((ratio - r0).norm() < 1e-9 * r0.norm(), "N={n} W1={w1}: {ratio} vs {r0}");
                }
                // The constant is a sign, -1 only for N = 2 in this range.
                let sign = if n == 2 { -1.0 } else { 1.0 };
                assert!((first.unwrap() - sign).norm() < 1e-9, "N={n}: {:?}", first);
            }
        }
    }

    #[test]
    fn factored_modulus_invariant_under_period_shift() {
        let s = MagneticSetup::plasma(3, 1.1).unwrap();
        let zs = [c(0.2, 0.4), c(0.7, 1.9), c(1.0, 2.5)];
        let a = factored_state(&zs, &s).unwrap().norm();
        for j in 0..3 {
            let mut shifted = zs;
            shifted[j] += s.length;
            let b = factored_state(&shifted, &s).unwrap().norm();
            assert!((a - b).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn squared_state_is_boltzmann_factor_times_nbody_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let s = MagneticSetup::plasma(n, (n as f64).sqrt() * 1.1).unwrap();
            let g = TorusGeometry::new(s.length, s.w2, n).unwrap();
            assert!((g.rho - 1.0).abs() < 1e-12);
            let mut first = None;
            for _ in 0..20 {
                let zs = random_config(&mut rng, &s);
                let psi2 = factored_state(&zs, &s).unwrap().norm_sqr();
                let boltz = coulomb::ocp_log_boltzmann(&zs, 2.0, &g).unwrap().exp();
                let ratio = psi2 / (boltz * coulomb::nbody_weight(&zs, &g).unwrap());
                let r0 = *first.get_or_insert(ratio);
                assert!((ratio - r0).abs() < 1e-9 * r0, "N={n}: {ratio} vs {r0}");
            }
        }
    }

    #[test]
    fn one_and_two_particle_states_are_normalized() {
        for n in 1..=2 {
            let s = MagneticSetup::plasma(n, 1.0).unwrap();
            let xs = periodic_points(0.0, s.length, 32);
            let ys = GaussLegendre::new(48).points(0.0, s.w2);
            let nodes: Vec<(Complex64, f64)> = xs
                .iter()
                .flat_map(|&(x, wx)| ys.iter().map(move |&(y, wy)| (c(x, y), wx * wy)))
                .collect();
            let total: f64 = if n == 1 {
                nodes
                    .iter()
                    .map(|&(z, w)| w * slater_state(&[z], &s).unwrap().norm_sqr())
                    .sum()
            } else {
                let psi: Vec<[Complex64; 2]> = nodes
                    .iter()
                    .map(|&(z, _)| [psi_lll(0, z, &s).unwrap(), psi_lll(1, z, &s).unwrap()])
                    .collect();
                let mut acc = 0.0;
                for (a, &(_, wa)) in nodes.iter().enumerate() {
                    for (b, &(_, wb)) in nodes.iter().enumerate() {
                        let det = psi[a][0] * psi[b][1] - psi[a][1] * psi[b][0];
                        acc += wa * wb * det.norm_sqr() / 2.0;
                    }
                }
                acc
            };
            assert!((total - 1.0).abs() < 1e-8, "N={n}: {total}");
        }
    }
}
