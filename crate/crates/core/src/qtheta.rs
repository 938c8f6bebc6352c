//! Jacobi theta functions, the eta-type q-product and the Vandermonde prefactor `f_N`.
//!
//! Conventions follow the nome `q = exp(i pi tau)`:
//!
//! - `theta1(z;q) = -i sum_n (-1)^n q^{(n+1/2)^2} e^{2i(n+1/2)z}`
//!   `= 2 q^{1/4} sin z prod_{n>=1} (1 - q^{2n} e^{2iz})(1 - q^{2n} e^{-2iz})(1 - q^{2n})`
//! - `theta3(u;q) = sum_n q^{n^2} e^{2inu}`
//! - `theta4(u;q) = sum_n (-1)^n q^{n^2} e^{2inu}`
//!   `= prod_{n>=1} (1 - e^{2iu} q^{2n-1})(1 - e^{-2iu} q^{2n-1})(1 - q^{2n})`
//!
//! Series are summed over a symmetric window of half-width
//! `n* = ceil(sqrt(ln eps / ln|q|))` centred on the dominant term, so the
//! neglected tail is bounded by `eps` relative to the largest term even for
//! complex arguments far from the real axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest nome modulus accepted by the series evaluators.
pub const MAX_NOME_MODULUS: f64 = 0.95;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this `|z|`, `theta1` switches to the product form.
const SMALL_ARGUMENT: f64 = 0.5;

/// Upper bound on the number of factors taken in any product expansion.
const PRODUCT_CAP: usize = 100_000;

/// Truncation control for the theta series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPrecision {
    /// Tail bound relative to the dominant term.
    pub epsilon: f64,
    /// Hard cap on the half-width of the summation window.
    pub max_terms: usize,
}

impl Default for SeriesPrecision {
    fn default() -> Self {
        Self {
            epsilon: 1e-14,
            max_terms: 64,
        }
    }
}

impl SeriesPrecision {
    pub fn new(epsilon: f64, max_terms: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::InvalidArgument("max_terms must be >= 1".into()));
        }
        Ok(Self { epsilon, max_terms })
    }

    /// Half-width of the summation window for a nome of modulus `abs_q`.
    pub fn half_width(&self, abs_q: f64) -> Result<usize> {
        if abs_q == 0.0 {
            return Ok(1);
        }
        let needed = (self.epsilon.ln() / abs_q.ln()).sqrt().ceil() as usize + 1;
        if needed > self.max_terms {
            return Err(Error::PrecisionUnreachable {
                needed,
                cap: self.max_terms,
            });
        }
        Ok(needed)
    }
}

/// The nome `q = exp(i pi tau)`, stored together with `log q = i pi tau`
/// so that fractional powers `q^a` are single-valued.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nome {
    q: Complex64,
    /// `i pi tau`; `-inf` when `q == 0`.
    log_q: Complex64,
}

impl Nome {
    /// Builds the nome from the half-period ratio `tau` (`Im tau > 0`).
    pub fn from_tau(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::NomeOutOfRange(f64::NAN));
        }
        let log_q = I * PI * tau;
        let q = log_q.exp();
        let nome = Self { q, log_q };
        nome.check_modulus()?;
        Ok(nome)
    }

    /// Builds the nome from a complex `q` using the principal logarithm.
    pub fn from_q(q: Complex64) -> Result<Self> {
        if !q.norm().is_finite() || q.norm() >= 1.0 {
            return Err(Error::NomeOutOfRange(q.norm()));
        }
        if q.norm() == 0.0 {
            return Ok(Self {
                q: Complex64::new(0.0, 0.0),
                log_q: Complex64::new(f64::NEG_INFINITY, 0.0),
            });
        }
        let nome = Self { q, log_q: q.ln() };
        nome.check_modulus()?;
        Ok(nome)
    }

    /// Real nome `0 <= q <= 0.95`.
    pub fn real(q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::NomeOutOfRange(q.abs()));
        }
        Self::from_q(Complex64::new(q, 0.0))
    }

    /// `q = exp(-pi * ratio)`, the rectangular-torus nome.
    pub fn from_ratio(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0) || !ratio.is_finite() {
            return Err(Error::NomeOutOfRange(f64::NAN));
        }
        let log_q = Complex64::new(-PI * ratio, 0.0);
        let nome = Self { q: log_q.exp(), log_q };
        nome.check_modulus()?;
        Ok(nome)
    }

    fn check_modulus(&self) -> Result<()> {
        let m = self.q.norm();
        if m > MAX_NOME_MODULUS {
            Err(Error::NomeOutOfRange(m))
        } else {
            Ok(())
        }
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn modulus(&self) -> f64 {
        self.q.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.q.norm() == 0.0
    }

    /// `tau`; infinite imaginary part for the zero nome.
    pub fn tau(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, f64::INFINITY);
        }
        self.log_q / (I * PI)
    }

    /// `log q = i pi tau`.
    pub fn log_q(&self) -> Complex64 {
        self.log_q
    }

    /// `q^a` on the branch fixed by `tau`.
    pub fn pow(&self, a: f64) -> Complex64 {
        if a == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if self.is_zero() {
            if a > 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(f64::INFINITY, 0.0)
            }
        } else {
            (self.log_q * a).exp()
        }
    }

    /// The nome `q^s` (i.e. `tau -> s tau`), range-checked.
    pub fn power_nome(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("nome power must be > 0, got {s}")));
        }
        if self.is_zero() {
            return Ok(*self);
        }
        let log_q = self.log_q * s;
        let nome = Self { q: log_q.exp(), log_q };
        nome.check_modulus()?;
        Ok(nome)
    }

    /// Real positive value of `q`, or an error for complex nomes.
    pub fn real_value(&self) -> Result<f64> {
        if self.q.im != 0.0 || self.q.re <= 0.0 {
            return Err(Error::NomeOutOfRange(self.q.norm()));
        }
        Ok(self.q.re)
    }
}

/// Sums `sum_n sign(n) exp(log_q (n+shift)^2 + 2i(n+shift)u)` over a window
/// centred on the dominant term.
fn centred_series(
    u: Complex64,
    nome: &Nome,
    shift: f64,
    alternating: bool,
    prec: &SeriesPrecision,
) -> Result<Complex64> {
    let half = prec.half_width(nome.modulus())? as i64;
    // Real part of the exponent is -a k^2 - 2 k Im(u) with a = -Re log q.
    let a = -nome.log_q.re;
    let centre = (-u.im / a - shift).round() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in (centre - half)..=(centre + half) {
        let k = n as f64 + shift;
        let mut term = (nome.log_q * (k * k) + 2.0 * I * k * u).exp();
        if alternating && n.rem_euclid(2) == 1 {
            term = -term;
        }
        sum += term;
    }
    Ok(sum)
}

/// `theta1(z;q)` at default precision.
pub fn theta1(z: Complex64, nome: &Nome) -> Result<Complex64> {
    theta1_with(z, nome, &SeriesPrecision::default())
}

pub fn theta1_with(z: Complex64, nome: &Nome, prec: &SeriesPrecision) -> Result<Complex64> {
    if nome.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // Reduce to the cell around the origin: theta1(w + m pi tau) =
    // (-1)^m q^{-m^2} e^{-2imw} theta1(w), theta1(z0 + k pi) = (-1)^k theta1(z0).
    // Otherwise the series cancels catastrophically next to the other zeros.
    let tau = nome.tau();
    let m = (z.im / (PI * tau.im)).round();
    let w = z - m * PI * tau;
    let k = (w.re / PI).round();
    let z0 = w - k * PI;
    let value = if z0.norm() < SMALL_ARGUMENT {
        // The series cancels next to the zero at the origin.
        theta1_product(z0, nome, prec)?
    } else {
        theta1_series(z0, nome, prec)?
    };
    if m == 0.0 && k == 0.0 {
        return Ok(value);
    }
    let sign = if (m + k).rem_euclid(2.0) == 1.0 { -1.0 } else { 1.0 };
    Ok(sign * (-nome.log_q() * (m * m) - 2.0 * I * m * w).exp() * value)
}

/// `theta1(z;q)` from its series alone.
pub fn theta1_series(z: Complex64, nome: &Nome, prec: &SeriesPrecision) -> Result<Complex64> {
    if nome.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(-I * centred_series(z, nome, 0.5, true, prec)?)
}

/// `theta1(z;q)` from its product expansion.
pub fn theta1_product(z: Complex64, nome: &Nome, prec: &SeriesPrecision) -> Result<Complex64> {
    if nome.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let e_plus = (2.0 * I * z).exp();
    let e_minus = (-2.0 * I * z).exp();
    let scale = e_plus.norm().max(e_minus.norm());
    let q2 = nome.pow(2.0);
    let mut q2n = q2;
    let mut prod = 2.0 * nome.pow(0.25) * z.sin();
    for _ in 0..PRODUCT_CAP {
        let one = Complex64::new(1.0, 0.0);
        prod *= (one - q2n * e_plus) * (one - q2n * e_minus) * (one - q2n);
        if q2n.norm() * scale < prec.epsilon * 1e-2 {
            return Ok(prod);
        }
        q2n *= q2;
    }
    Err(Error::PrecisionUnreachable {
        needed: PRODUCT_CAP + 1,
        cap: PRODUCT_CAP,
    })
}

pub fn theta3(u: Complex64, nome: &Nome) -> Result<Complex64> {
    theta3_with(u, nome, &SeriesPrecision::default())
}

/// `theta3(u) = theta4(u + pi/2)`, evaluated through the reduced `theta1`.
pub fn theta3_with(u: Complex64, nome: &Nome, prec: &SeriesPrecision) -> Result<Complex64> {
    theta4_with(u + PI / 2.0, nome, prec)
}

/// `theta3(u;q) = sum q^{n^2} e^{2inu}` from its series alone.
pub fn theta3_series(u: Complex64, nome: &Nome, prec: &SeriesPrecision) -> Result<Complex64> {
    if nome.is_zero() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    centred_series(u, nome, 0.0, false, prec)
}

pub fn theta4(u: Complex64, nome: &Nome) -> Result<Complex64> {
    theta4_with(u, nome, &SeriesPrecision::default())
}

/// `theta4(u) = -i q^{1/4} e^{iu} theta1(u + pi tau / 2)`. Going through `theta1`
/// inherits its argument reduction, so values next to the zeros keep full
/// relative accuracy.
pub fn theta4_with(u: Complex64, nome: &Nome, prec: &SeriesPrecision) -> Result<Complex64> {
    if nome.is_zero() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let shift = 0.5 * PI * nome.tau();
    Ok(-I * (0.25 * nome.log_q() + I * u).exp() * theta1_with(u + shift, nome, prec)?)
}

/// `theta4(u;q) = sum (-1)^n q^{n^2} e^{2inu}` from its series alone.
pub fn theta4_series(u: Complex64, nome: &Nome, prec: &SeriesPrecision) -> Result<Complex64> {
    if nome.is_zero() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    centred_series(u, nome, 0.0, true, prec)
}

/// `theta4(u;q)` from the triple product.
pub fn theta4_product(u: Complex64, nome: &Nome, prec: &SeriesPrecision) -> Result<Complex64> {
    if nome.is_zero() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let e_plus = (2.0 * I * u).exp();
    let e_minus = (-2.0 * I * u).exp();
    let scale = e_plus.norm().max(e_minus.norm());
    let one = Complex64::new(1.0, 0.0);
    let q2 = nome.pow(2.0);
    let mut q_odd = nome.q();
    let mut q_even = q2;
    let mut prod = one;
    for _ in 0..PRODUCT_CAP {
        prod *= (one - e_plus * q_odd) * (one - e_minus * q_odd) * (one - q_even);
        if q_odd.norm() * scale < prec.epsilon * 1e-2 {
            return Ok(prod);
        }
        q_odd *= q2;
        q_even *= q2;
    }
    Err(Error::PrecisionUnreachable {
        needed: PRODUCT_CAP + 1,
        cap: PRODUCT_CAP,
    })
}

/// `(q^2; q^2)_inf = prod_{j>=1} (1 - q^{2j})`.
pub fn q2_pochhammer(nome: &Nome) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if nome.is_zero() {
        return one;
    }
    let q2 = nome.pow(2.0);
    let mut q2n = q2;
    let mut prod = one;
    for _ in 0..PRODUCT_CAP {
        prod *= one - q2n;
        if q2n.norm() < 1e-18 {
            break;
        }
        q2n *= q2;
    }
    prod
}

/// `theta1'(0;q) = 2 q^{1/4} (q^2;q^2)_inf^3`.
pub fn theta1_prime0(nome: &Nome) -> Complex64 {
    if nome.is_zero() {
        return Complex64::new(0.0, 0.0);
    }
    2.0 * nome.pow(0.25) * q2_pochhammer(nome).powi(3)
}

/// `q^{1/12} prod_{k>=1} (1 - q^{2k})` for a real nome `0 < q < 1`.
pub fn eta_q(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::NomeOutOfRange(q.abs()));
    }
    let mut prod = 1.0;
    let q2 = q * q;
    let mut q2k = q2;
    for _ in 0..PRODUCT_CAP {
        prod *= 1.0 - q2k;
        if q2k < 1e-18 {
            return Ok(q.powf(1.0 / 12.0) * prod);
        }
        q2k *= q2;
    }
    Err(Error::PrecisionUnreachable {
        needed: PRODUCT_CAP + 1,
        cap: PRODUCT_CAP,
    })
}

/// `log eta_q(exp(-pi * ratio))` without forming the (possibly tiny) nome.
pub fn log_eta_ratio(ratio: f64) -> Result<f64> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::NomeOutOfRange(f64::NAN));
    }
    let log_q = -PI * ratio;
    let q2 = (2.0 * log_q).exp();
    let mut acc = log_q / 12.0;
    let mut q2k = q2;
    for _ in 0..PRODUCT_CAP {
        acc += (-q2k).ln_1p();
        if q2k < 1e-18 {
            return Ok(acc);
        }
        q2k *= q2;
    }
    Err(Error::PrecisionUnreachable {
        needed: PRODUCT_CAP + 1,
        cap: PRODUCT_CAP,
    })
}

/// `f_N(q) = N^{N/2} q^{-(N-1)(N-2)/24} (q^2;q^2)_inf^{-(N-1)(N-2)/2}` for complex nomes.
pub fn f_n_complex(n: usize, nome: &Nome) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let nf = n as f64;
    let e = ((n - 1) * (n.saturating_sub(2))) as f64;
    if e == 0.0 {
        return Ok(Complex64::new(nf.powf(nf / 2.0), 0.0));
    }
    if nome.is_zero() {
        return Err(Error::NomeOutOfRange(0.0));
    }
    let poch = q2_pochhammer(nome);
    Ok(nf.powf(nf / 2.0) * nome.pow(-e / 24.0) * poch.powf(-e / 2.0))
}

/// Real-nome `f_N(q)`, `0 < q < 1`.
pub fn f_n(n: usize, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::NomeOutOfRange(q.abs()));
    }
    let nome = Nome::real(q)?;
    Ok(f_n_complex(n, &nome)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
    }

    #[test]
    fn theta1_vanishes_at_origin() {
        let nome = Nome::real(0.3).unwrap();
        assert!(theta1(c(0.0, 0.0), &nome).unwrap().norm() < 1e-15);
    }

    #[test]
    fn theta1_accurate_next_to_other_zeros() {
        // mpmath jtheta(1, ., q), relative comparison
        let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
        let tau_zero = c(0.01, 2f64.ln() + 0.005);
        let v = theta1(tau_zero, &Nome::real(0.5).unwrap()).unwrap();
        assert!(rel(v, c(-0.011_199_200_624_512_212, -0.005_325_075_214_961_028)) < 1e-13);
        let v = theta1(c(PI + 0.003, -0.002), &Nome::real(0.8).unwrap()).unwrap();
        assert!(rel(v, c(-4.997_675_600_824_653e-6, 3.334_257_639_399_336_4e-6)) < 1e-13);
        let p = Nome::real(0.5).unwrap().power_nome(1.0 / 6.0).unwrap();
        let v = theta1(c(2.962_514_586_886_674, -0.322_968_431_326_352_17), &p).unwrap();
        assert!(rel(v, c(4.872_682_621_686_359e-8, 6.712_050_225_299_664e-7)) < 1e-12);
    }

    #[test]
    fn theta1_reference_value() {
        // mpmath jtheta(1, 0.7+0.2i, 0.1)
        let nome = Nome::real(0.1).unwrap();
        let z = c(0.7, 0.2);
        let expected = c(0.727570093196875316, 0.176803811548494249);
        let series = theta1_series(z, &nome, &SeriesPrecision::default()).unwrap();
        let product = theta1_product(z, &nome, &SeriesPrecision::default()).unwrap();
        assert!((series - product).norm() < 1e-12);
        assert!((series - expected).norm() < 1e-14);
    }

    #[test]
    fn theta3_theta4_reference_values() {
        // mpmath jtheta(3|4, 0.3-0.4i, 0.4)
        let nome = Nome::real(0.4).unwrap();
        let u = c(0.3, -0.4);
        let t3 = theta3(u, &nome).unwrap();
        let t4 = theta4(u, &nome).unwrap();
        assert!((t3 - c(1.930215395550386103, 0.517330977571176147)).norm() < 1e-13);
        assert!((t4 - c(0.165406977296523985, -0.290590655379535931)).norm() < 1e-13);
    }

    #[test]
    fn zero_nome_limits() {
        let zero = Nome::real(0.0).unwrap();
        for u in [c(0.0, 0.0), c(0.4, -0.3), c(2.0, 1.0)] {
            assert_eq!(theta3(u, &zero).unwrap(), c(1.0, 0.0));
        }
        assert_eq!(theta4(c(0.0, 0.0), &zero).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn theta4_series_matches_product_at_origin() {
        let nome = Nome::real(0.2).unwrap();
        let series = theta4(c(0.0, 0.0), &nome).unwrap();
        let mut prod = 1.0;
        for n in 1..200 {
            let q: f64 = 0.2;
            prod *= (1.0 - q.powi(2 * n - 1)).powi(2) * (1.0 - q.powi(2 * n));
        }
        assert!((series.re - prod).abs() < 1e-12);
        // mpmath jtheta(4, 0, 0.2)
        assert!((series.re - 0.603198976013107193).abs() < 1e-14);
    }

    #[test]
    fn theta1_prime0_checks() {
        let nome = Nome::real(0.25).unwrap();
        let d = theta1_prime0(&nome).re;
        // Central finite difference of the series.
        let h = 1e-5;
        let fd = (theta1(c(h, 0.0), &nome).unwrap() - theta1(c(-h, 0.0), &nome).unwrap()) / (2.0 * h);
        assert!((fd.re - d).abs() < 1e-8);
        let mut prod = 1.0;
        for n in 1..100 {
            prod *= (1.0 - 0.25f64.powi(2 * n)).powi(3);
        }
        assert!((d - 2.0 * 0.25f64.powf(0.25) * prod).abs() < 1e-14);
        // mpmath jtheta(1, 0, 0.25, 1)
        assert!((d - 1.150774264298842758).abs() < 1e-14);
    }

    #[test]
    fn theta1_prime0_small_nome_limit() {
        for q in [1e-3, 1e-6, 1e-9] {
            let nome = Nome::real(q).unwrap();
            let ratio = theta1_prime0(&nome).re / (2.0 * q.powf(0.25));
            assert!((ratio - 1.0).abs() < 4.0 * q * q + 1e-15);
        }
    }

    #[test]
    fn eta_classical_constant() {
        // Gamma(1/4) / (2 pi^{3/4}), evaluated independently with mpmath.
        let expected = 0.768225422326056659;
        let got = eta_q((-PI).exp()).unwrap();
        assert!((got - expected).abs() < 1e-14);
        assert!((log_eta_ratio(1.0).unwrap() - expected.ln()).abs() < 1e-14);
    }

    #[test]
    fn eta_small_nome_scaling() {
        for q in [1e-4, 1e-8] {
            let ratio = eta_q(q).unwrap() / q.powf(1.0 / 12.0);
            assert!((ratio - 1.0).abs() < 2.0 * q * q);
        }
    }

    #[test]
    fn eta_modular_aspect_ratios() {
        for r in [0.5, 2.0, 3.0] {
            let lhs = eta_q((-PI * r).exp()).unwrap();
            let rhs = (1.0 / r).sqrt() * eta_q((-PI / r).exp()).unwrap();
            assert!((lhs - rhs).abs() < 1e-13, "L/W = {r}");
        }
    }

    #[test]
    fn eta_rejects_out_of_range() {
        assert!(matches!(eta_q(0.0), Err(Error::NomeOutOfRange(_))));
        assert!(matches!(eta_q(1.0), Err(Error::NomeOutOfRange(_))));
        assert!(matches!(eta_q(-0.2), Err(Error::NomeOutOfRange(_))));
    }

    #[test]
    fn f_n_small_cases() {
        for q in [0.05, 0.3, 0.7] {
            assert!((f_n(1, q).unwrap() - 1.0).abs() < 1e-15);
            assert!((f_n(2, q).unwrap() - 2.0).abs() < 1e-15);
        }
        // mpmath: 3^{3/2} 0.3^{-1/12} / (0.09; 0.09)_inf
        assert!((f_n(3, 0.3).unwrap() - 6.369331567703211719).abs() < 1e-13);
    }

    #[test]
    fn nome_domain_is_enforced() {
        assert!(matches!(Nome::real(0.96), Err(Error::NomeOutOfRange(_))));
        assert!(matches!(Nome::real(1.0), Err(Error::NomeOutOfRange(_))));
        assert!(matches!(Nome::from_q(c(0.9, 0.9)), Err(Error::NomeOutOfRange(_))));
        assert!(Nome::from_tau(c(0.3, -0.1)).is_err());
    }

    #[test]
    fn precision_cap_is_reported() {
        let nome = Nome::real(0.95).unwrap();
        let tight = SeriesPrecision::new(1e-14, 4).unwrap();
        assert!(matches!(
            theta3_with(c(0.1, 0.0), &nome, &tight),
            Err(Error::PrecisionUnreachable { .. })
        ));
        assert!(theta3(c(0.1, 0.0), &nome).is_ok());
    }

    #[test]
    fn tau_and_q_agree() {
        let tau = c(-0.3, 0.8);
        let nome = Nome::from_tau(tau).unwrap();
        assert!((nome.tau() - tau).norm() < 1e-15);
        assert!((nome.q() - (I * PI * tau).exp()).norm() < 1e-15);
        let back = Nome::from_q(nome.q()).unwrap();
        assert!((back.tau() - tau).norm() < 1e-14);
    }

    fn nome_strategy() -> impl Strategy<Value = f64> {
        0.01f64..0.9
    }

    fn point_strategy() -> impl Strategy<Value = Complex64> {
        (-3.0f64..3.0, -0.8f64..0.8).prop_map(|(x, y)| c(x, y))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn theta1_quasi_periodicity(q in nome_strategy(), z in point_strategy()) {
            let nome = Nome::real(q).unwrap();
            let base = theta1(z, &nome).unwrap();
            let shifted = theta1(z + PI, &nome).unwrap();
            prop_assert!(close(shifted, -base, 1e-10));
            let tau_shift = theta1(z + PI * nome.tau(), &nome).unwrap();
            let scaled = tau_shift * nome.q() * (2.0 * I * z).exp();
            prop_assert!(close(scaled, -base, 1e-10));
        }

        #[test]
        fn parity(q in nome_strategy(), z in point_strategy()) {
            let nome = Nome::real(q).unwrap();
            prop_assert!(close(theta1(-z, &nome).unwrap(), -theta1(z, &nome).unwrap(), 1e-13));
            prop_assert!(close(theta3(-z, &nome).unwrap(), theta3(z, &nome).unwrap(), 1e-13));
            prop_assert!(close(theta4(-z, &nome).unwrap(), theta4(z, &nome).unwrap(), 1e-13));
        }

        #[test]
        fn series_and_product_agree(q in nome_strategy(), z in point_strategy()) {
            let nome = Nome::real(q).unwrap();
            let prec = SeriesPrecision::default();
            let t1 = theta1_series(z, &nome, &SeriesPrecision::default()).unwrap();
            let p1 = theta1_product(z, &nome, &prec).unwrap();
            prop_assert!(close(t1, p1, 1e-12));
            let t4 = theta4_series(z, &nome, &prec).unwrap();
            let p4 = theta4_product(z, &nome, &prec).unwrap();
            prop_assert!(close(t4, p4, 1e-12));
            prop_assert!(close(theta4(z, &nome).unwrap(), p4, 1e-12));
            prop_assert!(close(theta3(z, &nome).unwrap(), theta3_series(z, &nome, &prec).unwrap(), 1e-12));
        }

        #[test]
        fn eta_modular_identity(s in 0.3f64..3.0) {
            let lhs = eta_q((-PI * s).exp()).unwrap();
            let rhs = s.powf(-0.5) * eta_q((-PI / s).exp()).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-13 * lhs.abs().max(1e-300) + 1e-300);
        }

        #[test]
        fn doubling_max_terms_is_stable(q in nome_strategy(), z in point_strategy()) {
            let nome = Nome::real(q).unwrap();
            let base = SeriesPrecision::default();
            // Twice the cap and a window wide enough to resolve the tail exactly.
            let wide = SeriesPrecision::new(1e-30, 2 * base.max_terms).unwrap();
            let a = theta3_with(z, &nome, &base).unwrap();
            let b = theta3_with(z, &nome, &wide).unwrap();
            prop_assert!((a - b).norm() <= 10.0 * base.epsilon * (1.0 + a.norm()));
        }
    }
}
