//! Exact partition function of the doubly periodic one-component plasma at
//! `Gamma = 2`, augmented by the many-body factor `|theta1(...)|^2`, with
//! quadrature and Monte Carlo checks of the defining configuration integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coulomb::{self, TorusGeometry};
use crate::error::{Error, Result};
use crate::qtheta::{self, Nome};
use crate::quadrature;

/// Minimum number of Monte Carlo samples accepted.
pub const MIN_SAMPLES: usize = 100_000;

/// Independent random streams merged by the Monte Carlo estimator.
pub const MC_STREAMS: u64 = 16;

/// The two candidate nomes of a rectangular torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NomeConvention {
    /// `q = exp(-pi W / L)`.
    WOverL,
    /// `q = exp(-pi L / W)`.
    LOverW,
}

impl NomeConvention {
    pub fn ratio(self, geom: &TorusGeometry) -> f64 {
        match self {
            Self::WOverL => geom.width / geom.length,
            Self::LOverW => geom.length / geom.width,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::WOverL => "exp(-pi W/L)",
            Self::LOverW => "exp(-pi L/W)",
        }
    }
}

/// Closed forms of `Z_N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZnChain {
    /// `(pi theta1'/L)^N e^{-(N^2/3) log(theta1'/2)} (L N (2 rho)^{-1/2})^N f_N^{-2}` at `exp(-pi W/L)`.
    pub log_middle: f64,
    /// `pi^N (2 rho)^{-N/2} q^{1/6} prod (1 - q^{2k})^2` at `q = exp(-pi W/L)`.
    pub log_final_wl: f64,
    /// The same at `q = exp(-pi L/W)`.
    pub log_final_lw: f64,
    pub middle: f64,
    pub final_wl: f64,
    pub final_lw: f64,
    /// `middle / final` under each convention.
    pub ratio_wl: f64,
    pub ratio_lw: f64,
    /// The convention under which `middle = final` to the tolerance, if exactly one does.
    pub matching: Option<NomeConvention>,
}

/// Relative tolerance for declaring the two closed forms equal.
pub const CHAIN_TOLERANCE: f64 = 1e-10;

fn check_n(geom: &TorusGeometry) -> Result<usize> {
    if geom.n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    Ok(geom.n)
}

/// `log (q^2; q^2)_inf` for `q = exp(-pi ratio)`.
fn log_poch(ratio: f64) -> Result<f64> {
    Ok(qtheta::log_eta_ratio(ratio)? + PI * ratio / 12.0)
}

/// `log f_N(q)` for `q = exp(-pi ratio)`, summed in log space.
pub fn log_f_n(n: usize, ratio: f64) -> Result<f64> {
    let nf = n as f64;
    let e = ((n - 1) * n.saturating_sub(2)) as f64;
    Ok(0.5 * nf * nf.ln() + e / 24.0 * PI * ratio - 0.5 * e * log_poch(ratio)?)
}

/// Logarithm of the middle closed form of `Z_N`.
pub fn log_zn_middle(geom: &TorusGeometry) -> Result<f64> {
    let n = check_n(geom)?;
    let nf = n as f64;
    let ratio = geom.width / geom.length;
    // log theta1'(0) = log 2 - pi ratio / 4 + 3 log (q^2;q^2)
    let lt1p = 2f64.ln() - PI * ratio / 4.0 + 3.0 * log_poch(ratio)?;
    Ok(
        nf * (PI.ln() + lt1p - geom.length.ln()) - nf * nf / 3.0 * (lt1p - 2f64.ln())
            + nf * (geom.length * nf * (2.0 * geom.rho).powf(-0.5)).ln()
            - 2.0 * log_f_n(n, ratio)?,
    )
}

/// Logarithm of the final closed form of `Z_N` under the given nome.
pub fn log_zn_final(geom: &TorusGeometry, convention: NomeConvention) -> Result<f64> {
    let nf = check_n(geom)? as f64;
    // q^{1/6} prod (1 - q^{2k})^2 = eta_q^2
    Ok(nf * PI.ln() - 0.5 * nf * (2.0 * geom.rho).ln() + 2.0 * qtheta::log_eta_ratio(convention.ratio(geom))?)
}

/// Evaluates the middle form and both readings of the final form.
pub fn zn_closed(geom: &TorusGeometry) -> Result<ZnChain> {
    let log_middle = log_zn_middle(geom)?;
    let log_final_wl = log_zn_final(geom, NomeConvention::WOverL)?;
    let log_final_lw = log_zn_final(geom, NomeConvention::LOverW)?;
    let ratio_wl = (log_middle - log_final_wl).exp();
    let ratio_lw = (log_middle - log_final_lw).exp();
    let ok_wl = (ratio_wl - 1.0).abs() < CHAIN_TOLERANCE;
    let ok_lw = (ratio_lw - 1.0).abs() < CHAIN_TOLERANCE;
    let matching = match (ok_wl, ok_lw) {
        (true, false) => Some(NomeConvention::WOverL),
        (false, true) => Some(NomeConvention::LOverW),
        // On the square both hold; the conventions coincide there.
        (true, true) if geom.length == geom.width => Some(NomeConvention::WOverL),
        _ => None,
    };
    Ok(ZnChain {
        log_middle,
        log_final_wl,
        log_final_lw,
        middle: log_middle.exp(),
        final_wl: log_final_wl.exp(),
        final_lw: log_final_lw.exp(),
        ratio_wl,
        ratio_lw,
        matching,
    })
}

/// Free energy `beta F = -log Z_N` split into extensive and `O(1)` parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyBreakdown {
    /// `(N/2) log(rho / (2 pi^2))`.
    pub bulk: f64,
    /// Identically zero on the torus.
    pub surface: f64,
    /// Signed `O(1)` contribution to `beta F`: `-2 log eta_q(exp(-pi W/L))`.
    pub casimir: f64,
    pub total: f64,
    /// `-log Z_N` from the middle closed form, for comparison with `total`.
    pub minus_log_middle: f64,
}

/// `beta F = -log Z_N` with `Z_N` from the middle closed form.
pub fn free_energy(geom: &TorusGeometry) -> Result<FreeEnergyBreakdown> {
    let nf = check_n(geom)? as f64;
    let bulk = 0.5 * nf * (geom.rho / (2.0 * PI * PI)).ln();
    let casimir = -2.0 * qtheta::log_eta_ratio(geom.width / geom.length)?;
    Ok(FreeEnergyBreakdown {
        bulk,
        surface: 0.0,
        casimir,
        total: bulk + casimir,
        minus_log_middle: -log_zn_middle(geom)?,
    })
}

/// A numerical estimate of an integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Quadrature error bound, or Monte Carlo standard error.
    pub std_error: f64,
    /// Integrand evaluations.
    pub samples: usize,
    pub seed: Option<u64>,
}

/// An estimate of the configuration integral compared with its closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionCheck {
    pub estimate: IntegralEstimate,
    pub closed_form: f64,
    pub rel_deviation: f64,
    /// `|estimate - closed| / std_error`.
    pub sigmas: f64,
}

impl PartitionCheck {
    fn new(estimate: IntegralEstimate, closed_form: f64) -> Self {
        let diff = (estimate.value - closed_form).abs();
        Self {
            estimate,
            closed_form,
            rel_deviation: diff / closed_form.abs(),
            sigmas: if estimate.std_error > 0.0 {
                diff / estimate.std_error
            } else {
                f64::INFINITY
            },
        }
    }

    pub fn relative_std_error(&self) -> f64 {
        self.estimate.std_error / self.estimate.value.abs()
    }
}

/// `N! (L N (2 rho)^{-1/2})^N f_N(q)^{-2}`.
pub fn partition_integral_closed(geom: &TorusGeometry) -> Result<f64> {
    let n = check_n(geom)?;
    let nf = n as f64;
    let log_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    Ok((log_fact + nf * (geom.length * nf * (2.0 * geom.rho).powf(-0.5)).ln()
        - 2.0 * log_f_n(n, geom.width / geom.length)?)
    .exp())
}

/// Integrand of the configuration integral at the points `zs`.
pub fn partition_integrand(zs: &[Complex64], geom: &TorusGeometry, nome: &Nome) -> Result<f64> {
    let w = geom.width;
    let gauss: f64 = zs.iter().map(|z| (z.im - 0.5 * w).powi(2)).sum();
    let mut v = (-2.0 * PI * geom.rho * gauss).exp() * coulomb::nbody_theta(zs, geom, nome)?.norm_sqr();
    for j in 0..zs.len() {
        for k in (j + 1)..zs.len() {
            v *= qtheta::theta1(PI * (zs[k] - zs[j]) / geom.length, nome)?.norm_sqr();
        }
    }
    Ok(v)
}

/// Adaptive 2D quadrature of the `N = 1` configuration integral.
pub fn verify_partition_quadrature(geom: &TorusGeometry, rel_tol: f64) -> Result<PartitionCheck> {
    if geom.n != 1 {
        return Err(Error::InvalidArgument(format!(
            "quadrature check needs N = 1, got {}",
            geom.n
        )));
    }
    let nome = geom.nome()?;
    let closed = partition_integral_closed(geom)?;
    let mut failure = None;
    let q = quadrature::adaptive_2d(
        |x, y| match partition_integrand(&[Complex64::new(x, y)], geom, &nome) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        (0.0, geom.length),
        (0.0, geom.width),
        &[],
        &[0.5 * geom.width],
        rel_tol * closed * 1e-2,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let q = q?;
    Ok(PartitionCheck::new(
        IntegralEstimate {
            value: q.value,
            std_error: q.error,
            samples: q.evaluations,
            seed: None,
        },
        closed,
    ))
}

struct StreamStats {
    mean: f64,
    var_of_mean: f64,
    count: usize,
}

/// Uniform-sampling Monte Carlo of the configuration integral for `N` in {2, 3}.
///
/// The samples are split over [`MC_STREAMS`] ChaCha8 streams of the same seed,
/// run in parallel, and merged by inverse-variance weighting, so the result
/// does not depend on the thread count.
pub fn verify_partition_mc(geom: &TorusGeometry, samples: usize, seed: Option<u64>) -> Result<PartitionCheck> {
    let seed = seed.ok_or(Error::SeedRequired)?;
    if !(2..=3).contains(&geom.n) {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo check covers N = 2, 3; got {}",
            geom.n
        )));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: samples,
            min: MIN_SAMPLES,
        });
    }
    let nome = geom.nome()?;
    let closed = partition_integral_closed(geom)?;
    let volume = geom.area().powi(geom.n as i32);
    let per = samples / MC_STREAMS as usize;
    let extra = samples % MC_STREAMS as usize;
    let stats: Vec<Result<StreamStats>> = (0..MC_STREAMS)
        .into_par_iter()
        .map(|s| {
            let count = per + usize::from((s as usize) < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let mut zs = vec![Complex64::new(0.0, 0.0); geom.n];
            let (mut sum, mut sum2) = (0.0, 0.0);
            for _ in 0..count {
                for z in zs.iter_mut() {
                    *z = Complex64::new(rng.random_range(0.0..geom.length), rng.random_range(0.0..geom.width));
                }
                let f = volume * partition_integrand(&zs, geom, &nome)?;
                sum += f;
                sum2 += f * f;
            }
            let c = count as f64;
            let mean = sum / c;
            let var = (sum2 / c - mean * mean).max(0.0) * c / (c - 1.0);
            Ok(StreamStats {
                mean,
                var_of_mean: var / c,
                count,
            })
        })
        .collect();
    let stats = stats.into_iter().collect::<Result<Vec<_>>>()?;
    let (mut wsum, mut acc) = (0.0, 0.0);
    for s in &stats {
        let w = 1.0 / s.var_of_mean.max(f64::MIN_POSITIVE);
        wsum += w;
        acc += w * s.mean;
    }
    let estimate = IntegralEstimate {
        value: acc / wsum,
        std_error: wsum.recip().sqrt(),
        samples: stats.iter().map(|s| s.count).sum(),
        seed: Some(seed),
    };
    Ok(PartitionCheck::new(estimate, closed))
}
