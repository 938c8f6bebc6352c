//! End-to-end acceptance checks A1 to A9, shared by the `acceptance` test
//! target and the `selftest` subcommand.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coulomb::{self, TorusGeometry};
use crate::error::Result;
use crate::identities;
use crate::landau::{self, MagneticSetup};
use crate::ocp;
use crate::qtheta::{self, Nome};
use crate::tcg;
use crate::universality;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} ({:.2}s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.seconds,
            self.detail
        )
    }
}

fn run(id: &str, title: &str, body: impl FnOnce() -> Result<(bool, String)>) -> CriterionOutcome {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionOutcome {
        id: id.into(),
        title: title.into(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

const NOMES: [f64; 3] = [0.1, 0.3, 0.5];
const DRAWS: usize = 100;

/// Theta-Vandermonde for `N = 2..=6` and Frobenius for `N = 1..=4`, 100 draws per `(N, q)`.
pub fn a1() -> CriterionOutcome {
    run("A1", "identity suite", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
        let (mut worst_v, mut worst_f) = (0.0f64, 0.0f64);
        let (mut failures, mut redrawn) = (0, 0);
        for q in NOMES {
            let nome = Nome::real(q)?;
            for n in 2..=6 {
                let mut accepted = 0;
                while accepted < DRAWS {
                    let xs = identities::random_points(&mut rng, n, &nome);
                    let alpha = Complex64::new(rng.random_range(-0.5..0.5), 0.0);
                    let r = identities::theta_vandermonde_residual(&xs, alpha, &nome, n)?;
                    if !r.well_conditioned(1e-9) {
                        redrawn += 1;
                        continue;
                    }
                    accepted += 1;
                    worst_v = worst_v.max(r.rel_residual);
                    failures += usize::from(!r.passes(1e-9));
                }
            }
            for n in 1..=4 {
                let mut accepted = 0;
                while accepted < DRAWS {
                    let (ws, zs) = identities::random_point_pairs(&mut rng, n, &nome);
                    let alpha = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.1..0.1));
                    let r = identities::frobenius_residual(&ws, &zs, alpha, &nome)?;
                    if !r.well_conditioned(1e-9) {
                        redrawn += 1;
                        continue;
                    }
                    accepted += 1;
                    worst_f = worst_f.max(r.rel_residual);
                    failures += usize::from(!r.passes(1e-9));
                }
            }
        }
        Ok((
            failures == 0,
            format!(
                "max rel residual vandermonde {worst_v:.2e}, frobenius {worst_f:.2e}; {failures} draws above 1e-9; {redrawn} redrawn for determinant condition > 1e4"
            ),
        ))
    })
}

/// Slater determinant over factored form is one constant across 50 configurations, `N <= 5`.
pub fn a2() -> CriterionOutcome {
    run("A2", "wavefunction factorization", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
        let mut worst = 0.0f64;
        let mut constants = Vec::new();
        for n in 1..=5 {
            let setup = MagneticSetup::new(n, 0.8, (2.0 * PI * 0.64 * n as f64).sqrt() * 0.9, 0.0)?;
            let mut first: Option<Complex64> = None;
            for _ in 0..50 {
                let zs: Vec<Complex64> = (0..n)
                    .map(|_| Complex64::new(rng.random_range(0.0..setup.length), rng.random_range(0.0..setup.w2)))
                    .collect();
                let ratio = landau::slater_state(&zs, &setup)? / landau::factored_state(&zs, &setup)?;
                let r0 = *first.get_or_insert(ratio);
                worst = worst.max((ratio - r0).norm() / r0.norm());
            }
            constants.push(first.unwrap_or_default());
        }
        let consts: Vec<String> = constants.iter().map(|c| format!("{:+.3}", c.re)).collect();
        Ok((
            worst < 1e-9,
            format!(
                "max relative spread {worst:.2e}; constants for N=1..5: {}",
                consts.join(" ")
            ),
        ))
    })
}

/// Periodicity and Laplacian of the periodic Green function, and the short-distance law.
pub fn a3() -> CriterionOutcome {
    run("A3", "electrostatics", || {
        let g = TorusGeometry::new(1.0, 1.3, 1)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
        let mut periodic = 0.0f64;
        let mut laplace = 0.0f64;
        let h = 1e-3;
        let target = 2.0 * PI / g.area();
        let mut tested = 0;
        while tested < 20 {
            let z = Complex64::new(rng.random_range(0.0..g.length), rng.random_range(0.0..g.width));
            let zp = Complex64::new(rng.random_range(0.0..g.length), rng.random_range(0.0..g.width));
            if g.lattice_distance(z - zp) < 0.3 {
                continue;
            }
            tested += 1;
            let v = coulomb::phi_periodic(z, zp, &g)?;
            for shift in [Complex64::new(g.length, 0.0), Complex64::new(0.0, g.width)] {
                periodic = periodic.max((coulomb::phi_periodic(z + shift, zp, &g)? - v).abs());
            }
            let f = |d: Complex64| coulomb::phi_periodic(z + d, zp, &g);
            let lap = (f(Complex64::new(h, 0.0))?
                + f(Complex64::new(-h, 0.0))?
                + f(Complex64::new(0.0, h))?
                + f(Complex64::new(0.0, -h))?
                - 4.0 * v)
                / (h * h);
            laplace = laplace.max((lap / target - 1.0).abs());
        }
        let zp = Complex64::new(0.4, 0.6);
        let rem: Vec<f64> = (2..=8)
            .map(|k| {
                let z = zp + Complex64::new(0.6, 0.8) * 10f64.powi(-k);
                Ok(coulomb::phi_quasi(z, zp, &g)? + (z - zp).norm().ln())
            })
            .collect::<Result<_>>()?;
        let settle = (rem[rem.len() - 1] - rem[rem.len() - 2]).abs();
        let limit = rem[rem.len() - 1];
        Ok((
            periodic < 1e-10 && laplace < 1e-4 && settle < 1e-10,
            format!(
                "periodicity {periodic:.2e}, Laplacian rel error {laplace:.2e}, short-distance remainder -> {limit:.3e} (last step {settle:.2e})"
            ),
        ))
    })
}

/// Configuration integral: quadrature for `N = 1`, Monte Carlo for `N = 2`.
pub fn a4() -> CriterionOutcome {
    run("A4", "plasma partition function", || {
        let quad = ocp::verify_partition_quadrature(&TorusGeometry::new(1.0, 1.0, 1)?, 1e-6)?;
        let mc = ocp::verify_partition_mc(&TorusGeometry::new(1.0, 1.0, 2)?, 1_000_000, Some(0xA4))?;
        Ok((
            quad.rel_deviation < 1e-6 && mc.sigmas < 3.0 && mc.relative_std_error() <= 0.01,
            format!(
                "N=1 quadrature rel dev {:.2e}; N=2 Monte Carlo {:.1} sigma, sigma/value {:.2e}",
                quad.rel_deviation,
                mc.sigmas,
                mc.relative_std_error()
            ),
        ))
    })
}

/// The two closed forms of `Z_N` agree under one nome convention for every `N`, `W/L`.
pub fn a5() -> CriterionOutcome {
    run("A5", "partition function closed forms", || {
        let mut conventions = Vec::new();
        let mut notes = Vec::new();
        for r in [0.5, 1.0, 2.0] {
            for n in 1..=6 {
                let c = ocp::zn_closed(&TorusGeometry::new(1.0, r, n)?)?;
                conventions.push(c.matching);
                if n == 1 || n == 6 {
                    notes.push(format!(
                        "N={n} W/L={r}: middle/final {:.6} ({}), {:.6} ({})",
                        c.ratio_wl,
                        ocp::NomeConvention::WOverL.label(),
                        c.ratio_lw,
                        ocp::NomeConvention::LOverW.label()
                    ));
                }
            }
        }
        let first = conventions[0];
        let uniform = first.is_some() && conventions.iter().all(|c| *c == first);
        let resolved = match (uniform, first) {
            (true, Some(c)) => format!("resolved convention {}", c.label()),
            _ => "no convention matches".to_string(),
        };
        Ok((uniform, format!("{resolved}; {}", notes.join("; "))))
    })
}

/// Analytic roots against the Richardson-extrapolated oracle spectrum.
pub fn a6() -> CriterionOutcome {
    run("A6", "Coulomb-gas spectrum", || {
        let g = TorusGeometry::new(1.0, 1.0, 0)?;
        let mut worst = 0.0f64;
        for n in 0..=2 {
            let exact = tcg::eigen_roots(n, &g, 2);
            if exact.max_residual > 1e-10 {
                return Ok((false, format!("root residual {:.2e} for n={n}", exact.max_residual)));
            }
            let ext = tcg::extrapolated_magnitudes(n, &g, 100, 2)?;
            for (e, x) in ext.iter().zip(exact.magnitudes()) {
                worst = worst.max((e / x - 1.0).abs());
            }
        }
        Ok((
            worst < 1e-3,
            format!("max relative deviation {worst:.2e} over n=0..2, k=0..2"),
        ))
    })
}

/// Empty-gas value and the closed form against the oracle determinant at `zeta L = 0.5`.
pub fn a7() -> CriterionOutcome {
    run("A7", "grand partition function", || {
        let g = TorusGeometry::new(1.0, 1.0, 0)?;
        let t4 = qtheta::theta4(Complex64::new(0.0, 0.0), &g.nome()?)?.re;
        let empty = tcg::xi2_closed(0.0, &g, 8)?;
        let zeta = 0.5 / g.length;
        let closed = tcg::log_xi2_closed(zeta, &g, 8)?;
        let oracle = 2.0 * t4.ln() + tcg::extrapolated_log_det(zeta, &g, -8..=7, 100)?;
        let rel = ((closed - oracle).exp() - 1.0).abs();
        Ok((
            empty == t4 * t4 && rel < 1e-3,
            format!(
                "Xi2(0) - theta4(0)^2 = {:.1e}; modes n=-8..7: closed {:.6}, oracle {:.6}, rel {rel:.2e}",
                empty - t4 * t4,
                closed.exp(),
                oracle.exp()
            ),
        ))
    })
}

/// The `1/L` coefficient of the cut-off pressure sum.
pub fn a8() -> CriterionOutcome {
    run("A8", "Casimir pressure term", || {
        let ls = tcg::default_ladder();
        let f40 = tcg::fit_pressure(1.0, 40.0, &ls)?;
        let f80 = tcg::fit_pressure(1.0, 80.0, &ls)?;
        let target = PI / 6.0;
        let value = (f40.c / target - 1.0).abs();
        let stable = (f40.c / f80.c - 1.0).abs();
        Ok((
            value < 0.01 && stable < 0.01,
            format!(
                "c(40) = {:.6}, c(80) = {:.6}, pi/6 = {target:.6}; value rel error {value:.2e}, cutoff stability {stable:.2e}",
                f40.c, f80.c
            ),
        ))
    })
}

/// Agreement of the three `O(1)` terms, modular reconciliation, and ladder fits.
pub fn a9() -> CriterionOutcome {
    run("A9", "universality", || {
        let sq = universality::casimir_report(&TorusGeometry::new(1.0, 1.0, 1)?, 0.5)?;
        let square = sq.discrepancies.ocp_tcg.abs().max(sq.discrepancies.tcg_gff.abs());
        let mut recon = 0.0f64;
        for r in [0.5, 2.0] {
            let rep = universality::casimir_report(&TorusGeometry::new(1.0, r, 1)?, 0.5)?;
            recon = recon.max(rep.discrepancies.reconciliation_residual.abs());
        }
        let mut ladder = 0.0f64;
        for r in [1.0, 2.0] {
            let lr = universality::ladder_remainders(r, 0.3, 40.0)?;
            ladder = ladder.max(lr.ocp_rel_error).max(lr.tcg_rel_error);
        }
        Ok((
            square < 1e-12 && recon < 1e-10 && ladder < universality::LADDER_TOLERANCE,
            format!(
                "square-torus spread {square:.2e}, modular reconciliation residual {recon:.2e}, ladder rel error {ladder:.2e}"
            ),
        ))
    })
}

/// All criteria in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![a1(), a2(), a3(), a4(), a5(), a6(), a7(), a8(), a9()]
}
