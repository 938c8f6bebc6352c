//! The Gaussian-free-field constant and a side-by-side comparison of the
//! `O(1)` terms of the plasma and Coulomb-gas partition functions.
//!
//! All terms here are the `O(1)` part of a log partition function, i.e.
//! `+2 log eta_q`, not a contribution to a free energy.

use serde::{Deserialize, Serialize};

use crate::coulomb::TorusGeometry;
use crate::error::{Error, Result};
use crate::fit;
use crate::ocp::{self, NomeConvention};
use crate::qtheta;
use crate::tcg;

/// Agreement required between terms that should coincide.
pub const AGREEMENT_TOLERANCE: f64 = 1e-10;

/// `2 log eta_q(q)`: log partition function of the doubly periodic free field, zero mode dropped.
pub fn gff_constant(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::NomeOutOfRange(q));
    }
    Ok(2.0 * qtheta::eta_q(q)?.ln())
}

/// [`gff_constant`] at `q = exp(-pi ratio)`, without forming `q`.
pub fn gff_constant_ratio(ratio: f64) -> Result<f64> {
    Ok(2.0 * qtheta::log_eta_ratio(ratio)?)
}

/// Pairwise differences between the three terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancies {
    pub ocp_tcg: f64,
    pub tcg_gff: f64,
    pub ocp_gff: f64,
    /// `ocp_term_lw - tcg_term`.
    pub ocp_lw_tcg: f64,
    /// `ocp_lw_tcg - modular_shift`; zero when the reconciliation identity holds.
    pub reconciliation_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasimirReport {
    pub length: f64,
    pub width: f64,
    pub zeta: f64,
    /// Plasma term at `exp(-pi W / L)`, taken from the middle closed form of `Z_N`.
    pub ocp_term: f64,
    /// Plasma term at `exp(-pi L / W)`.
    pub ocp_term_lw: f64,
    /// Coulomb-gas term at `exp(-pi W / L)`.
    pub tcg_term: f64,
    pub gff_term: f64,
    /// `log(W / L)`: the shift between the two nome conventions.
    pub modular_shift: f64,
    pub discrepancies: Discrepancies,
    /// The convention under which the plasma and gas terms agree, if any.
    pub resolved_convention: Option<NomeConvention>,
}

/// `O(1)` part of `log Z_N` at fixed density, from two plasma sizes of the same aspect ratio.
fn ocp_o1_term(aspect: f64) -> Result<f64> {
    // log Z_N = N b + c exactly, so two sizes suffice.
    let g1 = plasma_geometry(1, aspect)?;
    let g2 = plasma_geometry(2, aspect)?;
    let (z1, z2) = (ocp::log_zn_middle(&g1)?, ocp::log_zn_middle(&g2)?);
    Ok(2.0 * z1 - z2)
}

/// Unit-density torus with `n` particles and `W / L = aspect`.
pub fn plasma_geometry(n: usize, aspect: f64) -> Result<TorusGeometry> {
    let l = (n as f64 / aspect).sqrt();
    TorusGeometry::new(l, aspect * l, n)
}

/// Collects the plasma, Coulomb-gas and free-field terms for the torus `geom`
/// under both nome readings.
pub fn casimir_report(geom: &TorusGeometry, zeta: f64) -> Result<CasimirReport> {
    if !(zeta >= 0.0) {
        return Err(Error::InvalidArgument(format!("fugacity must be >= 0, got {zeta}")));
    }
    let r = geom.width / geom.length;
    let ocp_term = ocp_o1_term(r)?;
    let ocp_term_lw = gff_constant_ratio(1.0 / r)?;
    // log Xi_2 ~ L W beta P + 2 log eta(exp(-pi W/L)) for every zeta > 0.
    let tcg_term = gff_constant_ratio(r)?;
    let gff_term = gff_constant(geom.nome_wl)?;
    let modular_shift = r.ln();
    let ocp_lw_tcg = ocp_term_lw - tcg_term;
    let discrepancies = Discrepancies {
        ocp_tcg: ocp_term - tcg_term,
        tcg_gff: tcg_term - gff_term,
        ocp_gff: ocp_term - gff_term,
        ocp_lw_tcg,
        reconciliation_residual: ocp_lw_tcg - modular_shift,
    };
    let ok_wl = discrepancies.ocp_tcg.abs() < AGREEMENT_TOLERANCE;
    let ok_lw = ocp_lw_tcg.abs() < AGREEMENT_TOLERANCE;
    let resolved_convention = match (ok_wl, ok_lw) {
        (true, _) => Some(NomeConvention::WOverL),
        (false, true) => Some(NomeConvention::LOverW),
        _ => None,
    };
    Ok(CasimirReport {
        length: geom.length,
        width: geom.width,
        zeta,
        ocp_term,
        ocp_term_lw,
        tcg_term,
        gff_term,
        modular_shift,
        discrepancies,
        resolved_convention,
    })
}

/// Ladder-fitted `O(1)` terms against the exact value `2 log eta_q(exp(-pi W/L))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub aspect: f64,
    pub zeta: f64,
    pub exact: f64,
    /// Intercept of `log Z_N = a + b N` over `N = 1..=12` at unit density.
    pub ocp_fit: f64,
    /// Negated intercept of the `-log Xi_2` ladder fit.
    pub tcg_fit: f64,
    pub ocp_rel_error: f64,
    pub tcg_rel_error: f64,
}

/// Relative tolerance for ladder-fitted remainders.
pub const LADDER_TOLERANCE: f64 = 0.02;

impl LadderReport {
    pub fn passes(&self) -> bool {
        self.ocp_rel_error < LADDER_TOLERANCE && self.tcg_rel_error < LADDER_TOLERANCE
    }
}

/// Fits the `O(1)` terms from a plasma ladder in `N` and a Coulomb-gas ladder in `L`.
pub fn ladder_remainders(aspect: f64, zeta: f64, cutoff: f64) -> Result<LadderReport> {
    let exact = gff_constant_ratio(aspect)?;
    let ns: Vec<f64> = (1..=12).map(f64::from).collect();
    let ys = ns
        .iter()
        .map(|&n| ocp::log_zn_middle(&plasma_geometry(n as usize, aspect)?))
        .collect::<Result<Vec<_>>>()?;
    let ocp_fit = fit::fit_basis(&ns, &ys, &[&|_| 1.0, &|n| n])?.coefficients[0];
    let gp = tcg::log_xi2_asymptotic(zeta, aspect, cutoff, &tcg::default_ladder())?;
    let tcg_fit = -gp.remainder;
    Ok(LadderReport {
        aspect,
        zeta,
        exact,
        ocp_fit,
        tcg_fit,
        ocp_rel_error: (ocp_fit / exact - 1.0).abs(),
        tcg_rel_error: (tcg_fit / exact - 1.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gff_at_square_nome() {
        // eta(i) = Gamma(1/4) / (2 pi^{3/4})
        let gamma_quarter = 3.625_609_908_221_908_3;
        let eta_i = gamma_quarter / (2.0 * PI.powf(0.75));
        let v = gff_constant((-PI).exp()).unwrap();
        assert!((v - 2.0 * eta_i.ln()).abs() < 1e-14);
        assert!((v + 0.527_344_140_497_835_7).abs() < 1e-14);
        assert_eq!(v, 2.0 * qtheta::eta_q((-PI).exp()).unwrap().ln());
    }

    #[test]
    fn gff_modular_identity() {
        for s in [0.5, 2.0, 1.7] {
            let d = gff_constant((-PI * s).exp()).unwrap() - gff_constant((-PI / s).exp()).unwrap();
            assert!((d + f64::ln(s)).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn gff_rejects_bad_nome() {
        for q in [0.0, 1.0, -0.2, 1.5] {
            assert!(matches!(gff_constant(q), Err(Error::NomeOutOfRange(_))));
        }
    }

    #[test]
    fn square_torus_terms_agree() {
        let g = TorusGeometry::new(1.0, 1.0, 1).unwrap();
        let r = casimir_report(&g, 0.5).unwrap();
        assert!(r.discrepancies.ocp_tcg.abs() < 1e-12);
        assert!(r.discrepancies.tcg_gff.abs() < 1e-12);
        assert!(r.discrepancies.ocp_lw_tcg.abs() < 1e-12);
        assert_eq!(r.modular_shift, 0.0);
    }

    #[test]
    fn rectangle_reconciled_by_modular_shift() {
        let g = TorusGeometry::new(1.0, 2.0, 2).unwrap();
        let r = casimir_report(&g, 0.3).unwrap();
        assert!((r.discrepancies.ocp_lw_tcg - 2f64.ln()).abs() < 1e-10);
        assert_eq!(r.resolved_convention, Some(NomeConvention::WOverL));
        for aspect in [0.5, 0.8, 1.25, 2.0] {
            let g = TorusGeometry::new(1.0, aspect, 1).unwrap();
            let r = casimir_report(&g, 0.1).unwrap();
            let d = r.discrepancies;
            assert!(d.ocp_tcg.abs() < 1e-10 && d.tcg_gff.abs() < 1e-10 && d.ocp_gff.abs() < 1e-10);
            assert!(d.reconciliation_residual.abs() < 1e-10);
        }
    }

    #[test]
    fn ladder_remainders_match() {
        for aspect in [1.0, 2.0] {
            let r = ladder_remainders(aspect, 0.3, 40.0).unwrap();
            assert!(r.passes(), "{r:?}");
        }
    }
}
