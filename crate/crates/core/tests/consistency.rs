//! Checks that tie independent modules together.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torus_plasma::coulomb::{self, TorusGeometry};
use torus_plasma::landau::{self, MagneticSetup};
use torus_plasma::{ocp, tcg, universality};

/// `|Slater|^2` is the Gamma = 2 Boltzmann factor times the centre-of-mass
/// theta weight, up to a configuration-independent constant.
#[test]
fn landau_density_is_plasma_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=5usize {
        let l = 1.3 * (n as f64).sqrt();
        let setup = MagneticSetup::plasma(n, l).unwrap();
        let geom = TorusGeometry::new(l, setup.w2, n).unwrap();
        assert!((setup.nome().unwrap().modulus() - geom.nome_wl).abs() < 1e-15);
        let mut first = None;
        for _ in 0..20 {
            let zs: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(0.0..l), rng.random_range(0.0..setup.w2)))
                .collect();
            let density = landau::slater_state(&zs, &setup).unwrap().norm_sqr();
            let weight =
                coulomb::ocp_log_boltzmann(&zs, 2.0, &geom).unwrap().exp() * coulomb::nbody_weight(&zs, &geom).unwrap();
            let r = density / weight;
            let r0 = *first.get_or_insert(r);
            assert!((r / r0 - 1.0).abs() < 1e-10, "N={n}: {r} vs {r0}");
        }
    }
}

#[test]
fn plasma_casimir_is_free_field_constant() {
    for (l, w) in [(1.0, 1.0), (1.0, 0.6), (2.0, 3.0)] {
        for n in [1, 4, 9] {
            let g = TorusGeometry::new(l, w, n).unwrap();
            let f = ocp::free_energy(&g).unwrap();
            let gff = universality::gff_constant(g.nome_wl).unwrap();
            assert!((f.casimir + gff).abs() < 1e-12);
            assert!((f.bulk + f.surface + f.casimir - f.total).abs() < 1e-12 * f.total.abs().max(1.0));
        }
    }
}

#[test]
fn gas_ladder_remainder_is_free_field_constant() {
    let aspect = 1.5;
    let gp = tcg::log_xi2_asymptotic(0.4, aspect, 40.0, &tcg::default_ladder()).unwrap();
    let gff = universality::gff_constant_ratio(aspect).unwrap();
    assert!(
        (-gp.remainder / gff - 1.0).abs() < universality::LADDER_TOLERANCE,
        "{gp:?}"
    );
    assert!((gp.casimir + gff).abs() < 1e-14);
}

#[test]
fn both_systems_share_one_o1_term() {
    for aspect in [0.5, 1.0, 1.7] {
        let g = universality::plasma_geometry(3, aspect).unwrap();
        let rep = universality::casimir_report(&g, 0.2).unwrap();
        let chain = ocp::zn_closed(&g).unwrap();
        // Extensive part of log Z_N is linear in N at fixed density.
        let g6 = universality::plasma_geometry(6, aspect).unwrap();
        let lin = 2.0 * chain.log_middle - ocp::log_zn_middle(&g6).unwrap();
        assert!((lin - rep.ocp_term).abs() < 1e-10);
        assert!(rep.discrepancies.ocp_tcg.abs() < 1e-10);
    }
}
