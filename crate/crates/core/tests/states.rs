mod common;

use common::{c, coefficients, complex, configuration};
use ncdegree::algebra::{NormalOrderedPolynomial, Observable};
use ncdegree::states::oracle::{fock_oracle_expectation, fock_vector, OracleTarget};
use ncdegree::states::{even_cat, make_compass, overlap_with_coherent, CompassSpec, StateModel};
use ncdegree::C64;
use proptest::prelude::*;

/// `ψ_{2k} = μ^{−1/2} (−ν/2μ)^k √((2k)!)/k!`, accumulated in the log domain.
fn squeezed_fock_amplitudes(xi: C64, cutoff: usize) -> Vec<C64> {
    let mu = xi.norm().cosh();
    let nu = C64::from_polar(xi.norm().sinh(), xi.arg());
    let ratio = -nu / (2.0 * mu);
    let mut out = vec![C64::new(0.0, 0.0); cutoff + 1];
    let mut ln_fact = vec![0.0f64; cutoff + 1];
    for n in 1..=cutoff {
        ln_fact[n] = ln_fact[n - 1] + (n as f64).ln();
    }
    for k in 0..=cutoff / 2 {
        let magnitude = if ratio.norm() == 0.0 {
            if k == 0 { 1.0 } else { 0.0 }
        } else {
            (k as f64 * ratio.norm().ln() + 0.5 * ln_fact[2 * k] - ln_fact[k]).exp()
        };
        out[2 * k] = C64::from_polar(magnitude, k as f64 * ratio.arg()) / mu.sqrt();
    }
    out
}

fn coherent_bra(alpha: C64, cutoff: usize) -> Vec<C64> {
    ncdegree::states::oracle::coherent_fock_vector(alpha, cutoff)
}

#[test]
fn even_cat_has_no_odd_components() {
    for beta in [0.3, 1.0, 2.5] {
        let (v, _) = fock_vector(&even_cat(beta).unwrap(), 60).unwrap();
        for (n, amp) in v.iter().enumerate() {
            if n % 2 == 1 {
                assert!(amp.norm() < 1e-14, "beta {beta} n {n}: {amp}");
            }
        }
    }
}

#[test]
fn compass_components_and_normalization() {
    let psi = make_compass(CompassSpec { components: 4, beta: 2.0 }).unwrap();
    assert!((psi.self_overlap() - 1.0).abs() < 1e-10);
    let (v, _) = fock_vector(&psi, 80).unwrap();
    for (n, amp) in v.iter().enumerate() {
        if n % 4 != 0 {
            assert!(amp.norm() < 1e-12, "n {n}: {amp}");
        }
    }
}

#[test]
fn invalid_states_rejected() {
    assert!(make_compass(CompassSpec { components: 1, beta: 1.0 }).is_err());
    assert!(make_compass(CompassSpec { components: 3, beta: -1.0 }).is_err());
    assert!(StateModel::fock(vec![C64::new(0.0, 0.0); 3]).is_err());
    assert!(StateModel::squeezed_vacuum(C64::new(f64::NAN, 0.0)).is_err());
}

proptest! {
    #[test]
    fn squeezed_overlap_matches_fock_expansion(
        r in 0.0f64..1.2,
        phase in 0.0f64..std::f64::consts::TAU,
        alpha in complex(1.4),
    ) {
        let xi = C64::from_polar(r, phase);
        let psi = StateModel::squeezed_vacuum(xi).unwrap();
        let amps = squeezed_fock_amplitudes(xi, 80);
        let bra = coherent_bra(alpha, 80);
        let series: C64 = bra.iter().zip(&amps).map(|(a, b)| a.conj() * b).sum();
        let analytic = overlap_with_coherent(&psi, &[alpha]).unwrap();
        prop_assert!((series - analytic).norm() < 1e-8, "{series} vs {analytic}");
    }

    #[test]
    fn constructed_states_are_normalized(
        cfg in configuration(3, 0.3),
        coeffs in coefficients(3),
        xi in complex(1.0),
    ) {
        let sup = StateModel::superposition(coeffs, cfg).unwrap();
        prop_assert!((sup.self_overlap() - 1.0).abs() < 1e-10);
        let sq = StateModel::squeezed_vacuum(xi).unwrap();
        prop_assert!((sq.self_overlap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oracle_is_stable_in_the_cutoff(
        cfg in configuration(3, 0.2),
        coeffs in coefficients(3),
    ) {
        let obs = Observable::Polynomial(NormalOrderedPolynomial::quadrature_squared());
        let target = OracleTarget::Superposition { amplitudes: &cfg, coefficients: &coeffs };
        let a = fock_oracle_expectation(&obs, target, 60).unwrap();
        let b = fock_oracle_expectation(&obs, target, 80).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn small_cutoff_is_reported() {
    let psi = StateModel::coherent(&[c(3.0, 0.0)]).unwrap();
    let obs = Observable::Polynomial(NormalOrderedPolynomial::number(1, 0).unwrap());
    assert!(fock_oracle_expectation(&obs, OracleTarget::State(&psi), 10).is_err());
    let mean = fock_oracle_expectation(&obs, OracleTarget::State(&psi), 60).unwrap();
    assert!((mean - 9.0).abs() < 1e-10);
}
