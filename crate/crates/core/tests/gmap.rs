mod common;

use common::{c, coefficients, configuration, hermitian_polynomial, max_abs_diff, polynomial};
use ncdegree::algebra::{
    annihilation_g_matrix, annihilation_weighted_g_matrix, commutator_g_matrix, g_matrix, g_vector,
    gram_matrix, outer_g_matrix, AmplitudeConfiguration, NormalOrderedPolynomial, Observable,
};
use ncdegree::states::oracle::{coherent_fock_vector, fock_matrix_element, fock_vector, inner};
use ncdegree::states::{even_cat, StateModel};
use ncdegree::{CMatrix, C64};
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn fock_g_matrix(poly: &NormalOrderedPolynomial, cfg: &AmplitudeConfiguration) -> CMatrix {
    let r = cfg.rank();
    CMatrix::from_fn(r, r, |i, j| {
        fock_matrix_element(poly, cfg.amplitude(i)[0], cfg.amplitude(j)[0], 60).unwrap()
    })
}

fn diag(cfg: &AmplitudeConfiguration) -> CMatrix {
    CMatrix::from_fn(cfg.rank(), cfg.rank(), |i, j| if i == j { cfg.amplitude(i)[0] } else { c(0.0, 0.0) })
}

fn cases() -> ProptestConfig {
    ProptestConfig::with_cases(100)
}

#[test]
fn quadrature_matrix_matches_number_basis() {
    let cfg = AmplitudeConfiguration::single_mode(&[c(0.0, 1.2), c(0.0, -1.2), c(0.8, 0.1), c(-1.9, 0.4)]).unwrap();
    let k = NormalOrderedPolynomial::quadrature_squared();
    let g = g_matrix(&Observable::Polynomial(k.clone()), &cfg).unwrap();
    assert!(max_abs_diff(&g.entries, &fock_g_matrix(&k, &cfg)) < TOL);
}

#[test]
fn projector_vector_matches_number_basis() {
    let cfg = AmplitudeConfiguration::single_mode(&[c(0.0, 0.0), c(1.0, -0.5), c(-1.7, 1.1)]).unwrap();
    for state in [even_cat(1.3).unwrap(), StateModel::squeezed_vacuum(c(0.6, 0.3)).unwrap()] {
        let g = g_vector(&state, &cfg).unwrap();
        let (psi, tail) = fock_vector(&state, 60).unwrap();
        assert!(tail < 1e-12);
        for (i, a) in cfg.iter().enumerate() {
            let oracle = inner(&coherent_fock_vector(a[0], 60), &psi);
            assert!((g[i] - oracle).norm() < TOL, "{} vs {}", g[i], oracle);
        }
    }
}

#[test]
fn identity_and_ladder_edge_cases() {
    let cfg = AmplitudeConfiguration::single_mode(&[c(0.3, 0.0), c(-0.4, 0.9)]).unwrap();
    let id = g_matrix(&Observable::Polynomial(NormalOrderedPolynomial::identity(1)), &cfg).unwrap();
    assert!(max_abs_diff(&id.entries, &gram_matrix(&cfg).entries) < 1e-15);
    let ga = annihilation_g_matrix(&cfg).unwrap();
    assert!(max_abs_diff(&ga.entries, &(gram_matrix(&cfg).entries * diag(&cfg))) < 1e-15);
    let comm = commutator_g_matrix(&Observable::Polynomial(NormalOrderedPolynomial::identity(1)), &cfg).unwrap();
    assert!(comm.entries.iter().all(|z| z.norm() < 1e-15));
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn polynomial_matrices_match_number_basis(p in polynomial(3), cfg in configuration(3, 0.2)) {
        let g = p.g_matrix(&cfg).unwrap();
        prop_assert!(max_abs_diff(&g.entries, &fock_g_matrix(&p, &cfg)) < TOL);
    }

    #[test]
    fn linearity(
        p1 in polynomial(3),
        p2 in polynomial(3),
        mu1 in common::complex(2.0),
        mu2 in common::complex(2.0),
        cfg in configuration(3, 0.2),
    ) {
        let combo = p1.scaled(mu1).plus(&p2.scaled(mu2)).unwrap();
        let lhs = combo.g_matrix(&cfg).unwrap().entries;
        let rhs = p1.g_matrix(&cfg).unwrap().entries * mu1 + p2.g_matrix(&cfg).unwrap().entries * mu2;
        prop_assert!(max_abs_diff(&lhs, &rhs) < TOL);
    }

    #[test]
    fn conjugation(p in polynomial(3), cfg in configuration(3, 0.2)) {
        let lhs = p.adjoint().g_matrix(&cfg).unwrap().entries;
        let rhs = p.g_matrix(&cfg).unwrap().entries.adjoint();
        prop_assert!(max_abs_diff(&lhs, &rhs) < TOL);
    }

    #[test]
    fn product_through_intermediate_states(
        p1 in polynomial(2),
        p2 in polynomial(2),
        cfg in configuration(3, 0.2),
    ) {
        let r = cfg.rank();
        let left = fock_g_matrix(&p1, &cfg);
        let right = fock_g_matrix(&p2, &cfg);
        let summed = CMatrix::from_fn(r, r, |i, j| (0..r).map(|k| left[(i, k)] * right[(k, j)]).sum::<C64>());
        let product = p1.g_matrix(&cfg).unwrap().entries * p2.g_matrix(&cfg).unwrap().entries;
        prop_assert!(max_abs_diff(&summed, &product) < TOL);
    }

    #[test]
    fn ladder_shift(cfg in configuration(3, 0.2), use_number in any::<bool>()) {
        let l = if use_number {
            NormalOrderedPolynomial::number(1, 0).unwrap()
        } else {
            NormalOrderedPolynomial::identity(1)
        };
        let gl = l.g_matrix(&cfg).unwrap().entries;
        let right = l.times_annihilation(0).unwrap().g_matrix(&cfg).unwrap().entries;
        prop_assert!(max_abs_diff(&right, &(&gl * diag(&cfg))) < TOL);
        let left = l.creation_times(0).unwrap().g_matrix(&cfg).unwrap().entries;
        prop_assert!(max_abs_diff(&left, &(diag(&cfg).conjugate() * &gl)) < TOL);
    }

    #[test]
    fn rank_one_factorization(
        amps1 in configuration(2, 0.3),
        coeffs1 in coefficients(2),
        amps2 in configuration(3, 0.3),
        coeffs2 in coefficients(3),
        cfg in configuration(3, 0.2),
    ) {
        let psi1 = StateModel::superposition(coeffs1, amps1).unwrap();
        let psi2 = StateModel::superposition(coeffs2, amps2).unwrap();
        let outer = outer_g_matrix(&psi2, &psi1, &cfg).unwrap().entries;
        let g1 = g_vector(&psi1, &cfg).unwrap();
        let g2 = g_vector(&psi2, &cfg).unwrap();
        prop_assert!(max_abs_diff(&outer, &(&g2 * g1.adjoint())) < TOL);
        let proj = g_matrix(&Observable::Projector(psi2.clone()), &cfg).unwrap().entries;
        prop_assert!(max_abs_diff(&proj, &(&g2 * g2.adjoint())) < TOL);
    }

    #[test]
    fn annihilation_weighted_matches_number_basis(p in hermitian_polynomial(2), cfg in configuration(3, 0.2)) {
        let obs = Observable::Polynomial(p.clone());
        let ak = annihilation_weighted_g_matrix(&obs, &cfg).unwrap().entries;
        let r = cfg.rank();
        let oracle = CMatrix::from_fn(r, r, |i, j| {
            let a = coherent_fock_vector(cfg.amplitude(i)[0], 64);
            let mut b = coherent_fock_vector(cfg.amplitude(j)[0], 60);
            b.resize(65, c(0.0, 0.0));
            let kb = ncdegree::states::oracle::apply_polynomial(&p, &b).unwrap();
            let akb = ncdegree::states::oracle::apply_annihilation(&kb);
            inner(&a[..akb.len().min(a.len())], &akb[..akb.len().min(a.len())])
        });
        prop_assert!(max_abs_diff(&ak, &oracle) < 1e-9);
    }

    #[test]
    fn gram_matrix_is_positive_definite(cfg in configuration(4, 0.3)) {
        let g = gram_matrix(&cfg).entries;
        prop_assert!(max_abs_diff(&g, &g.adjoint()) < 1e-15);
        let eig = nalgebra::SymmetricEigen::new(g).eigenvalues;
        prop_assert!(eig.iter().all(|&x| x > 0.0));
    }
}
