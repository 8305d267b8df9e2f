#![allow(dead_code)]

use ncdegree::algebra::{AmplitudeConfiguration, NormalOrderedPolynomial};
use ncdegree::C64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn complex(radius: f64) -> impl Strategy<Value = C64> {
    (-radius..radius, -radius..radius).prop_map(|(re, im)| C64::new(re, im))
}

/// Single-mode amplitudes inside the disk of radius 2, pairwise at least
/// `min_gap` apart so the Gram matrix stays well conditioned.
pub fn configuration(r: usize, min_gap: f64) -> impl Strategy<Value = AmplitudeConfiguration> {
    prop::collection::vec(complex(1.4), r)
        .prop_filter("amplitudes too close", move |amps| {
            amps.iter().enumerate().all(|(i, a)| amps[..i].iter().all(|b| (a - b).norm() >= min_gap))
        })
        .prop_map(|amps| AmplitudeConfiguration::single_mode(&amps).unwrap())
}

/// Random single-mode polynomial with exponents up to `degree`.
pub fn polynomial(degree: u32) -> impl Strategy<Value = NormalOrderedPolynomial> {
    prop::collection::vec(((0..=degree), (0..=degree), complex(1.0)), 1..5).prop_map(|terms| {
        let mut p = NormalOrderedPolynomial::zero(1);
        for (m, n, coeff) in terms {
            p.add_term(vec![m], vec![n], coeff).unwrap();
        }
        p
    })
}

pub fn hermitian_polynomial(degree: u32) -> impl Strategy<Value = NormalOrderedPolynomial> {
    polynomial(degree).prop_map(|p| p.plus(&p.adjoint()).unwrap().scaled(C64::new(0.5, 0.0)))
}

pub fn coefficients(r: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(1.0), r).prop_filter("zero vector", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
}

pub fn max_abs_diff(a: &ncdegree::CMatrix, b: &ncdegree::CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
