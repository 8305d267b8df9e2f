//! Brute-force evaluation in a truncated number basis.
//!
//! Everything here works with explicit Fock amplitudes and ladder-operator
//! actions on vectors, and never touches the Gaussian overlap kernel. It is the
//! independent reference the Gram-matrix calculus is checked against.

use crate::algebra::{AmplitudeConfiguration, NormalOrderedPolynomial, Observable};
use crate::states::StateModel;
use crate::{Error, Result, C64};

pub const DEFAULT_CUTOFF: usize = 60;
pub const MAX_CUTOFF: usize = 200;

/// Largest tolerated probability mass beyond the cutoff.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// State to evaluate: a model, or an unnormalized `Σ λ_k |α_k⟩`.
#[derive(Debug, Clone, Copy)]
pub enum OracleTarget<'a> {
    State(&'a StateModel),
    Superposition {
        amplitudes: &'a AmplitudeConfiguration,
        coefficients: &'a [C64],
    },
}

/// `ln n!` for `n = 0..len`.
fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    out.push(0.0);
    for n in 1..len {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson mass `Σ_{n > cutoff} e^{−|α|²} |α|^{2n}/n!`.
fn coherent_tail(alpha: C64, cutoff: usize) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let lnf = ln_factorials(cutoff + 400);
    (cutoff + 1..cutoff + 400)
        .map(|n| (-x + n as f64 * x.ln() - lnf[n]).exp())
        .sum()
}

/// Number-basis amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n = 0..=cutoff`.
pub fn coherent_fock_vector(alpha: C64, cutoff: usize) -> Vec<C64> {
    let lnf = ln_factorials(cutoff + 1);
    let (modulus, phase) = alpha.to_polar();
    (0..=cutoff)
        .map(|n| {
            if n == 0 {
                return C64::new((-0.5 * modulus * modulus).exp(), 0.0);
            }
            if modulus == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let ln_mag = -0.5 * modulus * modulus + n as f64 * modulus.ln() - 0.5 * lnf[n];
            C64::from_polar(ln_mag.exp(), n as f64 * phase)
        })
        .collect()
}

/// Truncated number-basis amplitudes of a single-mode state, together with the
/// probability mass lost to truncation.
pub fn fock_vector(state: &StateModel, cutoff: usize) -> Result<(Vec<C64>, f64)> {
    check_cutoff(cutoff)?;
    if state.modes() != 1 {
        return Err(Error::MultimodeUnsupported(state.modes()));
    }
    match state {
        StateModel::CoherentSuperposition(s) => {
            let mut v = vec![C64::new(0.0, 0.0); cutoff + 1];
            let mut tail: f64 = 0.0;
            for (beta, kappa) in s.amplitudes().iter().zip(s.coefficients()) {
                for (slot, x) in v.iter_mut().zip(coherent_fock_vector(beta[0], cutoff)) {
                    *slot += kappa * x;
                }
                tail = tail.max(coherent_tail(beta[0], cutoff));
            }
            Ok((v, tail))
        }
        StateModel::SqueezedVacuum(sq) => {
            // ψ_{2k} = μ^{-1/2} (−ν/2μ)^k √((2k)!)/k!
            let lnf = ln_factorials(cutoff + 1);
            let ratio = -sq.nu() / (2.0 * sq.mu());
            let (rm, rp) = ratio.to_polar();
            let mut v = vec![C64::new(0.0, 0.0); cutoff + 1];
            for k in 0..=cutoff / 2 {
                let n = 2 * k;
                let amp = if k == 0 {
                    1.0 / sq.mu().sqrt()
                } else if rm == 0.0 {
                    0.0
                } else {
                    (k as f64 * rm.ln() + 0.5 * lnf[n] - lnf[k] - 0.5 * sq.mu().ln()).exp()
                };
                v[n] = C64::from_polar(amp, k as f64 * rp);
            }
            let kept: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            Ok((v, (1.0 - kept).max(0.0)))
        }
        StateModel::Fock(f) => {
            let coeffs = f.coefficients();
            let mut v = vec![C64::new(0.0, 0.0); cutoff + 1];
            let kept = coeffs.len().min(cutoff + 1);
            v[..kept].copy_from_slice(&coeffs[..kept]);
            let tail = coeffs[kept..].iter().map(|c| c.norm_sqr()).sum();
            Ok((v, tail))
        }
    }
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff > MAX_CUTOFF {
        return Err(Error::CutoffTooLarge {
            cutoff,
            cap: MAX_CUTOFF,
        });
    }
    Ok(())
}

/// `â v`, keeping the length.
pub fn apply_annihilation(v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for n in 1..v.len() {
        out[n - 1] = v[n] * (n as f64).sqrt();
    }
    out
}

/// `â† v`; the top component is dropped.
pub fn apply_creation(v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for n in 0..v.len() - 1 {
        out[n + 1] = v[n] * ((n + 1) as f64).sqrt();
    }
    out
}

/// `K v` for a single-mode normally ordered polynomial. The caller pads `v` so
/// that no weight is pushed past the end.
pub fn apply_polynomial(poly: &NormalOrderedPolynomial, v: &[C64]) -> Result<Vec<C64>> {
    if poly.modes() != 1 {
        return Err(Error::MultimodeUnsupported(poly.modes()));
    }
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for (mono, coeff) in poly.terms() {
        let mut w = v.to_vec();
        for _ in 0..mono.annihilation[0] {
            w = apply_annihilation(&w);
        }
        for _ in 0..mono.creation[0] {
            w = apply_creation(&w);
        }
        for (o, x) in out.iter_mut().zip(w) {
            *o += coeff * x;
        }
    }
    Ok(out)
}

fn max_creation_degree(obs: &Observable) -> usize {
    match obs {
        Observable::Polynomial(p) => p
            .terms()
            .map(|(m, _)| m.creation[0] as usize)
            .max()
            .unwrap_or(0),
        Observable::Projector(_) => 0,
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Target vector in the number basis, padded by `pad` zero components.
fn target_vector(target: OracleTarget<'_>, cutoff: usize, pad: usize) -> Result<(Vec<C64>, f64)> {
    let (mut v, tail) = match target {
        OracleTarget::State(state) => fock_vector(state, cutoff)?,
        OracleTarget::Superposition {
            amplitudes,
            coefficients,
        } => {
            if amplitudes.modes() != 1 {
                return Err(Error::MultimodeUnsupported(amplitudes.modes()));
            }
            if coefficients.len() != amplitudes.rank() {
                return Err(Error::DimensionMismatch {
                    expected: amplitudes.rank(),
                    found: coefficients.len(),
                });
            }
            let mut v = vec![C64::new(0.0, 0.0); cutoff + 1];
            let mut tail: f64 = 0.0;
            for (a, l) in amplitudes.iter().zip(coefficients) {
                for (slot, x) in v.iter_mut().zip(coherent_fock_vector(a[0], cutoff)) {
                    *slot += l * x;
                }
                tail = tail.max(coherent_tail(a[0], cutoff));
            }
            (v, tail)
        }
    };
    v.resize(cutoff + 1 + pad, C64::new(0.0, 0.0));
    Ok((v, tail))
}

/// Rayleigh quotient `⟨ψ|K|ψ⟩/⟨ψ|ψ⟩` evaluated in the number basis truncated at
/// `cutoff`.
pub fn fock_oracle_expectation(obs: &Observable, target: OracleTarget<'_>, cutoff: usize) -> Result<f64> {
    check_cutoff(cutoff)?;
    if obs.modes() != 1 {
        return Err(Error::MultimodeUnsupported(obs.modes()));
    }
    let pad = max_creation_degree(obs);
    let (psi, tail) = target_vector(target, cutoff, pad)?;
    if tail > TAIL_TOLERANCE {
        return Err(Error::CutoffTooSmall { cutoff, tail });
    }
    let norm = inner(&psi, &psi).re;
    let value = match obs {
        Observable::Polynomial(p) => inner(&psi, &apply_polynomial(p, &psi)?).re,
        Observable::Projector(state) => {
            let (phi, phi_tail) = fock_vector(state, cutoff + pad)?;
            if phi_tail > TAIL_TOLERANCE {
                return Err(Error::CutoffTooSmall { cutoff, tail: phi_tail });
            }
            inner(&phi, &psi).norm_sqr()
        }
    };
    Ok(value / norm)
}

/// `⟨α|K|β⟩` in the truncated number basis.
pub fn fock_matrix_element(
    poly: &NormalOrderedPolynomial,
    alpha: C64,
    beta: C64,
    cutoff: usize,
) -> Result<C64> {
    check_cutoff(cutoff)?;
    let pad = poly
        .terms()
        .map(|(m, _)| m.creation[0] as usize)
        .max()
        .unwrap_or(0);
    let mut a = coherent_fock_vector(alpha, cutoff + pad);
    let mut b = coherent_fock_vector(beta, cutoff);
    b.resize(cutoff + pad + 1, C64::new(0.0, 0.0));
    let kb = apply_polynomial(poly, &b)?;
    a.truncate(kb.len());
    Ok(inner(&a, &kb))
}
