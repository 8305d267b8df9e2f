//! The inner problem: `G_K λ = b G_1 λ` at fixed amplitudes.
//!
//! The primary route whitens with the Cholesky factor of `G_1` and runs a
//! Hermitian eigensolve. The `r = 2` trace/determinant formula and the
//! characteristic polynomial `det(G_K − b G_1)` are kept as independent
//! cross-checks.

use nalgebra::{Cholesky, Dyn, SymmetricEigen};

use crate::algebra::{commutator_g_matrix, gram_matrix, AmplitudeConfiguration, Observable};
use crate::{CMatrix, CVector, Direction, Error, Result, C64};

/// Largest accepted condition number of `G_1`.
pub const CONDITION_LIMIT: f64 = 1e12;

const HERMITIAN_TOLERANCE: f64 = 1e-10;
const DISCRIMINANT_FLOOR: f64 = -1e-10;

/// Extremal generalized eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub value: f64,
    /// Normalized so that `λ† G_1 λ = 1`, with the largest component real and positive.
    pub coefficients: CVector,
    /// `‖G_K λ − b G_1 λ‖ / ‖λ‖`.
    pub residual: f64,
    /// 2-norm condition number of `G_1`.
    pub condition_estimate: f64,
}

fn check_square(m: &CMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if m.nrows() != n { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let defect = crate::max_modulus(&(m - m.adjoint()));
    let scale = crate::max_modulus(m).max(1.0);
    if defect > HERMITIAN_TOLERANCE * scale || !defect.is_finite() {
        return Err(Error::NonHermitian(defect));
    }
    Ok(())
}

/// Cholesky factor of `G_1` after the conditioning guard.
fn whitening(g1: &CMatrix) -> Result<(Cholesky<C64, Dyn>, f64)> {
    check_hermitian(g1)?;
    let spectrum = SymmetricEigen::new(hermitian_part(g1)).eigenvalues;
    let (lo, hi) = spectrum
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition });
    }
    let chol = Cholesky::new(hermitian_part(g1)).ok_or(Error::IllConditioned { condition })?;
    Ok((chol, condition))
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn normalize_phase(v: &mut CVector) {
    if let Some(pivot) = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            v.iter_mut().for_each(|x| *x *= phase);
        }
    }
}

fn residual(gk: &CMatrix, g1: &CMatrix, value: f64, lambda: &CVector) -> f64 {
    let r = gk * lambda - g1 * lambda * C64::new(value, 0.0);
    r.norm() / lambda.norm()
}

/// Smallest (`Inf`) or largest (`Sup`) generalized eigenvalue of `(G_K, G_1)`.
pub fn extremal_generalized_eigen(gk: &CMatrix, g1: &CMatrix, direction: Direction) -> Result<EigenSolution> {
    let n = g1.nrows();
    check_square(g1, n)?;
    check_square(gk, n)?;
    check_hermitian(gk)?;
    let (chol, condition) = whitening(g1)?;
    let l = chol.l();
    let half = l
        .solve_lower_triangular(gk)
        .ok_or(Error::IllConditioned { condition })?;
    let whitened = l
        .solve_lower_triangular(&half.adjoint())
        .ok_or(Error::IllConditioned { condition })?;
    let eig = SymmetricEigen::new(hermitian_part(&whitened));
    let pick = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| {
            if direction.improves(v, eig.eigenvalues[best]) {
                i
            } else {
                best
            }
        });
    let value = eig.eigenvalues[pick];
    let y = eig.eigenvectors.column(pick).into_owned();
    let mut lambda = l
        .adjoint()
        .solve_upper_triangular(&y)
        .ok_or(Error::IllConditioned { condition })?;
    normalize_phase(&mut lambda);
    let residual = residual(gk, g1, value, &lambda);
    Ok(EigenSolution {
        value,
        coefficients: lambda,
        residual,
        condition_estimate: condition,
    })
}

/// Like [`extremal_generalized_eigen`], but restricted to the span of the
/// eigenvectors of `G_1` whose eigenvalues exceed `rel_cutoff · max`.
///
/// Nearly coincident amplitudes make `G_1` close to singular, and the full
/// pencil then carries rounding errors of order `ε·cond(G_1)` that an optimizer
/// will happily exploit. Every vector of the retained span is still a
/// superposition of the same coherent states, so the value returned is an
/// attainable Rayleigh quotient. The conditioning guard still applies.
pub fn extremal_on_span(
    gk: &CMatrix,
    g1: &CMatrix,
    direction: Direction,
    rel_cutoff: f64,
) -> Result<EigenSolution> {
    let n = g1.nrows();
    check_square(g1, n)?;
    check_square(gk, n)?;
    check_hermitian(gk)?;
    check_hermitian(g1)?;
    let eig1 = SymmetricEigen::new(hermitian_part(g1));
    let (lo, hi) = eig1
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition });
    }
    let kept: Vec<usize> = (0..n).filter(|&i| eig1.eigenvalues[i] > rel_cutoff * hi).collect();
    let w = CMatrix::from_fn(n, kept.len(), |row, col| {
        let i = kept[col];
        eig1.eigenvectors[(row, i)] / eig1.eigenvalues[i].sqrt()
    });
    let reduced = w.adjoint() * gk * &w;
    let eig = SymmetricEigen::new(hermitian_part(&reduced));
    let pick = (0..kept.len()).fold(0, |best, i| {
        if direction.improves(eig.eigenvalues[i], eig.eigenvalues[best]) {
            i
        } else {
            best
        }
    });
    let value = eig.eigenvalues[pick];
    let mut lambda = &w * eig.eigenvectors.column(pick);
    normalize_phase(&mut lambda);
    let residual = residual(gk, g1, value, &lambda);
    Ok(EigenSolution {
        value,
        coefficients: lambda,
        residual,
        condition_estimate: condition,
    })
}

/// Maximum of the Rayleigh quotient of `g g†`: `λ = G_1⁻¹ g`, `b = g† G_1⁻¹ g`.
pub fn rank_one_maximum(g: &CVector, g1: &CMatrix) -> Result<EigenSolution> {
    let n = g1.nrows();
    check_square(g1, n)?;
    if g.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.len(),
        });
    }
    let (chol, condition) = whitening(g1)?;
    let mut lambda = chol.solve(g);
    let value = g.dotc(&lambda).re;
    if lambda.norm() == 0.0 {
        // g = 0: every λ attains b = 0
        lambda = CVector::from_element(n, C64::new(0.0, 0.0));
        lambda[0] = C64::new(1.0, 0.0);
    }
    let scale = lambda.dotc(&(g1 * &lambda)).re.sqrt();
    lambda /= C64::new(scale, 0.0);
    normalize_phase(&mut lambda);
    let gk = g * g.adjoint();
    let residual = residual(&gk, g1, value, &lambda);
    Ok(EigenSolution {
        value,
        coefficients: lambda,
        residual,
        condition_estimate: condition,
    })
}

/// Both roots `b₂^± = ½[Tr(G_1⁻¹G_K) ± Δ]` of the `r = 2` problem, returned as
/// `(b₂⁻, b₂⁺)`.
pub fn closed_form_r2(gk: &CMatrix, g1: &CMatrix) -> Result<(f64, f64)> {
    check_square(g1, 2)?;
    check_square(gk, 2)?;
    check_hermitian(gk)?;
    whitening(g1)?;
    let det1 = g1[(0, 0)] * g1[(1, 1)] - g1[(0, 1)] * g1[(1, 0)];
    let inv = CMatrix::from_row_slice(2, 2, &[g1[(1, 1)], -g1[(0, 1)], -g1[(1, 0)], g1[(0, 0)]])
        / det1;
    let m = inv * gk;
    let trace = (m[(0, 0)] + m[(1, 1)]).re;
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let disc = trace * trace - 4.0 * det;
    if disc < DISCRIMINANT_FLOOR * trace.abs().powi(2).max(1.0) {
        return Err(Error::NegativeDiscriminant(disc));
    }
    let delta = disc.max(0.0).sqrt();
    Ok((0.5 * (trace - delta), 0.5 * (trace + delta)))
}

/// `χ(b) = det(G_K − b G_1)`, real part.
pub fn char_poly_eval(gk: &CMatrix, g1: &CMatrix, b: f64) -> Result<f64> {
    let n = g1.nrows();
    check_square(g1, n)?;
    check_square(gk, n)?;
    Ok((gk - g1 * C64::new(b, 0.0)).determinant().re)
}

/// `|λ† G_{[â,K]} λ| / (λ† G_1 λ)`; vanishes at stationary amplitude configurations.
pub fn stationarity_residual(obs: &Observable, cfg: &AmplitudeConfiguration, sol: &EigenSolution) -> Result<f64> {
    let comm = commutator_g_matrix(obs, cfg)?;
    let lambda = &sol.coefficients;
    if lambda.len() != cfg.rank() {
        return Err(Error::DimensionMismatch {
            expected: cfg.rank(),
            found: lambda.len(),
        });
    }
    let g1 = gram_matrix(cfg);
    let num = lambda.dotc(&(&comm.entries * lambda)).norm();
    let den = lambda.dotc(&(&g1.entries * lambda)).re;
    Ok(num / den)
}
