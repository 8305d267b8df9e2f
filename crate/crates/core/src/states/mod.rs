//! Pure-state models with closed-form overlaps against coherent states.

use std::f64::consts::PI;

use crate::algebra::{gram_matrix, overlap_unchecked, AmplitudeConfiguration};
use crate::{check_finite, CMatrix, CVector, Error, Result, C64};

pub mod oracle;

const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// A normalized pure state that can be overlapped with coherent states.
///
/// All constructors normalize their input, so every value satisfies
/// `⟨ψ|ψ⟩ = 1` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub enum StateModel {
    CoherentSuperposition(Superposition),
    SqueezedVacuum(SqueezedVacuum),
    Fock(FockVector),
}

/// `Σ_k κ_k |β_k⟩` over pairwise distinct (possibly multimode) amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    coefficients: Vec<C64>,
    amplitudes: AmplitudeConfiguration,
}

impl Superposition {
    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn amplitudes(&self) -> &AmplitudeConfiguration {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Single-mode squeezed vacuum `|ξ, 0⟩` with `μ = cosh|ξ|`, `ν = e^{i arg ξ} sinh|ξ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedVacuum {
    xi: C64,
    mu: f64,
    nu: C64,
}

impl SqueezedVacuum {
    pub fn xi(&self) -> C64 {
        self.xi
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }
}

/// Single-mode state given by its number-basis amplitudes `ψ_0 … ψ_cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coefficients: Vec<C64>,
}

impl FockVector {
    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn cutoff(&self) -> usize {
        self.coefficients.len() - 1
    }
}

/// `R` equal-weight coherent states on a circle of radius `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompassSpec {
    pub components: usize,
    pub beta: f64,
}

impl StateModel {
    /// Normalizes `Σ κ_k |β_k⟩` using the Gram matrix of its components.
    pub fn superposition(coefficients: Vec<C64>, amplitudes: AmplitudeConfiguration) -> Result<Self> {
        if coefficients.len() != amplitudes.rank() {
            return Err(Error::DimensionMismatch {
                expected: amplitudes.rank(),
                found: coefficients.len(),
            });
        }
        for &k in &coefficients {
            check_finite(k, "superposition coefficient")?;
        }
        let kappa = CVector::from_vec(coefficients);
        let norm_sqr = (kappa.adjoint() * &gram_matrix(&amplitudes).entries * &kappa)[(0, 0)].re;
        if !(norm_sqr > 0.0) || !norm_sqr.is_finite() {
            return Err(Error::InvalidState("superposition has zero norm".into()));
        }
        let scale = norm_sqr.sqrt().recip();
        Ok(StateModel::CoherentSuperposition(Superposition {
            coefficients: kappa.iter().map(|k| k * scale).collect(),
            amplitudes,
        }))
    }

    pub fn coherent(alpha: &[C64]) -> Result<Self> {
        let cfg = AmplitudeConfiguration::from_flat(alpha.len(), alpha.to_vec())?;
        Self::superposition(vec![C64::new(1.0, 0.0)], cfg)
    }

    pub fn squeezed_vacuum(xi: C64) -> Result<Self> {
        check_finite(xi, "squeezing parameter")?;
        let r = xi.norm();
        // sinh/cosh overflow well before this, and the state is numerically singular anyway
        if r > 50.0 {
            return Err(Error::InvalidState(format!("squeezing |ξ| = {r} is too large")));
        }
        let phase = if r > 0.0 { xi / r } else { C64::new(1.0, 0.0) };
        Ok(StateModel::SqueezedVacuum(SqueezedVacuum {
            xi,
            mu: r.cosh(),
            nu: phase * r.sinh(),
        }))
    }

    /// Normalizes the given number-basis amplitudes.
    pub fn fock(coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidState("empty Fock vector".into()));
        }
        if coefficients.len() > oracle::MAX_CUTOFF + 1 {
            return Err(Error::CutoffTooLarge {
                cutoff: coefficients.len() - 1,
                cap: oracle::MAX_CUTOFF,
            });
        }
        for &c in &coefficients {
            check_finite(c, "Fock coefficient")?;
        }
        let norm = coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("Fock vector has zero norm".into()));
        }
        Ok(StateModel::Fock(FockVector {
            coefficients: coefficients.into_iter().map(|c| c / norm).collect(),
        }))
    }

    pub fn modes(&self) -> usize {
        match self {
            StateModel::CoherentSuperposition(s) => s.amplitudes.modes(),
            StateModel::SqueezedVacuum(_) | StateModel::Fock(_) => 1,
        }
    }

    /// `⟨ψ|ψ⟩` evaluated from the model itself.
    pub fn self_overlap(&self) -> f64 {
        match self {
            StateModel::CoherentSuperposition(s) => {
                let kappa = CVector::from_column_slice(&s.coefficients);
                (kappa.adjoint() * &gram_matrix(&s.amplitudes).entries * &kappa)[(0, 0)].re
            }
            StateModel::SqueezedVacuum(sq) => {
                // (1/μ) Σ_k (|ν|/2μ)^{2k} (2k)!/(k!)² = (1/μ)(1 − |ν|²/μ²)^{-1/2}
                let t = sq.nu.norm() / sq.mu;
                (1.0 / sq.mu) / (1.0 - t * t).sqrt()
            }
            StateModel::Fock(f) => f.coefficients.iter().map(|c| c.norm_sqr()).sum(),
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.self_overlap() - 1.0).abs() <= NORMALIZATION_TOLERANCE
    }

    /// Mean photon number summed over modes.
    pub fn mean_photon_number(&self) -> f64 {
        match self {
            StateModel::CoherentSuperposition(s) => {
                let cfg = &s.amplitudes;
                let mut total = C64::new(0.0, 0.0);
                for (j, bj) in cfg.iter().enumerate() {
                    for (k, bk) in cfg.iter().enumerate() {
                        let dot: C64 = bj.iter().zip(bk).map(|(a, b)| a.conj() * b).sum();
                        total += s.coefficients[j].conj() * s.coefficients[k] * dot * overlap_unchecked(bj, bk);
                    }
                }
                total.re
            }
            StateModel::SqueezedVacuum(sq) => sq.nu.norm_sqr(),
            StateModel::Fock(f) => f
                .coefficients
                .iter()
                .enumerate()
                .map(|(n, c)| n as f64 * c.norm_sqr())
                .sum(),
        }
    }

    pub(crate) fn overlap_unchecked(&self, alpha: &[C64]) -> C64 {
        match self {
            StateModel::CoherentSuperposition(s) => s
                .amplitudes
                .iter()
                .zip(&s.coefficients)
                .map(|(b, k)| k * overlap_unchecked(alpha, b))
                .sum(),
            StateModel::SqueezedVacuum(sq) => {
                let a = alpha[0];
                (-0.5 * a.norm_sqr() - sq.nu * a.conj() * a.conj() / (2.0 * sq.mu)).exp() / sq.mu.sqrt()
            }
            StateModel::Fock(f) => fock_overlap(&f.coefficients, alpha[0], 0),
        }
    }

    pub(crate) fn annihilated_overlap_unchecked(&self, alpha: C64) -> C64 {
        match self {
            StateModel::CoherentSuperposition(s) => s
                .amplitudes
                .iter()
                .zip(&s.coefficients)
                .map(|(b, k)| k * b[0] * overlap_unchecked(&[alpha], b))
                .sum(),
            StateModel::SqueezedVacuum(sq) => {
                -(sq.nu / sq.mu) * alpha.conj() * self.overlap_unchecked(&[alpha])
            }
            StateModel::Fock(f) => fock_overlap(&f.coefficients, alpha, 1),
        }
    }

    /// Maps every component amplitude `β → Uβ`. Only coherent superpositions
    /// carry a mode structure.
    pub fn mode_transformed(&self, unitary: &CMatrix) -> Result<Self> {
        match self {
            StateModel::CoherentSuperposition(s) => {
                let cfg = crate::bounds::mode_transform(&s.amplitudes, unitary)?;
                Ok(StateModel::CoherentSuperposition(Superposition {
                    coefficients: s.coefficients.clone(),
                    amplitudes: cfg,
                }))
            }
            _ => Err(Error::InvalidState(
                "mode transformations apply to coherent superpositions only".into(),
            )),
        }
    }
}

/// `e^{−|α|²/2} Σ_n ψ_{n+shift} √((n+shift)!/n!) (α*)ⁿ/√n!`; `shift = 1` gives `⟨α|â|ψ⟩`.
fn fock_overlap(coefficients: &[C64], alpha: C64, shift: usize) -> C64 {
    let mut term = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for n in 0..coefficients.len().saturating_sub(shift) {
        if n > 0 {
            term *= alpha.conj() / (n as f64).sqrt();
        }
        let weight = if shift == 1 { ((n + 1) as f64).sqrt() } else { 1.0 };
        sum += coefficients[n + shift] * weight * term;
    }
    sum
}

/// `⟨α|ψ⟩`.
pub fn overlap_with_coherent(state: &StateModel, alpha: &[C64]) -> Result<C64> {
    if alpha.len() != state.modes() {
        return Err(Error::DimensionMismatch {
            expected: state.modes(),
            found: alpha.len(),
        });
    }
    for &a in alpha {
        check_finite(a, "coherent amplitude")?;
    }
    Ok(state.overlap_unchecked(alpha))
}

/// `⟨α|â|ψ⟩` for single-mode states.
pub fn annihilated_overlap(state: &StateModel, alpha: &[C64]) -> Result<C64> {
    if state.modes() != 1 {
        return Err(Error::MultimodeUnsupported(state.modes()));
    }
    if alpha.len() != 1 {
        return Err(Error::MultimodeUnsupported(alpha.len()));
    }
    check_finite(alpha[0], "coherent amplitude")?;
    Ok(state.annihilated_overlap_unchecked(alpha[0]))
}

/// Compass state `Σ_k κ |β e^{2πik/R}⟩` with
/// `κ = (Σ_{k₁,k₂} exp[−β² + β² e^{2πi(k₂−k₁)/R}])^{−1/2}`.
pub fn make_compass(spec: CompassSpec) -> Result<StateModel> {
    let CompassSpec { components, beta } = spec;
    if components < 2 {
        return Err(Error::InvalidState(format!(
            "compass state needs at least 2 components, got {components}"
        )));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidState(format!("invalid compass radius {beta}")));
    }
    let amps: Vec<C64> = (1..=components)
        .map(|k| C64::from_polar(beta, 2.0 * PI * k as f64 / components as f64))
        .collect();
    // β = 0 (or tiny β) makes the amplitudes coincide; rejected here
    let cfg = AmplitudeConfiguration::single_mode(&amps)?;
    let b2 = beta * beta;
    let mut sum = C64::new(0.0, 0.0);
    for k1 in 1..=components {
        for k2 in 1..=components {
            let phase = C64::from_polar(1.0, 2.0 * PI * (k2 as f64 - k1 as f64) / components as f64);
            sum += (-b2 + b2 * phase).exp();
        }
    }
    let kappa = C64::new(sum.re.sqrt().recip(), 0.0);
    StateModel::superposition(vec![kappa; components], cfg)
}

/// Even coherent state `∝ |β⟩ + |−β⟩`.
pub fn even_cat(beta: f64) -> Result<StateModel> {
    make_compass(CompassSpec { components: 2, beta })
}
