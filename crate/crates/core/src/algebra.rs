//! Coherent-state overlaps and the G-map.
//!
//! The G-map sends an operator `L` to the `r × r` matrix
//! `(⟨α_k|L|α_l⟩)_{k,l}` for a fixed [`AmplitudeConfiguration`]. For a normally
//! ordered polynomial with symbol `k(α*, β)` the entries factor as
//! `k(α_k*, α_l) ⟨α_k|α_l⟩`, so every computation reduces to the Gaussian
//! overlap kernel and polynomial evaluation. Single-mode operators are the
//! `N = 1` case of the multimode calculus.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::states::StateModel;
use crate::{check_finite, CMatrix, CVector, Error, Result, C64};

/// Amplitudes closer than this (max-norm over modes) are treated as coincident.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-6;

/// Largest exponent of a single ladder operator in a monomial.
pub const DEFAULT_DEGREE_CAP: u32 = 16;

const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// An ordered list of `r` pairwise distinct coherent amplitudes in `ℂ^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfiguration", into = "RawConfiguration")]
pub struct AmplitudeConfiguration {
    modes: usize,
    // amplitude j occupies flat[j * modes..(j + 1) * modes]
    flat: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct RawConfiguration {
    modes: usize,
    amplitudes: Vec<Vec<C64>>,
}

impl TryFrom<RawConfiguration> for AmplitudeConfiguration {
    type Error = Error;

    fn try_from(raw: RawConfiguration) -> Result<Self> {
        AmplitudeConfiguration::new(raw.modes, raw.amplitudes)
    }
}

impl From<AmplitudeConfiguration> for RawConfiguration {
    fn from(cfg: AmplitudeConfiguration) -> Self {
        RawConfiguration {
            modes: cfg.modes,
            amplitudes: cfg.iter().map(<[C64]>::to_vec).collect(),
        }
    }
}

impl AmplitudeConfiguration {
    pub fn new(modes: usize, amps: Vec<Vec<C64>>) -> Result<Self> {
        let mut flat = Vec::with_capacity(amps.len() * modes);
        for a in &amps {
            if a.len() != modes {
                return Err(Error::DimensionMismatch {
                    expected: modes,
                    found: a.len(),
                });
            }
            flat.extend_from_slice(a);
        }
        Self::from_flat(modes, flat)
    }

    /// Builds a configuration from amplitudes laid out contiguously.
    pub fn from_flat(modes: usize, flat: Vec<C64>) -> Result<Self> {
        if modes == 0 || flat.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        if !flat.len().is_multiple_of(modes) {
            return Err(Error::DimensionMismatch {
                expected: modes * (flat.len() / modes + 1),
                found: flat.len(),
            });
        }
        for &z in &flat {
            check_finite(z, "amplitude configuration")?;
        }
        let cfg = AmplitudeConfiguration { modes, flat };
        let r = cfg.rank();
        for i in 0..r {
            for j in i + 1..r {
                let distance = max_norm_distance(cfg.amplitude(i), cfg.amplitude(j));
                if distance <= COINCIDENCE_TOLERANCE {
                    return Err(Error::CoincidentAmplitudes {
                        first: i,
                        second: j,
                        distance,
                    });
                }
            }
        }
        Ok(cfg)
    }

    pub fn single_mode(amps: &[C64]) -> Result<Self> {
        Self::from_flat(1, amps.to_vec())
    }

    /// Number of superposed coherent states `r`.
    pub fn rank(&self) -> usize {
        self.flat.len() / self.modes
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn amplitude(&self, j: usize) -> &[C64] {
        &self.flat[j * self.modes..(j + 1) * self.modes]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[C64]> + '_ {
        self.flat.chunks(self.modes)
    }

    pub fn as_flat(&self) -> &[C64] {
        &self.flat
    }

    /// Euclidean norm of all amplitudes taken together.
    pub fn norm(&self) -> f64 {
        self.flat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest Euclidean norm of a single amplitude vector.
    pub fn max_amplitude_norm(&self) -> f64 {
        self.iter()
            .map(|a| a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

fn max_norm_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `⟨α|β⟩ = exp(−|α|²/2 − |β|²/2 + α*·β)`, a product over modes.
pub fn coherent_overlap(alpha: &[C64], beta: &[C64]) -> Result<C64> {
    if alpha.len() != beta.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            found: beta.len(),
        });
    }
    for &z in alpha.iter().chain(beta) {
        check_finite(z, "coherent amplitude")?;
    }
    Ok(overlap_unchecked(alpha, beta))
}

pub(crate) fn overlap_unchecked(alpha: &[C64], beta: &[C64]) -> C64 {
    let exponent: C64 = alpha
        .iter()
        .zip(beta)
        .map(|(a, b)| -0.5 * (a.norm_sqr() + b.norm_sqr()) + a.conj() * b)
        .sum();
    exponent.exp()
}

/// Gram matrix `G_1` of the configuration: unit diagonal, Hermitian.
pub fn gram_matrix(cfg: &AmplitudeConfiguration) -> GMatrix {
    let r = cfg.rank();
    let mut entries = CMatrix::zeros(r, r);
    for i in 0..r {
        entries[(i, i)] = C64::new(1.0, 0.0);
        for j in i + 1..r {
            let z = overlap_unchecked(cfg.amplitude(i), cfg.amplitude(j));
            entries[(i, j)] = z;
            entries[(j, i)] = z.conj();
        }
    }
    GMatrix {
        entries,
        amplitudes: cfg.clone(),
    }
}

/// Exponents of `Π_i (â_i†)^{m_i} Π_i â_i^{n_i}`, already normally ordered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LadderMonomial {
    pub creation: Vec<u32>,
    pub annihilation: Vec<u32>,
}

impl LadderMonomial {
    pub fn new(creation: Vec<u32>, annihilation: Vec<u32>) -> Result<Self> {
        if creation.len() != annihilation.len() {
            return Err(Error::DimensionMismatch {
                expected: creation.len(),
                found: annihilation.len(),
            });
        }
        if creation.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        if let Some(&degree) = creation
            .iter()
            .chain(&annihilation)
            .find(|&&d| d > DEFAULT_DEGREE_CAP)
        {
            return Err(Error::DegreeTooLarge {
                degree,
                cap: DEFAULT_DEGREE_CAP,
            });
        }
        Ok(LadderMonomial {
            creation,
            annihilation,
        })
    }

    pub fn modes(&self) -> usize {
        self.creation.len()
    }

    fn adjoint(&self) -> LadderMonomial {
        LadderMonomial {
            creation: self.annihilation.clone(),
            annihilation: self.creation.clone(),
        }
    }

    fn max_degree(&self) -> u32 {
        self.creation
            .iter()
            .chain(&self.annihilation)
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// A normally ordered polynomial in the ladder operators of `N` modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalOrderedPolynomial {
    modes: usize,
    terms: BTreeMap<LadderMonomial, C64>,
}

impl NormalOrderedPolynomial {
    pub fn zero(modes: usize) -> Self {
        NormalOrderedPolynomial {
            modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(modes: usize) -> Self {
        let mut p = Self::zero(modes);
        p.terms.insert(
            LadderMonomial {
                creation: vec![0; modes],
                annihilation: vec![0; modes],
            },
            C64::new(1.0, 0.0),
        );
        p
    }

    /// `x̂(0)² = (â + â†)² = 2â†â + â² + â†² + 1`.
    pub fn quadrature_squared() -> Self {
        let mut p = Self::zero(1);
        for (m, n, c) in [(1, 1, 2.0), (0, 2, 1.0), (2, 0, 1.0), (0, 0, 1.0)] {
            p.add_term_unchecked(vec![m], vec![n], C64::new(c, 0.0));
        }
        p
    }

    /// `â_mode† â_mode`.
    pub fn number(modes: usize, mode: usize) -> Result<Self> {
        let mut m = vec![0; modes];
        m[mode] = 1;
        let mut p = Self::zero(modes);
        p.add_term(m.clone(), m, C64::new(1.0, 0.0))?;
        Ok(p)
    }

    /// Adds `coeff · Π(â†)^m Π â^n` to the polynomial.
    pub fn add_term(&mut self, creation: Vec<u32>, annihilation: Vec<u32>, coeff: C64) -> Result<()> {
        check_finite(coeff, "polynomial coefficient")?;
        let mono = LadderMonomial::new(creation, annihilation)?;
        if mono.modes() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: mono.modes(),
            });
        }
        self.accumulate(mono, coeff);
        Ok(())
    }

    fn add_term_unchecked(&mut self, creation: Vec<u32>, annihilation: Vec<u32>, coeff: C64) {
        self.accumulate(
            LadderMonomial {
                creation,
                annihilation,
            },
            coeff,
        );
    }

    fn accumulate(&mut self, mono: LadderMonomial, coeff: C64) {
        let slot = self.terms.entry(mono).or_insert(C64::new(0.0, 0.0));
        *slot += coeff;
        if *slot == C64::new(0.0, 0.0) {
            self.terms.retain(|_, c| *c != C64::new(0.0, 0.0));
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LadderMonomial, &C64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, creation: &[u32], annihilation: &[u32]) -> C64 {
        self.terms
            .get(&LadderMonomial {
                creation: creation.to_vec(),
                annihilation: annihilation.to_vec(),
            })
            .copied()
            .unwrap_or_default()
    }

    /// Largest `|c(m,n) − conj(c(n,m))|` over all terms.
    pub fn hermitian_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(mono, c)| {
                let partner = self.terms.get(&mono.adjoint()).copied().unwrap_or_default();
                (c - partner.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        let scale = self.terms.values().map(|c| c.norm()).fold(1.0, f64::max);
        self.hermitian_defect() <= HERMITIAN_TOLERANCE * scale
    }

    pub fn adjoint(&self) -> Self {
        NormalOrderedPolynomial {
            modes: self.modes,
            terms: self
                .terms
                .iter()
                .map(|(mono, c)| (mono.adjoint(), c.conj()))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = Self::zero(self.modes);
        for (mono, c) in &self.terms {
            out.accumulate(mono.clone(), c * factor);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if other.modes != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: other.modes,
            });
        }
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.accumulate(mono.clone(), *c);
        }
        Ok(out)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: mode + 1,
            });
        }
        Ok(())
    }

    fn check_degree(self) -> Result<Self> {
        if let Some(degree) = self.terms.keys().map(LadderMonomial::max_degree).max() {
            if degree > DEFAULT_DEGREE_CAP {
                return Err(Error::DegreeTooLarge {
                    degree,
                    cap: DEFAULT_DEGREE_CAP,
                });
            }
        }
        Ok(self)
    }

    /// `L · â_mode`, still normally ordered.
    pub fn times_annihilation(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = Self::zero(self.modes);
        for (mono, c) in &self.terms {
            let mut mono = mono.clone();
            mono.annihilation[mode] += 1;
            out.accumulate(mono, *c);
        }
        out.check_degree()
    }

    /// `â_mode† · L`, still normally ordered.
    pub fn creation_times(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = Self::zero(self.modes);
        for (mono, c) in &self.terms {
            let mut mono = mono.clone();
            mono.creation[mode] += 1;
            out.accumulate(mono, *c);
        }
        out.check_degree()
    }

    /// Commutator `[â_mode, L]`, whose symbol is `∂k/∂α_mode*`.
    pub fn annihilation_commutator(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = Self::zero(self.modes);
        for (mono, c) in &self.terms {
            let m = mono.creation[mode];
            if m == 0 {
                continue;
            }
            let mut mono = mono.clone();
            mono.creation[mode] = m - 1;
            out.accumulate(mono, c * f64::from(m));
        }
        Ok(out)
    }

    /// `â_mode · L` normally ordered: symbol `β·k + ∂k/∂α*`.
    pub fn annihilation_times(&self, mode: usize) -> Result<Self> {
        self.times_annihilation(mode)?
            .plus(&self.annihilation_commutator(mode)?)
    }

    /// `D(s) L D(s)†`: symbol `k(α* − s*, β − s)`. Extremal values are unchanged
    /// and optimal amplitudes move by `+s`.
    pub fn displaced(&self, shift: &[C64]) -> Result<Self> {
        if shift.len() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: shift.len(),
            });
        }
        for &s in shift {
            check_finite(s, "displacement")?;
        }
        let mut out = Self::zero(self.modes);
        for (mono, &c) in &self.terms {
            let mut partial: Vec<(LadderMonomial, C64)> = vec![(mono.clone(), c)];
            for (mode, s) in shift.iter().enumerate() {
                let (m, n) = (mono.creation[mode], mono.annihilation[mode]);
                let mut next = Vec::with_capacity(partial.len() * ((m + 1) * (n + 1)) as usize);
                for (base, coeff) in &partial {
                    for p in 0..=m {
                        let cp = binomial(m, p) * (-s.conj()).powu(m - p);
                        for q in 0..=n {
                            let cq = binomial(n, q) * (-s).powu(n - q);
                            let mut mono = base.clone();
                            mono.creation[mode] = p;
                            mono.annihilation[mode] = q;
                            next.push((mono, coeff * cp * cq));
                        }
                    }
                }
                partial = next;
            }
            for (mono, coeff) in partial {
                out.accumulate(mono, coeff);
            }
        }
        Ok(out)
    }

    /// `exp(−iφn̂) L exp(iφn̂)`: coefficient of `(m, n)` picks up `e^{iφ(Σn − Σm)}`.
    /// Optimal amplitudes rotate by `e^{−iφ}`.
    pub fn rotated(&self, phi: f64) -> Self {
        let mut out = Self::zero(self.modes);
        for (mono, c) in &self.terms {
            let shift: i64 = mono
                .annihilation
                .iter()
                .zip(&mono.creation)
                .map(|(&n, &m)| i64::from(n) - i64::from(m))
                .sum();
            out.accumulate(mono.clone(), c * C64::from_polar(1.0, phi * shift as f64));
        }
        out
    }

    pub(crate) fn symbol_unchecked(&self, alpha: &[C64], beta: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(mono, c)| {
                let mut v = *c;
                for (i, (&m, &n)) in mono.creation.iter().zip(&mono.annihilation).enumerate() {
                    if m > 0 {
                        v *= alpha[i].conj().powu(m);
                    }
                    if n > 0 {
                        v *= beta[i].powu(n);
                    }
                }
                v
            })
            .sum()
    }

    /// G-map image of the polynomial, for any (not necessarily Hermitian) polynomial.
    pub fn g_matrix(&self, cfg: &AmplitudeConfiguration) -> Result<GMatrix> {
        if cfg.modes() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: cfg.modes(),
            });
        }
        let r = cfg.rank();
        let entries = CMatrix::from_fn(r, r, |i, j| {
            let (a, b) = (cfg.amplitude(i), cfg.amplitude(j));
            self.symbol_unchecked(a, b) * overlap_unchecked(a, b)
        });
        Ok(GMatrix {
            entries,
            amplitudes: cfg.clone(),
        })
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `k(α*, β) = Σ c(m,n) Π (α_i*)^{m_i} β_i^{n_i}`.
pub fn polynomial_symbol(poly: &NormalOrderedPolynomial, alpha: &[C64], beta: &[C64]) -> Result<C64> {
    for v in [alpha, beta] {
        if v.len() != poly.modes() {
            return Err(Error::DimensionMismatch {
                expected: poly.modes(),
                found: v.len(),
            });
        }
        for &z in v {
            check_finite(z, "symbol argument")?;
        }
    }
    Ok(poly.symbol_unchecked(alpha, beta))
}

/// A Hermitian observable whose bounds are computed.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Polynomial(NormalOrderedPolynomial),
    /// Rank-one projector `|ψ⟩⟨ψ|`.
    Projector(StateModel),
}

impl Observable {
    pub fn modes(&self) -> usize {
        match self {
            Observable::Polynomial(p) => p.modes(),
            Observable::Projector(s) => s.modes(),
        }
    }

    pub fn check_hermitian(&self) -> Result<()> {
        match self {
            Observable::Polynomial(p) if !p.is_hermitian() => {
                Err(Error::NonHermitian(p.hermitian_defect()))
            }
            _ => Ok(()),
        }
    }
}

/// Matrix of coherent-state matrix elements for a fixed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrix {
    pub entries: CMatrix,
    pub amplitudes: AmplitudeConfiguration,
}

impl GMatrix {
    pub fn rank(&self) -> usize {
        self.entries.nrows()
    }
}

fn check_modes(obs_modes: usize, cfg: &AmplitudeConfiguration) -> Result<()> {
    if obs_modes != cfg.modes() {
        return Err(Error::DimensionMismatch {
            expected: obs_modes,
            found: cfg.modes(),
        });
    }
    Ok(())
}

/// `G_K` for a Hermitian observable.
pub fn g_matrix(obs: &Observable, cfg: &AmplitudeConfiguration) -> Result<GMatrix> {
    obs.check_hermitian()?;
    check_modes(obs.modes(), cfg)?;
    match obs {
        Observable::Polynomial(p) => p.g_matrix(cfg),
        Observable::Projector(state) => {
            let g = g_vector(state, cfg)?;
            Ok(GMatrix {
                entries: &g * g.adjoint(),
                amplitudes: cfg.clone(),
            })
        }
    }
}

/// `G_{|ψ₂⟩⟨ψ₁|} = g_{ψ₂} g_{ψ₁}†`.
pub fn outer_g_matrix(
    ket: &StateModel,
    bra: &StateModel,
    cfg: &AmplitudeConfiguration,
) -> Result<GMatrix> {
    let left = g_vector(ket, cfg)?;
    let right = g_vector(bra, cfg)?;
    Ok(GMatrix {
        entries: left * right.adjoint(),
        amplitudes: cfg.clone(),
    })
}

/// `g_ψ = (⟨α_i|ψ⟩)_i`.
pub fn g_vector(state: &StateModel, cfg: &AmplitudeConfiguration) -> Result<CVector> {
    check_modes(state.modes(), cfg)?;
    let norm = state.self_overlap();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(norm));
    }
    Ok(g_vector_unchecked(state, cfg))
}

pub(crate) fn g_vector_unchecked(state: &StateModel, cfg: &AmplitudeConfiguration) -> CVector {
    CVector::from_iterator(
        cfg.rank(),
        cfg.iter().map(|a| state.overlap_unchecked(a)),
    )
}

fn require_single_mode(cfg: &AmplitudeConfiguration) -> Result<()> {
    match cfg.modes() {
        1 => Ok(()),
        n => Err(Error::MultimodeUnsupported(n)),
    }
}

fn amplitude_diagonal(cfg: &AmplitudeConfiguration) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(cfg.rank(), cfg.iter().map(|a| a[0])))
}

/// `G_â = G_1 · diag(α_1, …, α_r)`.
pub fn annihilation_g_matrix(cfg: &AmplitudeConfiguration) -> Result<GMatrix> {
    require_single_mode(cfg)?;
    let mut g = gram_matrix(cfg);
    g.entries *= amplitude_diagonal(cfg);
    Ok(g)
}

/// `G_{âK}` for a single-mode observable.
pub fn annihilation_weighted_g_matrix(obs: &Observable, cfg: &AmplitudeConfiguration) -> Result<GMatrix> {
    require_single_mode(cfg)?;
    check_modes(obs.modes(), cfg)?;
    match obs {
        Observable::Polynomial(p) => p.annihilation_times(0)?.g_matrix(cfg),
        Observable::Projector(state) => {
            let g = g_vector(state, cfg)?;
            let h = CVector::from_iterator(
                cfg.rank(),
                cfg.iter().map(|a| state.annihilated_overlap_unchecked(a[0])),
            );
            Ok(GMatrix {
                entries: h * g.adjoint(),
                amplitudes: cfg.clone(),
            })
        }
    }
}

/// `G_{[â,K]} = G_{âK} − G_K · diag(α)`.
pub fn commutator_g_matrix(obs: &Observable, cfg: &AmplitudeConfiguration) -> Result<GMatrix> {
    let mut ak = annihilation_weighted_g_matrix(obs, cfg)?;
    let ka = g_matrix(obs, cfg)?.entries * amplitude_diagonal(cfg);
    ak.entries -= ka;
    Ok(ak)
}
