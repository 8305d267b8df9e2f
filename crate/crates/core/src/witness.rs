//! Witnesses `W_r = b_r·1 − K` / `W'_r = K − b'_r·1` and certification of
//! measured expectation values.
//!
//! Certification is one-sided: a violated bound excludes the state from the
//! set of mixtures of `r`-term superpositions, so the degree exceeds `r`. A
//! bound that is not violated says nothing about the degree.

use serde::{Deserialize, Serialize};

use crate::algebra::Observable;
use crate::bounds::{optimize_bound, BoundResult, OptimizerConfig};
use crate::{Direction, Error, Result};

/// Slack allowed when checking that a bound family is monotone in `r`.
pub const NESTING_TOLERANCE: f64 = 1e-9;

/// A witness kept symbolically as `bound·1 ∓ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub observable: Observable,
    pub r: usize,
    pub modes: usize,
    pub direction: Direction,
    pub bound: f64,
    pub provenance: BoundResult,
}

impl Witness {
    pub fn from_bound(observable: Observable, provenance: BoundResult) -> Self {
        Witness {
            observable,
            r: provenance.r,
            modes: provenance.modes,
            direction: provenance.direction,
            bound: provenance.bound,
            provenance,
        }
    }

    /// `⟨W⟩` given `⟨K⟩`; negative values certify exclusion from `M_r`.
    pub fn expectation(&self, observable_mean: f64) -> f64 {
        match self.direction {
            Direction::Sup => self.bound - observable_mean,
            Direction::Inf => observable_mean - self.bound,
        }
    }

    pub fn is_violated_by(&self, observable_mean: f64) -> bool {
        self.expectation(observable_mean) < 0.0
    }
}

pub fn build_witness(
    obs: &Observable,
    r: usize,
    modes: usize,
    direction: Direction,
    config: &OptimizerConfig,
) -> Result<Witness> {
    let result = optimize_bound(obs, r, modes, direction, config)?;
    Ok(Witness::from_bound(obs.clone(), result))
}

/// A scalar measured expectation value with an optional standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: f64,
    pub std_error: Option<f64>,
}

impl Measurement {
    pub fn exact(value: f64) -> Self {
        Measurement { value, std_error: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationResult {
    pub measured_value: f64,
    pub violated_r: Vec<usize>,
    pub certified_statement: String,
    /// Distance of the measured value beyond the largest violated bound, or
    /// (negative) short of the `r = 1` bound when nothing is violated.
    pub margin: f64,
    pub margin_in_std_errors: Option<f64>,
    /// Largest `r` covered by the witness family.
    pub max_r_checked: usize,
}

impl CertificationResult {
    /// `D_Ncl > k` for the largest violated `k`, if any.
    pub fn degree_exceeds(&self) -> Option<usize> {
        self.violated_r.last().copied()
    }
}

/// Checks `b'_1 ≥ b'_2 ≥ …` (infimum) or `b_1 ≤ b_2 ≤ …` (supremum) for a
/// family listed by increasing consecutive `r` starting at 1.
pub fn check_nesting(direction: Direction, family: &[(usize, f64)]) -> Result<()> {
    for (k, &(r, _)) in family.iter().enumerate() {
        if r != k + 1 {
            return Err(Error::InvalidInput(format!(
                "bound family must list r = 1, 2, … in order; position {k} has r = {r}"
            )));
        }
    }
    check_monotone(direction, family)
}

/// Monotonicity in `r` for any strictly increasing (not necessarily
/// consecutive) list of ranks.
pub fn check_monotone(direction: Direction, family: &[(usize, f64)]) -> Result<()> {
    if family.windows(2).any(|p| p[1].0 <= p[0].0) {
        return Err(Error::InvalidInput("ranks must be strictly increasing".into()));
    }
    if let Some(&(_, b)) = family.first() {
        if !b.is_finite() {
            return Err(Error::NonFinite("bound"));
        }
    }
    for pair in family.windows(2) {
        let ((r_prev, prev), (r, next)) = (pair[0], pair[1]);
        let bad = match direction {
            Direction::Inf => next > prev + NESTING_TOLERANCE,
            Direction::Sup => next < prev - NESTING_TOLERANCE,
        };
        if bad || !next.is_finite() {
            return Err(Error::NonMonotone { r_prev, prev, r, next });
        }
    }
    Ok(())
}

/// Compares a measured value against a witness family for `r = 1 … R`.
pub fn certify(family: &[Witness], measured: Measurement) -> Result<CertificationResult> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidInput("empty witness family".into()))?;
    for w in family {
        if w.direction != first.direction || w.observable != first.observable {
            return Err(Error::InvalidInput(
                "witnesses must share observable and direction".into(),
            ));
        }
    }
    let bounds: Vec<(usize, f64)> = family.iter().map(|w| (w.r, w.bound)).collect();
    certify_bounds(first.direction, &bounds, measured)
}

/// Same as [`certify`] on bare `(r, bound)` pairs.
pub fn certify_bounds(
    direction: Direction,
    bounds: &[(usize, f64)],
    measured: Measurement,
) -> Result<CertificationResult> {
    if bounds.is_empty() {
        return Err(Error::InvalidInput("empty bound family".into()));
    }
    if !measured.value.is_finite() {
        return Err(Error::InvalidInput("measured value must be finite".into()));
    }
    if let Some(se) = measured.std_error {
        if !(se > 0.0) || !se.is_finite() {
            return Err(Error::InvalidInput("standard error must be positive".into()));
        }
    }
    check_nesting(direction, bounds)?;

    let violated = |b: f64| match direction {
        Direction::Inf => measured.value < b,
        Direction::Sup => measured.value > b,
    };
    let violated_r: Vec<usize> = bounds.iter().filter(|(_, b)| violated(*b)).map(|(r, _)| *r).collect();
    if violated_r.iter().enumerate().any(|(k, &r)| r != k + 1) {
        return Err(Error::InvalidInput(format!(
            "violated set {violated_r:?} is not a prefix of 1..R"
        )));
    }
    let reference = match violated_r.last() {
        Some(&r) => bounds[r - 1].1,
        None => bounds[0].1,
    };
    let margin = match direction {
        Direction::Inf => reference - measured.value,
        Direction::Sup => measured.value - reference,
    };
    let max_r = bounds.last().map(|(r, _)| *r).unwrap_or(0);
    let certified_statement = match violated_r.last() {
        Some(&k) if k == max_r => format!(
            "state lies outside M_r for r = 1..{k}, hence D_Ncl > {k} (degree at least {}); \
             every computed bound is violated, larger r were not evaluated",
            k + 1
        ),
        Some(&k) => format!(
            "state lies outside M_r for r = 1..{k}, hence D_Ncl > {k} (degree at least {})",
            k + 1
        ),
        None => "no bound violated; nothing is certified".to_string(),
    };
    Ok(CertificationResult {
        measured_value: measured.value,
        margin_in_std_errors: measured.std_error.map(|se| margin / se),
        violated_r,
        certified_statement,
        margin,
        max_r_checked: max_r,
    })
}

/// `−10·log10(x)` for a vacuum-normalized variance.
pub fn squeezing_db(variance: f64) -> Result<f64> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::InvalidInput(format!(
            "squeezing in dB needs a positive variance, got {variance}"
        )));
    }
    Ok(-10.0 * variance.log10())
}

/// Inverse of [`squeezing_db`].
pub fn variance_from_db(db: f64) -> Result<f64> {
    if !db.is_finite() {
        return Err(Error::InvalidInput("dB value must be finite".into()));
    }
    Ok(10f64.powf(-db / 10.0))
}

/// `d_r = 2(1 − b_r)`, the squared distance of a pure state to the closest
/// normalized `r`-term superposition.
pub fn pure_state_distance(b_r: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&b_r) {
        return Err(Error::InvalidInput(format!("fidelity bound {b_r} outside [0, 1]")));
    }
    Ok(2.0 * (1.0 - b_r.clamp(0.0, 1.0)))
}
