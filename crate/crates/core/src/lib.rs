//! Extremal expectation values of Hermitian observables over superpositions
//! of at most `r` coherent states, and the nonclassicality-degree witnesses
//! built from them.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: coherent-state overlaps, normally ordered polynomials and the
//!   map sending an operator to its matrix of coherent-state matrix elements.
//! * [`spectral`]: the generalized Hermitian eigenproblem `G_K λ = b G_1 λ` for a
//!   fixed set of amplitudes.
//! * [`states`]: analytic pure-state models and a truncated Fock-basis oracle.
//! * [`bounds`]: multi-start simplex search over amplitudes producing `b_r`/`b'_r`.
//! * [`witness`]: witness construction and certification of measured values.
//! * [`spec`]: JSON descriptions of observables, states and cached bounds.

pub mod algebra;
pub mod bounds;
mod error;
pub mod spec;
pub mod spectral;
pub mod states;
pub mod witness;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Whether a bound is a supremum (`b_r`) or an infimum (`b'_r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Inf,
    Sup,
}

impl Direction {
    /// `true` if `candidate` is strictly better than `incumbent` in this direction.
    pub fn improves(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Direction::Inf => candidate < incumbent,
            Direction::Sup => candidate > incumbent,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Inf => "inf",
            Direction::Sup => "sup",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "min" => Ok(Direction::Inf),
            "sup" | "max" => Ok(Direction::Sup),
            other => Err(Error::Spec(format!("unknown direction `{other}`"))),
        }
    }
}

pub(crate) fn check_finite(z: C64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Largest entry modulus.
pub(crate) fn max_modulus(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
