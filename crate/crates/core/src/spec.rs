//! JSON descriptions of observables, states and cached bound families.
//!
//! Observable:
//!
//! ```json
//! { "type": "polynomial", "modes": 1,
//!   "terms": [ { "m": [1], "n": [1], "re": 2.0, "im": 0.0 } ] }
//! { "type": "projector", "state": { ... } }
//! ```
//!
//! State:
//!
//! ```json
//! { "type": "superposition", "modes": 1,
//!   "components": [ { "coefficient": {"re": 1, "im": 0}, "amplitude": [ {"re": 1.5, "im": 0} ] } ] }
//! { "type": "squeezed", "xi": {"re": 0.5, "im": 0} }
//! { "type": "fock", "coefficients": [ {"re": 1, "im": 0}, ... ] }
//! { "type": "compass", "R": 4, "beta": 3.0 }
//! ```
//!
//! Every parser validates sizes before allocating anything proportional to
//! them; the inputs may come from untrusted files.

use serde::{Deserialize, Serialize};

use crate::algebra::{AmplitudeConfiguration, NormalOrderedPolynomial, Observable};
use crate::bounds::{BoundResult, OptimizerConfig};
use crate::states::{make_compass, oracle, CompassSpec, StateModel};
use crate::witness::check_nesting;
use crate::{Direction, Error, Result, C64};

pub const MAX_MODES: usize = 32;
pub const MAX_TERMS: usize = 1024;
pub const MAX_COMPONENTS: usize = 256;

/// Schema version written into every cache file and report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexSpec> for C64 {
    fn from(c: ComplexSpec) -> Self {
        C64::new(c.re, c.im)
    }
}

impl From<C64> for ComplexSpec {
    fn from(z: C64) -> Self {
        ComplexSpec { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub m: Vec<u32>,
    pub n: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObservableSpec {
    Polynomial { modes: usize, terms: Vec<TermSpec> },
    Projector { state: StateSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub coefficient: ComplexSpec,
    pub amplitude: Vec<ComplexSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Superposition {
        modes: usize,
        components: Vec<ComponentSpec>,
    },
    Squeezed {
        xi: ComplexSpec,
    },
    Fock {
        coefficients: Vec<ComplexSpec>,
    },
    Compass {
        #[serde(rename = "R")]
        components: usize,
        beta: f64,
    },
}

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 || modes > MAX_MODES {
        return Err(Error::Spec(format!("modes must be in 1..={MAX_MODES}, got {modes}")));
    }
    Ok(())
}

impl ObservableSpec {
    pub fn to_observable(&self) -> Result<Observable> {
        match self {
            ObservableSpec::Polynomial { modes, terms } => {
                check_modes(*modes)?;
                if terms.len() > MAX_TERMS {
                    return Err(Error::Spec(format!("at most {MAX_TERMS} terms are supported")));
                }
                let mut poly = NormalOrderedPolynomial::zero(*modes);
                for t in terms {
                    poly.add_term(t.m.clone(), t.n.clone(), C64::new(t.re, t.im))
                        .map_err(|e| Error::Spec(format!("term {:?}/{:?}: {e}", t.m, t.n)))?;
                }
                let obs = Observable::Polynomial(poly);
                obs.check_hermitian()
                    .map_err(|e| Error::Spec(format!("observable must be Hermitian: {e}")))?;
                Ok(obs)
            }
            ObservableSpec::Projector { state } => Ok(Observable::Projector(state.to_state()?)),
        }
    }

    pub fn from_observable(obs: &Observable) -> Self {
        match obs {
            Observable::Polynomial(p) => ObservableSpec::Polynomial {
                modes: p.modes(),
                terms: p
                    .terms()
                    .map(|(mono, c)| TermSpec {
                        m: mono.creation.clone(),
                        n: mono.annihilation.clone(),
                        re: c.re,
                        im: c.im,
                    })
                    .collect(),
            },
            Observable::Projector(state) => ObservableSpec::Projector {
                state: StateSpec::from_state(state),
            },
        }
    }
}

impl StateSpec {
    pub fn to_state(&self) -> Result<StateModel> {
        let wrap = |e: Error| Error::Spec(e.to_string());
        match self {
            StateSpec::Superposition { modes, components } => {
                check_modes(*modes)?;
                if components.is_empty() || components.len() > MAX_COMPONENTS {
                    return Err(Error::Spec(format!(
                        "superposition needs 1..={MAX_COMPONENTS} components"
                    )));
                }
                let mut coefficients = Vec::with_capacity(components.len());
                let mut amps = Vec::with_capacity(components.len());
                for comp in components {
                    coefficients.push(comp.coefficient.into());
                    amps.push(comp.amplitude.iter().map(|&z| z.into()).collect());
                }
                let cfg = AmplitudeConfiguration::new(*modes, amps).map_err(wrap)?;
                StateModel::superposition(coefficients, cfg).map_err(wrap)
            }
            StateSpec::Squeezed { xi } => StateModel::squeezed_vacuum((*xi).into()).map_err(wrap),
            StateSpec::Fock { coefficients } => {
                if coefficients.len() > oracle::MAX_CUTOFF + 1 {
                    return Err(Error::Spec(format!(
                        "Fock vectors are limited to {} entries",
                        oracle::MAX_CUTOFF + 1
                    )));
                }
                StateModel::fock(coefficients.iter().map(|&z| z.into()).collect()).map_err(wrap)
            }
            StateSpec::Compass { components, beta } => {
                if *components > MAX_COMPONENTS {
                    return Err(Error::Spec(format!("compass R is limited to {MAX_COMPONENTS}")));
                }
                make_compass(CompassSpec {
                    components: *components,
                    beta: *beta,
                })
                .map_err(wrap)
            }
        }
    }

    /// Compass states come back as plain superpositions.
    pub fn from_state(state: &StateModel) -> Self {
        match state {
            StateModel::CoherentSuperposition(s) => StateSpec::Superposition {
                modes: s.amplitudes().modes(),
                components: s
                    .amplitudes()
                    .iter()
                    .zip(s.coefficients())
                    .map(|(a, k)| ComponentSpec {
                        coefficient: (*k).into(),
                        amplitude: a.iter().map(|&z| z.into()).collect(),
                    })
                    .collect(),
            },
            StateModel::SqueezedVacuum(sq) => StateSpec::Squeezed { xi: sq.xi().into() },
            StateModel::Fock(f) => StateSpec::Fock {
                coefficients: f.coefficients().iter().map(|&z| z.into()).collect(),
            },
        }
    }
}

pub fn parse_observable(text: &str) -> Result<Observable> {
    let spec: ObservableSpec = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    spec.to_observable()
}

pub fn parse_state(text: &str) -> Result<StateModel> {
    let spec: StateSpec = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    spec.to_state()
}

/// On-disk family of bounds `r = 1..R` for one observable and optimizer setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCache {
    pub schema_version: u32,
    pub key: String,
    pub observable: ObservableSpec,
    pub direction: Direction,
    pub config: OptimizerConfig,
    pub results: Vec<BoundResult>,
}

impl BoundCache {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Spec(format!(
                "unsupported cache schema version {}",
                self.schema_version
            )));
        }
        let modes = match &self.observable {
            ObservableSpec::Polynomial { modes, .. } => *modes,
            ObservableSpec::Projector { .. } => self.observable.to_observable()?.modes(),
        };
        for res in &self.results {
            if res.direction != self.direction {
                return Err(Error::Spec("cached result direction mismatch".into()));
            }
            if res.modes != modes || res.optimal_amplitudes.modes() != modes {
                return Err(Error::Spec("cached result mode count mismatch".into()));
            }
            if res.optimal_amplitudes.rank() != res.r || res.optimal_coefficients.len() != res.r {
                return Err(Error::Spec(format!("cached result for r = {} is malformed", res.r)));
            }
        }
        let family: Vec<(usize, f64)> = self.results.iter().map(|b| (b.r, b.bound)).collect();
        check_nesting(self.direction, &family).map_err(|e| Error::Spec(e.to_string()))
    }
}

pub fn parse_bound_cache(text: &str) -> Result<BoundCache> {
    let cache: BoundCache = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
    cache.validate()?;
    Ok(cache)
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUADRATURE: &str = r#"{
        "type": "polynomial", "modes": 1,
        "terms": [
            {"m": [1], "n": [1], "re": 2.0},
            {"m": [0], "n": [2], "re": 1.0, "im": 0.0},
            {"m": [2], "n": [0], "re": 1.0},
            {"m": [0], "n": [0], "re": 1.0}
        ]
    }"#;

    #[test]
    fn parses_quadrature() {
        let obs = parse_observable(QUADRATURE).unwrap();
        assert_eq!(obs, Observable::Polynomial(NormalOrderedPolynomial::quadrature_squared()));
    }

    #[test]
    fn rejects_non_hermitian_polynomial() {
        let text = r#"{"type":"polynomial","modes":1,"terms":[{"m":[0],"n":[2],"re":1.0}]}"#;
        assert!(matches!(parse_observable(text), Err(Error::Spec(_))));
    }

    #[test]
    fn parses_states() {
        let cat = parse_state(r#"{"type":"compass","R":2,"beta":1.5}"#).unwrap();
        assert!(cat.is_normalized());
        let sq = parse_state(r#"{"type":"squeezed","xi":{"re":0.5}}"#).unwrap();
        assert!(matches!(sq, StateModel::SqueezedVacuum(_)));
        let f = parse_state(r#"{"type":"fock","coefficients":[{"re":1},{"re":0,"im":1}]}"#).unwrap();
        assert!(f.is_normalized());
        let s = parse_state(
            r#"{"type":"superposition","modes":2,"components":[
                {"coefficient":{"re":1},"amplitude":[{"re":1},{"re":0,"im":2}]},
                {"coefficient":{"re":-1},"amplitude":[{"re":-1},{"re":0}]}]}"#,
        )
        .unwrap();
        assert_eq!(s.modes(), 2);
    }

    #[test]
    fn rejects_malformed_input() {
        for text in [
            "",
            "{}",
            r#"{"type":"compass","R":100000000000,"beta":1}"#,
            r#"{"type":"compass","R":2,"beta":0}"#,
            r#"{"type":"squeezed","xi":{"re":1e308}}"#,
            r#"{"type":"superposition","modes":0,"components":[]}"#,
            r#"{"type":"superposition","modes":1,"components":[{"coefficient":{"re":1},"amplitude":[]}]}"#,
            r#"{"type":"fock","coefficients":[]}"#,
            r#"{"type":"squeezed","xi":{"re":0.1},"extra":1}"#,
        ] {
            assert!(parse_state(text).is_err(), "{text}");
        }
        for text in [
            r#"{"type":"polynomial","modes":100000,"terms":[]}"#,
            r#"{"type":"polynomial","modes":1,"terms":[{"m":[99],"n":[99],"re":1}]}"#,
            r#"{"type":"polynomial","modes":2,"terms":[{"m":[1],"n":[1],"re":1}]}"#,
        ] {
            assert!(parse_observable(text).is_err(), "{text}");
        }
    }

    #[test]
    fn observable_spec_round_trip() {
        let obs = parse_observable(QUADRATURE).unwrap();
        let text = serde_json::to_string(&ObservableSpec::from_observable(&obs)).unwrap();
        assert_eq!(parse_observable(&text).unwrap(), obs);
    }
}
