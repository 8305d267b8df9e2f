//! Outer optimization over amplitude configurations.
//!
//! `b_r(K)` / `b'_r(K)` are the largest / smallest generalized eigenvalue of
//! `(G_K, G_1)` optimized over all `r`-tuples of coherent amplitudes. The
//! search is a multi-start Nelder–Mead simplex over the `2·r·N` real
//! parameters. Starts are independent and run on the rayon pool; the reduction
//! over starts is ordered and therefore reproducible for a given seed.

mod simplex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    g_vector_unchecked, gram_matrix, AmplitudeConfiguration, NormalOrderedPolynomial, Observable,
};
use crate::spectral::{extremal_on_span, stationarity_residual, EigenSolution};
use crate::states::StateModel;
use crate::{CMatrix, Direction, Error, Result, C64};

use simplex::{minimize, SimplexOptions};

/// Amplitude norm, in units of `init_radius`, beyond which continued
/// improvement is read as an unbounded direction.
pub const ESCAPE_FACTOR: f64 = 10.0;

/// Accepted single-mode optima have a commutator residual below this.
pub const STATIONARITY_LIMIT: f64 = 1e-4;

/// Minimum number of unconstrained random starts when line initialization is on.
pub const MIN_RANDOM_STARTS: usize = 4;

/// Relative eigenvalue floor of `G_1` below which directions are dropped from
/// the inner eigenproblem during optimization.
pub const SPAN_CUTOFF: f64 = 1e-4;

const EFFECTIVE_RANK_CUTOFF: f64 = 1e-8;
const MAX_RESTARTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub n_starts: usize,
    /// Per simplex run; each start may restart the simplex a few times.
    pub max_iterations: usize,
    pub simplex_tolerance: f64,
    pub seed: u64,
    pub init_radius: f64,
    pub heuristic_line_init: bool,
    pub penalty_value: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            n_starts: 16,
            max_iterations: 20_000,
            simplex_tolerance: 1e-12,
            seed: 20_190_517,
            init_radius: 1.5,
            heuristic_line_init: false,
            penalty_value: 1e6,
        }
    }
}

impl OptimizerConfig {
    /// Defaults with the start count scaled to `r`: 16 up to `r = 4`, 48 beyond.
    pub fn for_rank(r: usize) -> Self {
        OptimizerConfig {
            n_starts: if r <= 4 { 16 } else { 48 },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(Error::InvalidInput("n_starts must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
        }
        for (name, v) in [
            ("simplex_tolerance", self.simplex_tolerance),
            ("init_radius", self.init_radius),
            ("penalty_value", self.penalty_value),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be positive and finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub r: usize,
    pub modes: usize,
    pub direction: Direction,
    pub bound: f64,
    pub optimal_amplitudes: AmplitudeConfiguration,
    pub optimal_coefficients: Vec<C64>,
    /// Commutator residual at the optimum; `None` for multimode problems.
    pub stationarity: Option<f64>,
    pub starts_converged: usize,
    pub best_start_index: usize,
    /// Number of coefficients above `1e-8·‖λ‖`; below `r` the optimum lies in a smaller set.
    pub effective_rank: usize,
    pub eigen_residual: f64,
    pub condition_estimate: f64,
}

impl BoundResult {
    pub fn is_stationary(&self) -> bool {
        self.stationarity.is_none_or(|s| s < STATIONARITY_LIMIT)
    }
}

fn to_configuration(x: &[f64], modes: usize) -> Result<AmplitudeConfiguration> {
    let half = x.len() / 2;
    let flat = (0..half).map(|i| C64::new(x[i], x[half + i])).collect();
    AmplitudeConfiguration::from_flat(modes, flat)
}

/// Extremal eigenpair of `(G_K, G_1)` for one configuration.
fn evaluate(obs: &Observable, cfg: &AmplitudeConfiguration, direction: Direction) -> Result<EigenSolution> {
    let g1 = gram_matrix(cfg).entries;
    let gk = match obs {
        Observable::Projector(state) => {
            let g = g_vector_unchecked(state, cfg);
            &g * g.adjoint()
        }
        Observable::Polynomial(p) => p.g_matrix(cfg)?.entries,
    };
    extremal_on_span(&gk, &g1, direction, SPAN_CUTOFF)
}

/// Direction of the line used by the heuristic start: perpendicular to the
/// quadrature picked out by the `â²` coefficient.
fn line_direction(obs: &Observable) -> C64 {
    let i = C64::new(0.0, 1.0);
    match obs {
        Observable::Polynomial(p) if p.modes() == 1 => {
            let c = p.coefficient(&[0], &[2]);
            if c.norm() > 0.0 {
                // â² coefficient of x(φ)² is e^{−2iφ}
                let phi = -0.5 * c.arg();
                i * C64::from_polar(1.0, phi)
            } else {
                i
            }
        }
        _ => i,
    }
}

struct StartOutcome {
    x: Vec<f64>,
    f: f64,
    converged: bool,
    penalized: bool,
}

struct Problem<'a> {
    obs: &'a Observable,
    r: usize,
    modes: usize,
    direction: Direction,
    config: &'a OptimizerConfig,
    init_radius: f64,
    warm: Option<&'a AmplitudeConfiguration>,
}

impl Problem<'_> {
    fn objective(&self, x: &[f64]) -> f64 {
        let sign = match self.direction {
            Direction::Inf => 1.0,
            Direction::Sup => -1.0,
        };
        match to_configuration(x, self.modes).and_then(|cfg| evaluate(self.obs, &cfg, self.direction)) {
            Ok(sol) => sign * sol.value,
            Err(_) => self.config.penalty_value,
        }
    }

    fn initial_point(&self, start: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.r * self.modes;
        if start >= self.config.n_starts {
            if let Some(warm) = self.warm {
                return self.extend_warm(warm, rng);
            }
        }
        let line_starts = if self.config.heuristic_line_init && self.modes == 1 {
            self.config.n_starts.saturating_sub(MIN_RANDOM_STARTS)
        } else {
            0
        };
        if start < line_starts {
            let dir = line_direction(self.obs);
            let spacing = Uniform::new(1.2, 1.8).expect("valid range").sample(rng);
            let jitter = Normal::new(0.0, 0.05).expect("valid sigma");
            let centre = (self.r as f64 - 1.0) / 2.0;
            let amps: Vec<C64> = (0..self.r)
                .map(|k| {
                    dir * ((k as f64 - centre) * spacing)
                        + C64::new(jitter.sample(rng), jitter.sample(rng))
                })
                .collect();
            amps.iter().map(|z| z.re).chain(amps.iter().map(|z| z.im)).collect()
        } else {
            let normal = Normal::new(0.0, self.init_radius / 2f64.sqrt()).expect("valid sigma");
            (0..2 * n).map(|_| normal.sample(rng)).collect()
        }
    }

    /// Previous optimum with fresh random amplitudes appended.
    fn extend_warm(&self, warm: &AmplitudeConfiguration, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let normal = Normal::new(0.0, self.init_radius / 2f64.sqrt()).expect("valid sigma");
        let mut amps: Vec<C64> = warm.as_flat().to_vec();
        while amps.len() < self.r * self.modes {
            amps.push(C64::new(normal.sample(rng), normal.sample(rng)));
        }
        amps.truncate(self.r * self.modes);
        amps.iter().map(|z| z.re).chain(amps.iter().map(|z| z.im)).collect()
    }

    fn run_start(&self, start: usize) -> Result<StartOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(start as u64);
        let mut x = self.initial_point(start, &mut rng);
        let escape = ESCAPE_FACTOR * self.init_radius;
        let modes = self.modes;
        let monitor = |x: &[f64], f: f64, gain: f64| -> Result<()> {
            if f >= self.config.penalty_value || gain <= 1e-6 * (1.0 + f.abs()) {
                return Ok(());
            }
            let norm = max_amplitude_norm(x, modes);
            if norm > escape {
                let value = match self.direction {
                    Direction::Inf => f,
                    Direction::Sup => -f,
                };
                return Err(Error::Unbounded { norm, value });
            }
            Ok(())
        };
        let mut step = 0.25 * self.init_radius;
        let mut f = f64::INFINITY;
        let mut converged = false;
        for _ in 0..MAX_RESTARTS {
            let opts = SimplexOptions {
                max_iterations: self.config.max_iterations,
                f_tolerance: self.config.simplex_tolerance,
                x_tolerance: 1e-7,
                initial_step: step,
            };
            let out = minimize(|p| self.objective(p), &x, &opts, monitor)?;
            let gain = f - out.f;
            x = out.x;
            f = out.f;
            converged = out.converged;
            if gain.is_finite() && gain <= self.config.simplex_tolerance * (1.0 + f.abs()) {
                break;
            }
            step = 0.05;
        }
        Ok(StartOutcome {
            penalized: f >= self.config.penalty_value,
            x,
            f,
            converged,
        })
    }
}

fn max_amplitude_norm(x: &[f64], modes: usize) -> f64 {
    let half = x.len() / 2;
    (0..half / modes)
        .map(|j| {
            (0..modes)
                .map(|m| {
                    let i = j * modes + m;
                    x[i] * x[i] + x[half + i] * x[half + i]
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn optimize(
    obs: &Observable,
    r: usize,
    modes: usize,
    direction: Direction,
    config: &OptimizerConfig,
    init_radius: f64,
    warm: Option<&AmplitudeConfiguration>,
) -> Result<BoundResult> {
    config.validate()?;
    obs.check_hermitian()?;
    if r == 0 {
        return Err(Error::InvalidInput("r must be at least 1".into()));
    }
    if modes != obs.modes() {
        return Err(Error::DimensionMismatch {
            expected: obs.modes(),
            found: modes,
        });
    }
    let problem = Problem {
        obs,
        r,
        modes,
        direction,
        config,
        init_radius,
        warm: warm.filter(|w| w.modes() == modes && w.rank() < r),
    };
    let total_starts = config.n_starts + usize::from(problem.warm.is_some());
    let outcomes: Vec<Result<StartOutcome>> = (0..total_starts)
        .into_par_iter()
        .map(|s| problem.run_start(s))
        .collect();

    let mut finished = Vec::with_capacity(outcomes.len());
    for (index, outcome) in outcomes.into_iter().enumerate() {
        finished.push((index, outcome?));
    }
    let usable: Vec<&(usize, StartOutcome)> = finished.iter().filter(|(_, o)| !o.penalized).collect();
    if usable.is_empty() {
        return Err(Error::Degenerate);
    }
    let best_f = usable.iter().map(|(_, o)| o.f).fold(f64::INFINITY, f64::min);
    let window = config.simplex_tolerance * (1.0 + best_f.abs());
    let (best_index, best) = usable
        .iter()
        .filter(|(_, o)| o.f <= best_f + window)
        .map(|(i, o)| (*i, o, norm(&o.x)))
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
        .map(|(i, o, _)| (i, o))
        .expect("at least one usable start");

    let cfg = to_configuration(&best.x, modes)?;
    let sol = evaluate(obs, &cfg, direction)?;
    let stationarity = if modes == 1 {
        Some(stationarity_residual(obs, &cfg, &sol)?)
    } else {
        None
    };
    let lambda_norm = sol.coefficients.norm();
    let effective_rank = sol
        .coefficients
        .iter()
        .filter(|c| c.norm() >= EFFECTIVE_RANK_CUTOFF * lambda_norm)
        .count();
    Ok(BoundResult {
        r,
        modes,
        direction,
        bound: sol.value,
        optimal_amplitudes: cfg,
        optimal_coefficients: sol.coefficients.iter().copied().collect(),
        stationarity,
        starts_converged: finished.iter().filter(|(_, o)| o.converged && !o.penalized).count(),
        best_start_index: best_index,
        effective_rank,
        eigen_residual: sol.residual,
        condition_estimate: sol.condition_estimate,
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `b_r(K)` (`Sup`) or `b'_r(K)` (`Inf`) over `r`-term superpositions of
/// `modes`-mode coherent states.
pub fn optimize_bound(
    obs: &Observable,
    r: usize,
    modes: usize,
    direction: Direction,
    config: &OptimizerConfig,
) -> Result<BoundResult> {
    optimize(obs, r, modes, direction, config, config.init_radius, None)
}

/// `b_r(|ψ⟩⟨ψ|) = max g†G_1⁻¹g`, the largest fidelity of `ψ` with an `r`-term
/// coherent superposition.
///
/// Random starts are drawn at a radius of at least `√⟨n̂⟩ + 1` so that they
/// cover the phase-space region where `ψ` lives.
pub fn pure_state_bound(psi: &StateModel, r: usize, config: &OptimizerConfig) -> Result<BoundResult> {
    if !psi.is_normalized() {
        return Err(Error::Unnormalized(psi.self_overlap()));
    }
    let radius = pure_state_radius(psi, config);
    let obs = Observable::Projector(psi.clone());
    optimize(&obs, r, psi.modes(), Direction::Sup, config, radius, None)
}

fn pure_state_radius(psi: &StateModel, config: &OptimizerConfig) -> f64 {
    config.init_radius.max(psi.mean_photon_number().sqrt() + 1.0)
}

/// Bounds for an increasing list of ranks, computed in order.
///
/// Each rank gets one extra start seeded with the previous optimum plus fresh
/// amplitudes, so the family respects the nesting `M_1 ⊂ M_2 ⊂ …` up to
/// optimizer rounding. A failure stops the sweep; results obtained before it
/// are kept.
#[derive(Debug)]
pub struct FamilyOutcome {
    pub results: Vec<BoundResult>,
    pub failure: Option<(usize, Error)>,
}

pub fn bound_family<F>(
    obs: &Observable,
    ranks: &[usize],
    modes: usize,
    direction: Direction,
    mut config_for_rank: F,
) -> FamilyOutcome
where
    F: FnMut(usize) -> OptimizerConfig,
{
    let pure = match obs {
        Observable::Projector(psi) if direction == Direction::Sup => Some(psi),
        _ => None,
    };
    let mut results: Vec<BoundResult> = Vec::with_capacity(ranks.len());
    for (k, &r) in ranks.iter().enumerate() {
        if k > 0 && r <= ranks[k - 1] {
            let err = Error::InvalidInput("ranks must be strictly increasing".into());
            return FamilyOutcome { results, failure: Some((r, err)) };
        }
        let config = config_for_rank(r);
        let radius = match pure {
            Some(psi) => pure_state_radius(psi, &config),
            None => config.init_radius,
        };
        let warm = results.last().map(|b| &b.optimal_amplitudes);
        match optimize(obs, r, modes, direction, &config, radius, warm) {
            Ok(res) => results.push(res),
            Err(e) => return FamilyOutcome { results, failure: Some((r, e)) },
        }
    }
    FamilyOutcome { results, failure: None }
}

/// Sum of the `r` largest normalized weights `|κ_k|²`, valid when the
/// components of `ψ` are nearly orthogonal.
pub fn finite_superposition_bound_approx(psi: &StateModel, r: usize) -> Result<f64> {
    let StateModel::CoherentSuperposition(s) = psi else {
        return Err(Error::InvalidState(
            "the well-separated approximation needs a coherent superposition".into(),
        ));
    };
    if r == 0 {
        return Err(Error::InvalidInput("r must be at least 1".into()));
    }
    let g = gram_matrix(s.amplitudes()).entries;
    let worst = (0..g.nrows())
        .flat_map(|i| (0..g.ncols()).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| g[(i, j)].norm())
        .fold(0.0, f64::max);
    if worst >= 1e-3 {
        return Err(Error::ApproximationDomain(worst));
    }
    let mut weights: Vec<f64> = s.coefficients().iter().map(|k| k.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    weights.sort_by(|a, b| b.total_cmp(a));
    Ok(weights.iter().take(r).sum::<f64>() / total)
}

/// Maps each amplitude vector `α → Uα` for a unitary `U`.
pub fn mode_transform(cfg: &AmplitudeConfiguration, unitary: &CMatrix) -> Result<AmplitudeConfiguration> {
    let n = cfg.modes();
    if unitary.nrows() != n || unitary.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: unitary.nrows(),
        });
    }
    let defect = crate::max_modulus(&(unitary.adjoint() * unitary - CMatrix::identity(n, n)));
    if !(defect <= 1e-10) {
        return Err(Error::NonUnitary(defect));
    }
    let mut flat = Vec::with_capacity(cfg.as_flat().len());
    for a in cfg.iter() {
        let v = unitary * crate::CVector::from_column_slice(a);
        flat.extend(v.iter().copied());
    }
    AmplitudeConfiguration::from_flat(n, flat)
}

/// Single-mode quadrature observable `x̂(0)²`.
pub fn quadrature_observable() -> Observable {
    Observable::Polynomial(NormalOrderedPolynomial::quadrature_squared())
}
