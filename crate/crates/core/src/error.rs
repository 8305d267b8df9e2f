use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("amplitude configuration must contain at least one amplitude of at least one mode")]
    EmptyConfiguration,

    #[error("amplitudes {first} and {second} coincide (max-norm distance {distance:e})")]
    CoincidentAmplitudes {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("observable or matrix is not Hermitian (defect {0:e})")]
    NonHermitian(f64),

    #[error("Gram matrix is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("negative discriminant {0:e} in the two-term closed form")]
    NegativeDiscriminant(f64),

    #[error("operation supports a single mode only, got {0} modes")]
    MultimodeUnsupported(usize),

    #[error("state is not normalized (self-overlap {0})")]
    Unnormalized(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("monomial degree {degree} exceeds the cap {cap}")]
    DegreeTooLarge { degree: u32, cap: u32 },

    #[error("Fock cutoff {cutoff} too small: tail estimate {tail:e}")]
    CutoffTooSmall { cutoff: usize, tail: f64 },

    #[error("Fock cutoff {cutoff} exceeds the cap {cap}")]
    CutoffTooLarge { cutoff: usize, cap: usize },

    #[error(
        "objective is unbounded in this direction: amplitudes reached norm {norm:.3} \
         while the objective kept improving (last value {value:.6e})"
    )]
    Unbounded { norm: f64, value: f64 },

    #[error("every optimizer start ended on a degenerate amplitude configuration")]
    Degenerate,

    #[error("components are not well separated (overlap modulus {0:e} above 1e-3)")]
    ApproximationDomain(f64),

    #[error("matrix is not unitary (defect {0:e})")]
    NonUnitary(f64),

    #[error("bound family is not monotone in r: b({r_prev}) = {prev}, b({r}) = {next}")]
    NonMonotone {
        r_prev: usize,
        prev: f64,
        r: usize,
        next: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("spec error: {0}")]
    Spec(String),
}
