use thiserror::Error;

/// Errors raised by the numerical kernel and the experiment drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("space mismatch: expected {expected}, found {found}")]
    SpaceMismatch { expected: String, found: String },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("non-finite values encountered")]
    NonFinite,

    #[error("state is not composite: {0}")]
    NotComposite(String),

    #[error("Fock cutoff {cutoff} too small for |alpha| = {alpha_abs} (need N >= {required})")]
    TruncationTooSmall {
        alpha_abs: f64,
        cutoff: usize,
        required: usize,
    },

    #[error("output cutoff {output} is smaller than input cutoff {input}")]
    InsufficientOutputCutoff { input: usize, output: usize },

    #[error("invalid weight: m = {two_m}/2 for j = {two_j}/2")]
    InvalidWeight { two_j: u32, two_m: i32 },

    #[error("theta = pi is the antipodal point; use the highest-weight state directly")]
    AntipodalPoint,

    #[error("weight condition violated: j_A = {two_ja}/2 but j_B + j_C = {two_jbc}/2")]
    WeightConditionViolated { two_ja: u32, two_jbc: u32 },

    #[error("vector is not a unit vector (norm = {0})")]
    NotUnit(f64),

    #[error("state is not a two-qubit state: {0}")]
    NotTwoQubit(String),

    #[error("strategy unavailable: {0}")]
    StrategyUnavailable(String),

    #[error("quadrature failed to reach tolerance {tolerance:e} (estimate {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },

    #[error("step size too large: norm drift {drift:e} at t = {time}")]
    StepSizeTooLarge { drift: f64, time: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than by a numerical
    /// procedure failing on valid inputs.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::ZeroVector
                | Error::NonFinite
                | Error::QuadratureFailure { .. }
                | Error::StepSizeTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
