use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SzegoError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("truncation size must be at least 2, got {0}")]
    TooFewModes(usize),

    #[error("non-finite coefficient at mode {0}")]
    NonFinite(usize),

    #[error("pole parameter |p| = {modulus} is outside the open unit disk")]
    PoleOutsideDisk { modulus: f64 },

    #[error("pole too close to the unit circle: |p| = {modulus}")]
    PoleNearBoundary { modulus: f64 },

    #[error("blow-up condition violated: |discriminant^2 - alpha| = {gap}")]
    ConditionViolated { gap: f64 },

    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("growth fit needs at least {needed} samples in window, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("nonpositive norm {value} at t = {t}")]
    NonPositiveNorm { t: f64, value: f64 },

    #[error("Sobolev index {0} was not recorded")]
    MissingIndex(f64),
}

pub type Result<T> = std::result::Result<T, SzegoError>;
