use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be ≥ 3 (got {0})")]
    Dimension(usize),
    #[error("mesh needs at least 8 interior nodes (got {0})")]
    TooFewNodes(usize),
    #[error("grading exponent must be finite and ≥ 1 (got {0})")]
    Grading(f64),
    #[error("length mismatch: expected {expected} nodal values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("exponent {value} < 1 at node {node}")]
    ExponentBelowOne { node: usize, value: f64 },
    #[error("could not bracket the Luxemburg norm: {0}")]
    Bracket(String),
    #[error("profile is identically zero")]
    ZeroProfile,
    #[error("source modulation k(t) = {0} must be positive")]
    NonPositiveModulation(f64),
    #[error("delta must be positive (got {0})")]
    Delta(f64),
    #[error("empty profile dictionary")]
    EmptyDictionary,
    #[error("root finder failed: {0}")]
    RootFind(String),
    #[error("invalid solver configuration: {0}")]
    SolverConfig(String),
    #[error("linear solve failed: zero pivot at row {0}")]
    SingularPivot(usize),
    #[error("non-finite values after step at t = {0}")]
    NonFinite(f64),
    #[error("no blow-up: record terminated at the horizon")]
    NoBlowup,
    #[error("not enough samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("exponent q = {q} outside (2, {upper})")]
    ExponentRange { q: f64, upper: f64 },
    #[error("lower bound needs α±p± < 2 so that γ± > 1; {0}")]
    InterpolationRange(String),
    #[error("t0 = {0} is not covered by the trajectory")]
    TimeOutsideRecord(f64),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
