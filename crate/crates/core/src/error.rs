use alloc::string::String;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty input")]
    Empty,

    #[error("coincident points require dd_confluent (point {point})")]
    CoincidentPoints { point: f64 },

    #[error("non-finite point {point}")]
    NonFinitePoint { point: f64 },

    #[error("insufficient bundle: {needed} unavailable")]
    InsufficientBundle { needed: &'static str },

    #[error("invalid multiplicity pattern: {0}")]
    InvalidPattern(&'static str),

    #[error("point {point} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { point: f64, lo: f64, hi: f64 },

    #[error("invalid domain [{lo}, {hi}]")]
    InvalidDomain { lo: f64, hi: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights must sum to 1 (sum = {sum})")]
    WeightSum { sum: f64 },

    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: f64, value: f64 },

    #[error("node escapes interval: {node} not in [{lo}, {hi}]")]
    NodeEscapes { node: f64, lo: f64, hi: f64 },

    #[error("degenerate interval [{lo}, {hi}]")]
    DegenerateInterval { lo: f64, hi: f64 },

    #[error("theorem hypotheses unmet: {0}")]
    HypothesesUnmet(&'static str),

    #[error("theorem requires m ≤ 1 ≤ M (got [{lo}, {hi}])")]
    IntervalExcludesOne { lo: f64, hi: f64 },

    #[error("ratio p/q unbounded at index {index} (q = 0 < p)")]
    UnboundedRatio { index: usize },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("missing parameter {0}")]
    MissingParameter(&'static str),

    #[error("gamma index {index} does not match its context")]
    GammaContextMismatch { index: u8 },

    #[error("grid too small: need at least {needed}, got {got}")]
    GridTooSmall { needed: usize, got: usize },

    #[error("Lyapunov requires strictly positive curve (Γ = {value} at t = {t})")]
    NonPositiveCurve { t: f64, value: f64 },

    #[error("mean-value denominator vanishes")]
    VanishingDenominator,

    #[error("MVT violated: target {target} outside [{lo}, {hi}]")]
    MvtViolated { target: f64, lo: f64, hi: f64 },

    #[error("inverse undefined: ratio of third derivatives is not strictly monotone")]
    InverseUndefined,
}

pub type Result<T> = core::result::Result<T, Error>;
