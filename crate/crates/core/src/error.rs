use thiserror::Error;

use crate::spaces::SpaceId;

/// Errors raised anywhere in the toolkit.
///
/// Budget-style failures (`StageBudgetExceeded`, `PrecisionStall`,
/// `PrecisionExhausted`, `DyadicBoundary`) are semi-decision outcomes: they
/// say a search ran out of stages, not that the mathematical object is bad.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("multiplication needs a magnitude bound on every operand")]
    MissingBound,
    #[error("combine needs at least one operand")]
    EmptyOperands,
    #[error("operation `{op}` takes exactly {expected} operand(s), got {got}")]
    Arity {
        op: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("stage budget of {budget} exceeded before the enclosure closed")]
    StageBudgetExceeded { budget: u32 },
    #[error("space mismatch: expected {expected}, found {found}")]
    SpaceMismatch { expected: SpaceId, found: SpaceId },
    #[error("support of size {size} exceeds the exact-method cap of {cap}")]
    SupportTooLarge { size: usize, cap: usize },
    #[error("neither third of J_{level} certified below 2^-{level} within the stage budget")]
    PrecisionStall { level: usize },
    #[error("unsupported morphism: {0}")]
    UnsupportedMorphism(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("the measure has (or may have) atoms")]
    AtomicMeasure,
    #[error("cannot certify bit {bit}: the point is (near-)dyadic")]
    DyadicBoundary { bit: usize },
    #[error("2^c = 2^{c} does not exceed the sum bound {bound}")]
    BadConstant { c: i64, bound: String },
    #[error("observable has no exact cylinder form: {0}")]
    UnsupportedObservable(String),
    #[error("witness chain broken at level {level}: {reason}")]
    BrokenWitnessChain { level: u32, reason: String },
    #[error("enclosure too wide after {step} step(s); restart with more precision")]
    PrecisionExhausted { step: u64 },
    #[error("problem too large for exact enumeration: {0}")]
    TooLarge(String),
    #[error("delta {delta} equals an achievable deviation at n = {n}")]
    BadDelta { delta: String, n: u64 },
    #[error("alpha must lie in (0, 1), got {0}")]
    BadAlpha(String),
    #[error("ratio k/l = {ratio} is outside [beta, 1] with beta = {beta}")]
    BadRatio { ratio: String, beta: String },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures that mean "ran out of stages or precision".
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::StageBudgetExceeded { .. }
                | Error::PrecisionStall { .. }
                | Error::PrecisionExhausted { .. }
                | Error::DyadicBoundary { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
