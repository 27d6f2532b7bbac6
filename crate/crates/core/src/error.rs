use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("gamma function evaluated at a pole: {0}")]
    GammaPole(String),
    #[error("inconsistent substitution: {0}")]
    InconsistentSubstitution(String),
    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("non-commuting resolvent bases: {0}")]
    NonCommutingBase(String),
    #[error("non-pole singularity: {0}")]
    NonPoleSingularity(String),
    #[error("epsilon limit diverges: {0}")]
    EpsilonLimitDivergent(String),
    #[error("order {requested} exceeds maximum {max}")]
    OrderTooLarge { requested: usize, max: usize },
    #[error("tensor rank {0} is not supported")]
    UnsupportedRank(usize),
    #[error("validity condition violated: {0}")]
    ValidityViolated(String),
    #[error("no rule matches term: {0}")]
    NoRule(String),
    #[error("pole at s = 0: {0}")]
    PoleAtZero(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("substitution missing: {0}")]
    SubstitutionMissing(String),
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
