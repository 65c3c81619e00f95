use thiserror::Error;

use crate::multi_index::MultiIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("binomial lower index {0} has a negative component")]
    NegativeBinomialIndex(MultiIndex),

    #[error("{0} is not a time index in Z^n_+")]
    NotATimeIndex(MultiIndex),

    #[error("no flow rule for `{symbol}` along t{direction}")]
    MissingRule { symbol: String, direction: MultiIndex },

    #[error("no value assigned to `{0}`")]
    UnassignedVariable(String),

    #[error("component {component} of the product has an infinite Leibniz tail and no window was requested")]
    NoWindow { component: usize },

    #[error("exponent {exponent} lies outside the known window {window}")]
    OutsideWindow { exponent: MultiIndex, window: String },

    #[error("operator is not of the form 1 + (terms with negative last exponent): {0}")]
    NotUnital(String),

    #[error("expected a generic dressing: coefficient at {exponent} is not a bare symbol")]
    NotSymbolic { exponent: MultiIndex },

    #[error("dressing coefficients must be distinct symbols; `{0}` repeats")]
    RepeatedSymbol(String),

    #[error("leading form violated in component {component}: {detail}")]
    LeadingForm { component: usize, detail: String },

    #[error("negative exponent {0} in an ordered power")]
    NegativePower(MultiIndex),

    #[error("time index {0} has a zero component; the shift α⁻¹ s^-α is undefined there")]
    UnsupportedShiftIndex(MultiIndex),

    #[error("truncation degree {have} is too small, need at least {need}")]
    TruncationTooSmall { have: i64, need: i64 },

    #[error("series groups do not match: {0}")]
    GroupMismatch(String),

    #[error("tau vanishes at the evaluation point")]
    TauPole,

    #[error("series has no invertible constant term")]
    NotInvertible,

    #[error("{0}")]
    Invalid(String),
}
