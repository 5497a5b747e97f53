use crate::model::TreatmentKind;

/// Error type shared by all modules of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("mediator index {index} out of range 1..={k}")]
    MediatorIndex { index: usize, k: usize },

    #[error("operation requires a single-mediator system, got k={k}")]
    SingleMediatorRequired { k: usize },

    #[error("operation requires {expected:?} treatment, system declares {actual:?}")]
    TreatmentKind {
        expected: TreatmentKind,
        actual: TreatmentKind,
    },

    #[error("binary treatment value must be 0 or 1, got {value}")]
    BinaryTreatmentValue { value: f64 },

    #[error("reduction requires at least two mediators, got k={k}")]
    NeedTwoMediators { k: usize },

    #[error(
        "keep set {keep:?} is not ancestral for the mediator chain: \
         it must be a contiguous upper range of indices ending at k"
    )]
    NonAncestralKeep { keep: Vec<usize> },

    #[error("Taylor reduction is only supported for k=2, got k={k}")]
    TaylorNeedsTwoMediators { k: usize },

    #[error("empty interval: lower {lower} > upper {upper}")]
    EmptyInterval { lower: f64, upper: f64 },

    #[error("enumeration limited to k<={max} mediators, got k={k}")]
    TooManyMediators { k: usize, max: usize },

    #[error("non-finite value for {what}")]
    NonFinite { what: &'static str },

    #[error("invalid system: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
