use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("expected {expected} hex digits, found {found}")]
    HexLength { expected: usize, found: usize },
    #[error("invalid hex digit {0:?}")]
    HexDigit(char),
    #[error("s-box table is not a permutation of 0..16")]
    NotPermutation,
    #[error("unknown convention profile {0:?}")]
    UnknownProfile(String),
    #[error("piling-up lemma needs at least one approximation")]
    NoApproximations,
    #[error("bias exponent must be negative, got {0}")]
    NonNegativeBias(i64),
    #[error("round count {rounds} outside 1..={max} for this search mode")]
    RoundsOutOfRange { rounds: usize, max: usize },
    #[error("component {0:?} has no weight and no fixed GE value")]
    UnknownComponent(String),
    #[error("bill row {0:?} has zero multiplicity or width")]
    EmptyRow(String),
    #[error("invalid GE quantity {0:?}")]
    BadQuantity(String),
    #[error("trial count must be at least 1")]
    NoTrials,
}
