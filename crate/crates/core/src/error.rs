use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generators do not span a rank-4 lattice")]
    RankDeficient,
    #[error("lattice is not an order")]
    NotAnOrder,
    #[error("maximal order search for p={p} stalled at discriminant {last_disc}")]
    MaximalOrder { p: u64, last_disc: u64 },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("class enumeration did not reach the mass: {0}")]
    MassMismatch(String),
    #[error("coefficient table too short: need {needed} terms, have {have}")]
    TableTooShort { needed: usize, have: usize },
    #[error("functional-equation sign could not be determined{0}")]
    SignUndetermined(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
