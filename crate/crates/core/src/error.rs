use thiserror::Error;

/// Errors raised across the library.
///
/// Variants named `*Violated` or [`Error::Internal`] indicate that a checked
/// mathematical invariant failed. They should never be observed and point at a
/// bug rather than at bad input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not squarefree")]
    NonSquarefree(u64),
    #[error("parameters t={t}, n={n}, m={m} are not pairwise coprime")]
    NotCoprime { t: u64, n: u64, m: u64 },
    #[error("bad action exponent j={j} for n={n}, m={m}: {reason}")]
    BadAction { n: u64, m: u64, j: u64, reason: String },
    #[error("size {size} exceeds the engine bound {bound}")]
    TooLarge { size: u128, bound: u128 },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("permutation degree {found} does not match group degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("coset index {index} exceeds the bound {bound}")]
    IndexTooLarge { index: u128, bound: u128 },
    #[error("connection set contains the identity")]
    IdentityInS,
    #[error("connection set is not inverse-closed")]
    NotInverseClosed,
    #[error("subgroup chain 1 < K <| H < R does not hold: {0}")]
    BadChain(String),
    #[error("element is not a non-identity element of K")]
    NotInK,
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("group has the wrong shape: {0}")]
    WrongShape(String),
    #[error("no case of the reduction matched (K = {k}, H = {h})")]
    NoCaseMatched { k: String, h: String },
    #[error("{0} admits no GRR")]
    NoGrrExists(String),
    #[error("given group is not a subgroup of Aut(Cay(R,S))")]
    NotAutSubgroup,
    #[error("search budget of {0} samples exhausted")]
    BudgetExhausted(u64),
    #[error("not configured: {0}")]
    NotConfigured(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("certificate rejected: {0}")]
    Rejected(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}
