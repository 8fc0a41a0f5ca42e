//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A symbol violates the declared alphabet bound.
    #[error("symbol {symbol} exceeds alphabet bound {bound}")]
    SymbolOutOfRange { symbol: u64, bound: u64 },

    /// A predicate-backed tree was queried past its declared certainty bound.
    #[error("code index {index} is beyond the predicate tree's certainty bound {bound}")]
    IndexBeyondCertainty { index: u64, bound: u64 },

    /// A branch witness failed (or could not supply digits for) a membership
    /// check at the given depth.
    #[error("branch witness failed the tree membership check at depth {depth}")]
    BranchCheckFailed { depth: u64 },

    /// The point is not a member of the subshift.
    #[error("point is not in the subshift")]
    NotInX,

    /// The word is not in the language of the subshift.
    #[error("word is not in the language of the subshift")]
    NotInLanguage,

    /// An interval-map operation was called outside [0, 1].
    #[error("argument lies outside the unit interval")]
    OutOfDomain,

    /// An enumeration exceeded its node budget.
    #[error("enumeration exceeded the configured budget of {budget} nodes")]
    ResourceLimit { budget: u64 },

    /// A certified construction could not reach the required tolerance.
    #[error("certification failed: {0}")]
    CertificationFailed(String),

    /// An allegedly surjective language has a word with no predecessor symbol.
    #[error("surjectivity violation: word {0:?} has no predecessor symbol")]
    SurjectivityViolation(Vec<u8>),

    /// A point that must carry block structure failed to parse.
    #[error("structural parse failed: {0}")]
    ParseFailure(String),

    /// An operation was called with inputs that violate its stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
