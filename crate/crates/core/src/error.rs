//! Error type shared across the crate.

use crate::ring_tower::Level;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The base characteristic must be an odd prime; index-2 extensions of
    /// 2-adic chain rings need a different quadratic form and are out of scope.
    #[error("characteristic {0} is not an odd prime")]
    UnsupportedCharacteristic(u64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Tower sizes are capped so every element fits a machine word and
    /// exhaustive scans stay addressable.
    #[error("ring tower too large: {0}")]
    ContextTooLarge(String),

    #[error("expected an element at level {expected:?}, found {found:?}")]
    LevelMismatch { expected: Level, found: Level },

    #[error("operands belong to different contexts or lengths")]
    ContextMismatch,

    #[error("element is not a unit (p-valuation {valuation})")]
    NotAUnit { valuation: u32 },

    #[error("division requires a monic divisor")]
    NonMonicDivisor,

    #[error("the zero polynomial has no reciprocal")]
    ZeroPolynomial,

    #[error("length {n} is not coprime to the characteristic {p}: gcd(n, p) must be 1")]
    LengthNotCoprime { n: usize, p: u64 },

    #[error("not a divisor of x^n - 1 in this factor basis")]
    NotADivisor,

    #[error("deg(r) must stay below deg(g) - deg(gcd(f, g))")]
    DegreeBound,

    #[error("matrix shape mismatch: {0}")]
    ShapeError(String),

    #[error("span is not a free module")]
    NotFree,

    /// A free span whose projection or kernel is not generated by a monic
    /// divisor of x^n - 1 admits no (f, r, g) presentation at all.
    #[error("free span admits no canonical (f, r, g) form: {0}")]
    NoCanonicalForm(String),

    #[error("closed-form dual is only defined for r = 0")]
    ClosedFormInapplicable,

    #[error("enumeration budget exceeded (needed {needed}, budget {budget})")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("pair is not an additive complementary pair")]
    NotAcp,
}

pub type Result<T> = std::result::Result<T, Error>;
