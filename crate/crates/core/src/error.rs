use thiserror::Error;

/// Errors raised by the algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("operands live over different prime fields (p = {0} and p = {1})")]
    FieldMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("polynomial is not a p-th power: exponent {exponent} is not divisible by {p}")]
    NotAPthPower { exponent: u64, p: u32 },
    #[error("exact division failed: divisor does not divide dividend")]
    NotDivisible,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("cannot lift from level {from} down to level {to}")]
    LevelTooLow { from: u32, to: u32 },
    #[error("level {level} exceeds the configured maximum {max}")]
    LevelOverflow { level: u32, max: u32 },
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("derivative is nonzero, polynomial is not a p-th power")]
    DerivativeNonzero,
    #[error("not a p-th power in Z_p(X): the root leaves level 0")]
    NotPerfectMode,
    #[error("field size {p}^{n} is outside the supported range")]
    BoundExceeded { p: u32, n: u32 },
    #[error("no embedding of F_{p}^{from} into F_{p}^{to}")]
    NoEmbedding { p: u32, from: u32, to: u32 },
    #[error("elements belong to different finite fields")]
    FqMismatch,
    #[error("polynomials use different coefficient modes")]
    ModeMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
