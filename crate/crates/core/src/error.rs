use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{n} exceeds the configured cap {cap}")]
    CapExceeded { p: u64, n: u32, cap: u64 },
    #[error("no monic irreducible polynomial of degree {n} over F_{p}")]
    NoIrreducible { p: u64, n: u32 },
    #[error("encoding {value} is out of range for a field of order {order}")]
    OutOfRange { value: u64, order: u64 },
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("dilation by zero")]
    ZeroDilation,
    #[error("ratio set needs |B| >= 2, got {0}")]
    RatioSetTooSmall(usize),
    #[error("budget exceeded for {what}: needs {needed}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("exact count overflowed 128 bits")]
    Overflow,
    #[error("{0} requires 0 not in A")]
    ZeroInSet(&'static str),
    #[error("{0} requires a prime field")]
    NotPrimeField(&'static str),
    #[error("matrix determinant is not 1")]
    NotUnimodular,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("infeasible set family: {0}")]
    InfeasibleFamily(String),
    #[error("config: {0}")]
    Config(String),
    #[error("trial {family} |A|={size} #{trial}: {cause}")]
    Trial {
        family: String,
        size: usize,
        trial: usize,
        cause: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn checked_add(a: u128, b: u128) -> Result<u128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn checked_mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}
