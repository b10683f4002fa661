use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus polynomial is reducible over GF({p})")]
    Reducible { p: u64 },
    #[error("bad modulus degree: {0}")]
    BadDegree(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("a product ring needs at least one factor")]
    EmptyProduct,
    #[error("wrong length: expected {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("value {value} is not an element of a structure of order {order}")]
    InvalidElement { value: u64, order: u64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("factor count {got} out of range 1..={max}")]
    BadFactorCount { got: usize, max: usize },
    #[error("|K| = {k_order} and |F| = {f_order} are not coprime")]
    NotCoprime { k_order: u64, f_order: u64 },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("function is not 0-absorbing in the required index set")]
    NotAbsorbing,
    #[error("bad arity: {0}")]
    BadArity(String),
    #[error("function does not vanish off its product of lines")]
    NotSupportedOnLines,
    #[error("values on the product of lines disagree")]
    ValueMismatch,
    #[error("arguments out of range: {0}")]
    BadRange(String),
    #[error("lattices are not all over the same ring")]
    MixedDomains,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
