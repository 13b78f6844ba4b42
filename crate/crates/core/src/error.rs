use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate geodesic: endpoints coincide")]
    DegenerateGeodesic,

    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    /// The enclosure of x is too wide to certify the requested quantity.
    /// `certified` is the number of partial quotients that could be certified.
    #[error("precision exhausted after {certified} certified terms")]
    PrecisionExhausted { certified: usize },

    #[error("rational input is not allowed here")]
    RationalInput,

    #[error("two approximants are at the same distance from x; ordering is ambiguous")]
    Tie,

    #[error("insufficient events: needed {needed}, got {got}")]
    InsufficientEvents { needed: usize, got: usize },

    /// Enumeration hit its node budget before reaching the requested height.
    /// `ln_height` is the natural log of the lowest crossing height reached.
    #[error("node budget of {budget} exhausted at ln(height) = {ln_height:.3}")]
    BudgetExceeded { budget: usize, ln_height: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
