use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// All exponents zero, or no `b` in the image: the system collapses to a periodic one.
    #[error("degenerate substitution: {0}")]
    Degenerate(String),

    /// The operation needs an almost-primitive substitution.
    #[error("not almost primitive ({kind}): {operation} needs an almost-primitive substitution")]
    NotAlmostPrimitive { kind: String, operation: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length budget exceeded: projected {projected} symbols, budget {budget}")]
    BudgetExceeded { projected: u128, budget: usize },

    #[error("return letter overflow while iterating f")]
    LetterOverflow,

    #[error("illegal word: {0}")]
    IllegalWord(String),

    #[error("malformed window: {0}")]
    MalformedWindow(String),

    /// A cell that the computation depends on is still `?` at the available depth.
    #[error("undetermined cell at position {position}; more address digits are needed")]
    Undetermined { position: i64 },

    #[error("no B-strongly palindromic sequences for this B{}", .b_prime.map(|b| format!(" (B must stay below B' = {b})")).unwrap_or_default())]
    RegimeForbidden { b_prime: Option<f64> },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("{what} not found up to depth {depth}")]
    NotFound { what: String, depth: u32 },

    #[error("transfer matrix of `a` is not hyperbolic at this energy (|E - V_a| <= 2)")]
    NonHyperbolic,
}
