//! Combinatorics and spectral analysis of almost-primitive binary substitutions
//! `a ↦ aᵖ, b ↦ ba^{k₁}⋯ba^{k_r}`.
//!
//! Modules build on each other bottom-up: [`words`] is the word algebra,
//! [`substitution`] the normal form and language, [`returnwords`] the
//! return-word/Toeplitz structure, and [`palindromes`], [`repetition`] and
//! [`spectral`] the analyses built on top of it.

pub mod error;
pub mod palindromes;
pub mod repetition;
pub mod returnwords;
pub mod spectral;
pub mod substitution;
pub mod words;

pub use error::{Error, Result};
pub use substitution::Substitution;
pub use words::{BinaryWord, Letter, Word};

/// Upper limit on the number of symbols any single materialized word may have.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub usize);

impl Budget {
    pub const DEFAULT: Budget = Budget(10_000_000);

    /// Fails with [`Error::BudgetExceeded`] when `projected` symbols would not fit.
    pub fn check(self, projected: u128) -> Result<usize> {
        if projected > self.0 as u128 {
            Err(Error::BudgetExceeded { projected, budget: self.0 })
        } else {
            Ok(projected as usize)
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}
