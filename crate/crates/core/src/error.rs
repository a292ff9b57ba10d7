//! Kernel errors and tri-state comparison results.

use thiserror::Error;

use crate::budget::Budget;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("argument is not dyadic")]
    NonDyadic,

    #[error("empty cut: left bound is not below right bound")]
    EmptyInterval,

    #[error("no nonzero leading term found within budget {budget:?}")]
    ZeroOrIndeterminateLeading { budget: Budget },

    #[error("argument could not be proven positive within budget")]
    NonPositive,

    #[error("argument must be infinitesimal")]
    NotInfinitesimal,

    #[error("coefficient sign undecided at {prec} bits while {context}")]
    IndeterminateCoeff { prec: u32, context: &'static str },

    #[error("exponent comparison undecided within budget while {context}")]
    IndeterminateExponent { context: &'static str },

    #[error("work budget exhausted (terms forced: {forced})")]
    BudgetExhausted { forced: usize },

    #[error("recursion depth budget exhausted")]
    DepthExhausted,

    #[error("no representable answer in the fragment within budget: {context}")]
    FragmentExhausted { context: &'static str },

    #[error("operation outside the supported fragment: {0}")]
    Unsupported(&'static str),
}

pub type KResult<T> = Result<T, KernelError>;

/// Why a comparison could not be decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Undecided {
    /// Coefficient intervals still overlap at the budget precision.
    Coeff,
    /// Not enough stream terms forcible to find a separating term.
    Terms,
    /// Exponent recursion hit the depth cap.
    Depth,
}

/// Tri-state ordering on lazily represented values.
///
/// `Equal` is only asserted when both operands are finite forms that agree
/// exactly termwise; `Less`/`Greater` are sound whenever returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpResult {
    Less,
    Equal,
    Greater,
    Indeterminate(Undecided),
}

impl CmpResult {
    pub fn is_lt(self) -> bool {
        matches!(self, CmpResult::Less)
    }

    pub fn is_gt(self) -> bool {
        matches!(self, CmpResult::Greater)
    }

    pub fn is_eq(self) -> bool {
        matches!(self, CmpResult::Equal)
    }

    pub fn is_le(self) -> bool {
        matches!(self, CmpResult::Less | CmpResult::Equal)
    }

    pub fn is_ge(self) -> bool {
        matches!(self, CmpResult::Greater | CmpResult::Equal)
    }

    pub fn decided(self) -> bool {
        !matches!(self, CmpResult::Indeterminate(_))
    }

    pub fn reverse(self) -> CmpResult {
        match self {
            CmpResult::Less => CmpResult::Greater,
            CmpResult::Greater => CmpResult::Less,
            other => other,
        }
    }
}
