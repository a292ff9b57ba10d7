//! Forcing budgets.

/// Work limits for inspecting lazy values.
///
/// `max_terms` bounds how many stream elements may be forced, `prec` is the
/// coefficient precision in bits, and `depth` caps hereditary recursion into
/// exponents. Enlarging any component never changes an answer that was
/// already decided, it can only turn `Indeterminate` into a decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Stream elements forcible per query.
    pub max_terms: usize,
    /// Coefficient precision in bits.
    pub prec: u32,
    /// Hereditary recursion depth on exponents.
    pub depth: u32,
}

impl Budget {
    pub fn new(max_terms: usize, prec: u32, depth: u32) -> Self {
        assert!(max_terms >= 1 && prec >= 1 && depth >= 1, "budget components must be >= 1");
        Budget { max_terms, prec, depth }
    }

    /// Session default: 12 terms, 64 bits, depth 16.
    pub fn default_budget() -> Self {
        Budget { max_terms: 12, prec: 64, depth: 16 }
    }

    /// A roomier budget for tests and internal oracles.
    pub fn generous() -> Self {
        Budget { max_terms: 48, prec: 128, depth: 32 }
    }

    pub fn with_terms(self, max_terms: usize) -> Self {
        Budget { max_terms, ..self }
    }

    pub fn with_depth(self, depth: u32) -> Self {
        Budget { depth, ..self }
    }

    /// Raw work units available to one forcing session: each pull of an input
    /// term, coefficient refinement or exponent comparison charges one unit.
    pub(crate) fn work_units(&self) -> u64 {
        1024 + 256 * self.max_terms as u64
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::default_budget()
    }
}
