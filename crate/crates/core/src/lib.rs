//! Exact, budget-aware kernel for a computable fragment of the surreal numbers.
//!
//! The kernel represents surreals as lazy normal forms: well-ordered streams of
//! `coefficient * w^exponent` terms with strictly decreasing surreal exponents,
//! where `w` denotes the first infinite ordinal. Coefficients are exact
//! rationals, exact rational multiples of pi, or refinable reals (nested
//! rational intervals). Every inspection of a lazy value is driven by an
//! explicit [`Budget`]; answers are either exact, or `Indeterminate` with the
//! budget recorded, never silently wrong.
//!
//! Module map:
//! - [`coeff`]: exact rationals and refinable (computable) reals.
//! - [`surreal`]: lazy normal forms and ordered-field arithmetic.
//! - [`simplicity`]: sign expansions, ordinal arithmetic, simplest-in-cut.
//! - [`exp_log`]: exponential and logarithm, the h-map and its inverse.
//! - [`embeddings`]: developments, paths, subspace closures, tower generation.
//! - [`trig`]: canonical sine/cosine and the exponential on the complexification.

pub mod budget;
pub mod coeff;
pub mod embeddings;
pub mod error;
pub mod exp_log;
pub mod simplicity;
pub mod surreal;
pub mod trig;

pub use budget::Budget;
pub use coeff::{Coeff, RReal, Rat};
pub use error::{CmpResult, KernelError};
pub use surreal::{Surreal, Term};
