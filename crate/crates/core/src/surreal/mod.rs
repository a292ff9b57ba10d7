//! Lazy Conway normal forms and exact ordered-field arithmetic.
//!
//! A [`Surreal`] is a memoized, well-ordered stream of [`Term`]s in strictly
//! decreasing exponent order; exponents are themselves surreals. The empty
//! stream is zero. All inspection is budget-driven: forcing a prefix charges
//! work units, coefficient tests are capped at `budget.prec` bits, and
//! hereditary exponent comparisons are capped at `budget.depth`.

mod ops;
mod print;

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::budget::Budget;
use crate::coeff::{rat_from_int, Coeff, Rat};
use crate::error::{CmpResult, KernelError, KResult, Undecided};

pub use ops::SeriesKind;
pub(crate) use ops::{map_exponents, power_series, take_while_terms};

/// One normal-form term `coeff * w^exp`; the coefficient is nonzero.
#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: Coeff,
    pub exp: Surreal,
}

impl Term {
    pub fn new(coeff: Coeff, exp: Surreal) -> Self {
        Term { coeff, exp }
    }
}

/// Forcing context: remaining work units and exponent recursion depth.
pub struct ForceCtx {
    pub budget: Budget,
    work: u64,
    depth: u32,
}

impl ForceCtx {
    pub fn new(b: &Budget) -> Self {
        ForceCtx { budget: *b, work: b.work_units(), depth: b.depth }
    }

    pub(crate) fn charge(&mut self, units: u64) -> KResult<()> {
        if self.work < units {
            return Err(KernelError::BudgetExhausted { forced: 0 });
        }
        self.work -= units;
        Ok(())
    }

    pub(crate) fn descend<T>(
        &mut self,
        f: impl FnOnce(&mut ForceCtx) -> KResult<T>,
    ) -> KResult<T> {
        if self.depth == 0 {
            return Err(KernelError::DepthExhausted);
        }
        self.depth -= 1;
        let out = f(self);
        self.depth += 1;
        out
    }
}

/// A term-stream producer. `next` returns terms in strictly decreasing
/// exponent order and must keep its own state consistent when it fails with a
/// recoverable budget error, so that a later, larger budget can resume.
pub(crate) trait Generator: Send {
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>>;
}

pub(crate) enum Tail {
    Done,
    Gen(Box<dyn Generator>),
}

struct StreamState {
    forced: Vec<Term>,
    tail: Tail,
}

pub(crate) struct Stream {
    state: Mutex<StreamState>,
}

/// A surreal number in the representable fragment.
#[derive(Clone)]
pub struct Surreal {
    stream: Arc<Stream>,
}

impl std::fmt::Debug for Surreal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Render only what is already forced; Debug must not drive evaluation.
        let state = self.stream.state.lock().unwrap();
        let done = matches!(state.tail, Tail::Done);
        write!(f, "Surreal[{} forced{}]", state.forced.len(), if done { "" } else { ", lazy" })
    }
}

/// A forced prefix of a normal form. `complete` means the stream provably
/// ended, so the terms are the exact finite form.
#[derive(Clone, Debug)]
pub struct Prefix {
    pub terms: Vec<Term>,
    pub complete: bool,
}

/// The three-way split of a surreal into purely infinite, real and
/// infinitesimal components.
pub struct Decomposition {
    pub purely_infinite: Surreal,
    pub real: Coeff,
    pub infinitesimal: Surreal,
}

/// Structural key for exact finite forms (memo tables, dedup fast paths).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoeffKey {
    Exact(Rat),
    PiTimes(Rat),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonKey {
    pub terms: Vec<(CoeffKey, CanonKey)>,
}

impl Surreal {
    pub(crate) fn from_state(forced: Vec<Term>, tail: Tail) -> Self {
        Surreal {
            stream: Arc::new(Stream { state: Mutex::new(StreamState { forced, tail }) }),
        }
    }

    /// The exact finite form with the given terms (strictly decreasing
    /// exponents, nonzero coefficients; the caller guarantees both).
    pub fn from_terms(terms: Vec<Term>) -> Self {
        Surreal::from_state(terms, Tail::Done)
    }

    pub(crate) fn from_generator(gen: Box<dyn Generator>) -> Self {
        Surreal::from_state(Vec::new(), Tail::Gen(gen))
    }

    pub fn zero() -> Self {
        Surreal::from_terms(Vec::new())
    }

    pub fn one() -> Self {
        Surreal::from_rat(Rat::from_integer(BigInt::from(1)))
    }

    pub fn from_rat(q: Rat) -> Self {
        if q.is_zero() {
            Surreal::zero()
        } else {
            Surreal::from_terms(vec![Term::new(Coeff::Exact(q), Surreal::zero())])
        }
    }

    pub fn from_int(n: i64) -> Self {
        Surreal::from_rat(rat_from_int(n))
    }

    /// The leader `w^y`.
    pub fn omega_pow(y: Surreal) -> Self {
        Surreal::from_terms(vec![Term::new(Coeff::one(), y)])
    }

    pub fn omega() -> Self {
        Surreal::omega_pow(Surreal::one())
    }

    /// A single-term form `c * w^y`; a zero coefficient gives zero.
    pub fn monomial(coeff: Coeff, exp: Surreal) -> Self {
        if coeff.is_exact_zero() {
            Surreal::zero()
        } else {
            Surreal::from_terms(vec![Term::new(coeff, exp)])
        }
    }

    pub(crate) fn ptr_eq(&self, other: &Surreal) -> bool {
        Arc::ptr_eq(&self.stream, &other.stream)
    }

    /// Force the `i`-th term (0-based). `Ok(None)` means the stream ends
    /// before index `i`.
    pub(crate) fn term(&self, i: usize, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        let mut state = self.stream.state.lock().unwrap();
        loop {
            if i < state.forced.len() {
                return Ok(Some(state.forced[i].clone()));
            }
            match &mut state.tail {
                Tail::Done => return Ok(None),
                Tail::Gen(gen) => {
                    ctx.charge(1)?;
                    match gen.next(ctx)? {
                        Some(t) => state.forced.push(t),
                        None => {
                            state.tail = Tail::Done;
                        }
                    }
                }
            }
        }
    }

    /// Force up to `budget.max_terms` terms.
    pub fn prefix(&self, b: &Budget) -> KResult<Prefix> {
        let mut ctx = ForceCtx::new(b);
        self.prefix_ctx(b.max_terms, &mut ctx)
    }

    pub(crate) fn prefix_ctx(&self, max_terms: usize, ctx: &mut ForceCtx) -> KResult<Prefix> {
        let mut terms = Vec::new();
        for i in 0..max_terms {
            match self.term(i, ctx) {
                Ok(Some(t)) => terms.push(t),
                Ok(None) => return Ok(Prefix { terms, complete: true }),
                Err(KernelError::BudgetExhausted { .. }) => {
                    return Ok(Prefix { terms, complete: false })
                }
                Err(e) => return Err(e),
            }
        }
        // Did the stream end exactly at the cap?
        match self.term(max_terms, ctx) {
            Ok(None) => Ok(Prefix { terms, complete: true }),
            Ok(Some(_)) => Ok(Prefix { terms, complete: false }),
            Err(KernelError::BudgetExhausted { .. }) => Ok(Prefix { terms, complete: false }),
            Err(e) => Err(e),
        }
    }

    /// Exact zero test: true iff the stream provably ends with no terms.
    pub fn is_zero_exact(&self, b: &Budget) -> KResult<bool> {
        let mut ctx = ForceCtx::new(b);
        match self.term(0, &mut ctx) {
            Ok(None) => Ok(true),
            Ok(Some(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Leading term, or an error if none is forcible.
    pub fn leading(&self, b: &Budget) -> KResult<Term> {
        let mut ctx = ForceCtx::new(b);
        match self.term(0, &mut ctx) {
            Ok(Some(t)) => Ok(t),
            Ok(None) => Err(KernelError::ZeroOrIndeterminateLeading { budget: *b }),
            Err(KernelError::BudgetExhausted { .. }) => {
                Err(KernelError::ZeroOrIndeterminateLeading { budget: *b })
            }
            Err(e) => Err(e),
        }
    }

    /// The valuation: the leading exponent.
    pub fn valuation(&self, b: &Budget) -> KResult<Surreal> {
        Ok(self.leading(b)?.exp)
    }

    /// Compare two surreals under a budget. Sound when decided; `Equal` is
    /// only produced when the difference stream provably vanishes.
    pub fn compare(&self, other: &Surreal, b: &Budget) -> CmpResult {
        if self.ptr_eq(other) {
            return CmpResult::Equal;
        }
        let mut ctx = ForceCtx::new(b);
        match compare_ctx(self, other, &mut ctx) {
            Ok(c) => c,
            Err(e) => CmpResult::Indeterminate(undecided_from(&e)),
        }
    }

    /// Sign of the value: compare against zero.
    pub fn sign(&self, b: &Budget) -> CmpResult {
        self.compare(&Surreal::zero(), b)
    }

    /// Split into purely infinite, real, and infinitesimal components. The
    /// scan forces positive-exponent terms; it fails if they do not fit the
    /// budget or an exponent sign is undecided.
    pub fn decompose(&self, b: &Budget) -> KResult<Decomposition> {
        let mut ctx = ForceCtx::new(b);
        let zero = Surreal::zero();
        let mut infinite_terms = Vec::new();
        let mut real = Coeff::zero();
        let mut split_at = None;
        for i in 0..=b.max_terms {
            match self.term(i, &mut ctx)? {
                None => {
                    split_at = Some(i);
                    break;
                }
                Some(t) => {
                    let sign = ctx.descend(|ctx| compare_ctx(&t.exp, &zero, ctx))?;
                    match sign {
                        CmpResult::Greater => infinite_terms.push(t),
                        CmpResult::Equal => {
                            real = t.coeff.clone();
                            split_at = Some(i + 1);
                            break;
                        }
                        CmpResult::Less => {
                            split_at = Some(i);
                            break;
                        }
                        CmpResult::Indeterminate(_) => {
                            return Err(KernelError::IndeterminateExponent {
                                context: "decomposing into components",
                            })
                        }
                    }
                }
            }
        }
        let split = split_at.ok_or(KernelError::BudgetExhausted { forced: b.max_terms })?;
        Ok(Decomposition {
            purely_infinite: Surreal::from_terms(infinite_terms),
            real,
            infinitesimal: ops::skip_terms(self.clone(), split),
        })
    }

    /// Keep exactly the terms with exponent strictly greater than `e` (lazy).
    pub fn truncate_before(&self, e: &Surreal) -> Surreal {
        ops::filter_above(self.clone(), e.clone())
    }

    /// Is `self` a truncation (initial segment) of `other`?
    pub fn is_truncation(&self, other: &Surreal, b: &Budget) -> KResult<bool> {
        if self.ptr_eq(other) {
            return Ok(true);
        }
        let mut ctx = ForceCtx::new(b);
        for i in 0..=b.max_terms {
            let mine = self.term(i, &mut ctx)?;
            match mine {
                None => return Ok(true),
                Some(t) => {
                    let theirs = other.term(i, &mut ctx)?;
                    match theirs {
                        None => return Ok(false),
                        Some(u) => {
                            if !t.coeff.exact_eq(&u.coeff) {
                                return Ok(false);
                            }
                            let same =
                                ctx.descend(|ctx| compare_ctx(&t.exp, &u.exp, ctx))?;
                            if same != CmpResult::Equal {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        Err(KernelError::BudgetExhausted { forced: b.max_terms })
    }

    pub fn is_purely_infinite(&self, b: &Budget) -> KResult<bool> {
        let mut ctx = ForceCtx::new(b);
        let zero = Surreal::zero();
        for i in 0..=b.max_terms {
            match self.term(i, &mut ctx)? {
                None => return Ok(true),
                Some(t) => {
                    match ctx.descend(|ctx| compare_ctx(&t.exp, &zero, ctx))? {
                        CmpResult::Greater => continue,
                        CmpResult::Less | CmpResult::Equal => return Ok(false),
                        CmpResult::Indeterminate(_) => {
                            return Err(KernelError::IndeterminateExponent {
                                context: "testing purely infinite",
                            })
                        }
                    }
                }
            }
        }
        Err(KernelError::BudgetExhausted { forced: b.max_terms })
    }

    pub fn is_infinitesimal(&self, b: &Budget) -> KResult<bool> {
        let mut ctx = ForceCtx::new(b);
        match self.term(0, &mut ctx)? {
            None => Ok(true),
            Some(t) => {
                let zero = Surreal::zero();
                match ctx.descend(|ctx| compare_ctx(&t.exp, &zero, ctx))? {
                    CmpResult::Less => Ok(true),
                    CmpResult::Greater | CmpResult::Equal => Ok(false),
                    CmpResult::Indeterminate(_) => Err(KernelError::IndeterminateExponent {
                        context: "testing infinitesimal",
                    }),
                }
            }
        }
    }

    pub fn is_finite(&self, b: &Budget) -> KResult<bool> {
        let mut ctx = ForceCtx::new(b);
        match self.term(0, &mut ctx)? {
            None => Ok(true),
            Some(t) => {
                let zero = Surreal::zero();
                match ctx.descend(|ctx| compare_ctx(&t.exp, &zero, ctx))? {
                    CmpResult::Less | CmpResult::Equal => Ok(true),
                    CmpResult::Greater => Ok(false),
                    CmpResult::Indeterminate(_) => Err(KernelError::IndeterminateExponent {
                        context: "testing finiteness",
                    }),
                }
            }
        }
    }

    pub fn is_positive_infinite(&self, b: &Budget) -> KResult<bool> {
        let mut ctx = ForceCtx::new(b);
        match self.term(0, &mut ctx)? {
            None => Ok(false),
            Some(t) => {
                let zero = Surreal::zero();
                let exp_sign = ctx.descend(|ctx| compare_ctx(&t.exp, &zero, ctx))?;
                if exp_sign != CmpResult::Greater {
                    return Ok(matches!(exp_sign, CmpResult::Indeterminate(_)))
                        .and_then(|ind: bool| {
                            if ind {
                                Err(KernelError::IndeterminateExponent {
                                    context: "testing positive infinite",
                                })
                            } else {
                                Ok(false)
                            }
                        });
                }
                match t.coeff.sign(ctx.budget.prec) {
                    Some(std::cmp::Ordering::Greater) => Ok(true),
                    Some(_) => Ok(false),
                    None => Err(KernelError::IndeterminateCoeff {
                        prec: ctx.budget.prec,
                        context: "testing positive infinite",
                    }),
                }
            }
        }
    }

    /// Structural key of the exact finite form, if the stream ends within an
    /// internal budget and all coefficients are exact.
    pub fn canonical_key(&self, b: &Budget) -> KResult<CanonKey> {
        let mut ctx = ForceCtx::new(b);
        canonical_key_ctx(self, &mut ctx)
    }

    /// Exact rational value, if this is a pure real finite form.
    pub fn to_rat(&self, b: &Budget) -> Option<Rat> {
        let p = self.prefix(b).ok()?;
        if !p.complete {
            return None;
        }
        match p.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let t = &p.terms[0];
                if !t.exp.is_zero_exact(b).ok()? {
                    return None;
                }
                t.coeff.as_exact().cloned()
            }
            _ => None,
        }
    }
}

fn canonical_key_ctx(x: &Surreal, ctx: &mut ForceCtx) -> KResult<CanonKey> {
    let mut terms = Vec::new();
    for i in 0.. {
        match x.term(i, ctx)? {
            None => break,
            Some(t) => {
                let ck = match &t.coeff {
                    Coeff::Exact(q) => CoeffKey::Exact(q.clone()),
                    Coeff::PiTimes(q) => CoeffKey::PiTimes(q.clone()),
                    Coeff::Refinable(_) => {
                        return Err(KernelError::Unsupported(
                            "refinable coefficients have no canonical key",
                        ))
                    }
                };
                let ek = ctx.descend(|ctx| canonical_key_ctx(&t.exp, ctx))?;
                terms.push((ck, ek));
            }
        }
    }
    Ok(CanonKey { terms })
}

fn undecided_from(e: &KernelError) -> Undecided {
    match e {
        KernelError::IndeterminateCoeff { .. } => Undecided::Coeff,
        KernelError::DepthExhausted => Undecided::Depth,
        _ => Undecided::Terms,
    }
}

/// Core comparison: scan the difference stream for the first term whose
/// coefficient sign is decided. Work and depth exhaustion propagate as
/// errors (the caller may retry with a larger budget); only a genuine
/// precision-capped coefficient ambiguity is returned in-band.
pub(crate) fn compare_ctx(x: &Surreal, y: &Surreal, ctx: &mut ForceCtx) -> KResult<CmpResult> {
    if x.ptr_eq(y) {
        return Ok(CmpResult::Equal);
    }
    let diff = ops::sub(x, y);
    match diff.term(0, ctx)? {
        None => Ok(CmpResult::Equal),
        Some(t) => match t.coeff.sign(ctx.budget.prec) {
            Some(std::cmp::Ordering::Greater) => Ok(CmpResult::Greater),
            Some(std::cmp::Ordering::Less) => Ok(CmpResult::Less),
            Some(std::cmp::Ordering::Equal) => Err(KernelError::IndeterminateCoeff {
                prec: ctx.budget.prec,
                context: "zero coefficient escaped a merge",
            }),
            None => Ok(CmpResult::Indeterminate(Undecided::Coeff)),
        },
    }
}

/// Compare a surreal against an exact rational without allocating it.
pub fn compare_with_rat(x: &Surreal, q: &Rat, b: &Budget) -> CmpResult {
    x.compare(&Surreal::from_rat(q.clone()), b)
}
