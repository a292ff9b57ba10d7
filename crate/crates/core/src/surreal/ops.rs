//! Arithmetic on lazy term streams: merge, convolution, inversion, and the
//! formal series used by the exponential and logarithm.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::coeff::{rat_from_int, Coeff, Rat};
use crate::error::{CmpResult, KernelError, KResult};

use super::{compare_ctx, ForceCtx, Generator, Surreal, Term};

impl Surreal {
    pub fn neg(&self) -> Surreal {
        self.scale(&Coeff::from_int(-1))
    }

    /// Scale every coefficient by `c`; a zero scalar gives zero.
    pub fn scale(&self, c: &Coeff) -> Surreal {
        if c.is_exact_zero() {
            return Surreal::zero();
        }
        if c.is_exact_one() {
            return self.clone();
        }
        Surreal::from_generator(Box::new(MapCoeff { src: self.clone(), i: 0, factor: c.clone() }))
    }

    /// Divide every coefficient by a nonzero `c`. Division goes through
    /// [`Coeff::div`] termwise, so a pi-multiple divided by a pi-multiple
    /// stays exact.
    pub fn scale_div(&self, c: &Coeff) -> KResult<Surreal> {
        if c.is_exact_zero() {
            return Err(KernelError::DivisionByZero);
        }
        if c.is_exact_one() {
            return Ok(self.clone());
        }
        let divisor = c.clone();
        Ok(Surreal::from_generator(Box::new(DivCoeff { src: self.clone(), i: 0, divisor })))
    }

    pub fn add(&self, other: &Surreal) -> Surreal {
        Surreal::from_generator(Box::new(Merge::new(self.clone(), other.clone())))
    }

    pub fn sub(&self, other: &Surreal) -> Surreal {
        self.add(&other.neg())
    }

    /// Multiply by the monomial `c * w^shift`.
    pub fn monomial_mul(&self, c: &Coeff, shift: &Surreal) -> Surreal {
        if c.is_exact_zero() {
            return Surreal::zero();
        }
        Surreal::from_generator(Box::new(MonomialMul {
            src: self.clone(),
            i: 0,
            factor: c.clone(),
            shift: shift.clone(),
        }))
    }

    pub fn mul(&self, other: &Surreal) -> Surreal {
        Surreal::from_generator(Box::new(Convolve::new(self.clone(), other.clone())))
    }

    /// The lazy suffix starting at term `n`.
    pub fn tail_from(&self, n: usize) -> Surreal {
        skip_terms(self.clone(), n)
    }

    pub fn pow_u32(&self, n: u32) -> Surreal {
        match n {
            0 => Surreal::one(),
            _ => {
                let mut acc = self.clone();
                for _ in 1..n {
                    acc = acc.mul(self);
                }
                acc
            }
        }
    }

    /// Multiplicative inverse via the leading monomial and geometric series:
    /// with `x = r w^g (1 + eps)`, `1/x = (1/r) w^(-g) * sum (-eps)^k`.
    pub fn inv(&self, b: &crate::budget::Budget) -> KResult<Surreal> {
        let lead = self.leading(b).map_err(|e| match e {
            KernelError::ZeroOrIndeterminateLeading { budget } => {
                KernelError::ZeroOrIndeterminateLeading { budget }
            }
            other => other,
        })?;
        let r_inv = lead.coeff.inv()?;
        let neg_g = lead.exp.neg();
        // eps = tail(x) * (1/r) * w^(-g), exponents strictly below zero.
        let tail = skip_terms(self.clone(), 1);
        let eps = tail.monomial_mul(&r_inv, &neg_g);
        let series = power_series(eps, SeriesKind::Geometric);
        Ok(series.monomial_mul(&r_inv, &neg_g))
    }
}

pub(crate) fn sub(x: &Surreal, y: &Surreal) -> Surreal {
    x.sub(y)
}

/// Drop the first `n` terms (lazy suffix).
pub(crate) fn skip_terms(src: Surreal, n: usize) -> Surreal {
    Surreal::from_generator(Box::new(Skip { src, i: n }))
}

/// Keep exactly the terms with exponent strictly above `threshold`.
pub(crate) fn filter_above(src: Surreal, threshold: Surreal) -> Surreal {
    Surreal::from_generator(Box::new(TakeWhileAbove { src, i: 0, threshold, done: false }))
}

struct MapCoeff {
    src: Surreal,
    i: usize,
    factor: Coeff,
}

impl Generator for MapCoeff {
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        match self.src.term(self.i, ctx)? {
            None => Ok(None),
            Some(t) => {
                self.i += 1;
                Ok(Some(Term::new(self.factor.mul(&t.coeff), t.exp)))
            }
        }
    }
}

struct DivCoeff {
    src: Surreal,
    i: usize,
    divisor: Coeff,
}

impl Generator for DivCoeff {
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        match self.src.term(self.i, ctx)? {
            None => Ok(None),
            Some(t) => {
                self.i += 1;
                Ok(Some(Term::new(t.coeff.div(&self.divisor)?, t.exp)))
            }
        }
    }
}

struct MonomialMul {
    src: Surreal,
    i: usize,
    factor: Coeff,
    shift: Surreal,
}

impl Generator for MonomialMul {
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        match self.src.term(self.i, ctx)? {
            None => Ok(None),
            Some(t) => {
                self.i += 1;
                Ok(Some(Term::new(self.factor.mul(&t.coeff), t.exp.add(&self.shift))))
            }
        }
    }
}

struct Skip {
    src: Surreal,
    i: usize,
}

impl Generator for Skip {
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        match self.src.term(self.i, ctx)? {
            None => Ok(None),
            Some(t) => {
                self.i += 1;
                Ok(Some(t))
            }
        }
    }
}

struct TakeWhileAbove {
    src: Surreal,
    i: usize,
    threshold: Surreal,
    done: bool,
}

impl Generator for TakeWhileAbove {
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        if self.done {
            return Ok(None);
        }
        match self.src.term(self.i, ctx)? {
            None => {
                self.done = true;
                Ok(None)
            }
            Some(t) => {
                let cmp = ctx.descend(|ctx| compare_ctx(&t.exp, &self.threshold, ctx))?;
                match cmp {
                    CmpResult::Greater => {
                        self.i += 1;
                        Ok(Some(t))
                    }
                    CmpResult::Less | CmpResult::Equal => {
                        self.done = true;
                        Ok(None)
                    }
                    CmpResult::Indeterminate(_) => Err(KernelError::IndeterminateExponent {
                        context: "truncating before an exponent",
                    }),
                }
            }
        }
    }
}

/// Two-way merge with exact cancellation of equal-exponent terms.
struct Merge {
    a: Surreal,
    b: Surreal,
    ia: usize,
    ib: usize,
    peek_a: Option<Option<Term>>,
    peek_b: Option<Option<Term>>,
}

impl Merge {
    fn new(a: Surreal, b: Surreal) -> Self {
        Merge { a, b, ia: 0, ib: 0, peek_a: None, peek_b: None }
    }
}

impl Generator for Merge {
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        loop {
            if self.peek_a.is_none() {
                self.peek_a = Some(self.a.term(self.ia, ctx)?);
            }
            if self.peek_b.is_none() {
                self.peek_b = Some(self.b.term(self.ib, ctx)?);
            }
            let ta = self.peek_a.as_ref().unwrap().clone();
            let tb = self.peek_b.as_ref().unwrap().clone();
            match (ta, tb) {
                (None, None) => return Ok(None),
                (Some(t), None) => {
                    self.ia += 1;
                    self.peek_a = None;
                    return Ok(Some(t));
                }
                (None, Some(t)) => {
                    self.ib += 1;
                    self.peek_b = None;
                    return Ok(Some(t));
                }
                (Some(ta), Some(tb)) => {
                    let cmp = ctx.descend(|ctx| compare_ctx(&ta.exp, &tb.exp, ctx))?;
                    match cmp {
                        CmpResult::Greater => {
                            self.ia += 1;
                            self.peek_a = None;
                            return Ok(Some(ta));
                        }
                        CmpResult::Less => {
                            self.ib += 1;
                            self.peek_b = None;
                            return Ok(Some(tb));
                        }
                        CmpResult::Equal => {
                            self.ia += 1;
                            self.ib += 1;
                            self.peek_a = None;
                            self.peek_b = None;
                            let sum = ta.coeff.add(&tb.coeff);
                            match nonzero_or_skip(sum, ctx)? {
                                Some(c) => return Ok(Some(Term::new(c, ta.exp))),
                                None => continue,
                            }
                        }
                        CmpResult::Indeterminate(_) => {
                            return Err(KernelError::IndeterminateExponent {
                                context: "merging term streams",
                            })
                        }
                    }
                }
            }
        }
    }
}

/// Decide whether a merged coefficient is nonzero: exact zeros are dropped,
/// refinable sums must witness a sign within the budget precision or the
/// stream fails loudly.
fn nonzero_or_skip(c: Coeff, ctx: &mut ForceCtx) -> KResult<Option<Coeff>> {
    if c.is_exact_zero() {
        return Ok(None);
    }
    match &c {
        Coeff::Exact(_) | Coeff::PiTimes(_) => Ok(Some(c)),
        Coeff::Refinable(r) => {
            ctx.charge(1)?;
            match r.sign_witness(ctx.budget.prec) {
                Some(_) => Ok(Some(c)),
                None => Err(KernelError::IndeterminateCoeff {
                    prec: ctx.budget.prec,
                    context: "possible zero coefficient in a merge",
                }),
            }
        }
    }
}

/// Frontier entry for Hahn convolution.
struct Cell {
    i: usize,
    j: usize,
    exp: Surreal,
    coeff: Coeff,
}

/// Lazy Hahn convolution. The frontier enumerates index pairs so that the
/// maximal remaining exponent is always present; pairs reach the frontier by
/// a unique path, so no cell is counted twice.
struct Convolve {
    a: Surreal,
    b: Surreal,
    frontier: Vec<Cell>,
    seeded: bool,
}

impl Convolve {
    fn new(a: Surreal, b: Surreal) -> Self {
        Convolve { a, b, frontier: Vec::new(), seeded: false }
    }

    fn make_cell(&self, i: usize, j: usize, ctx: &mut ForceCtx) -> KResult<Option<Cell>> {
        let ta = match self.a.term(i, ctx)? {
            Some(t) => t,
            None => return Ok(None),
        };
        let tb = match self.b.term(j, ctx)? {
            Some(t) => t,
            None => return Ok(None),
        };
        Ok(Some(Cell {
            i,
            j,
            exp: ta.exp.add(&tb.exp),
            coeff: ta.coeff.mul(&tb.coeff),
        }))
    }
}

impl Generator for Convolve {
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        if !self.seeded {
            if let Some(cell) = self.make_cell(0, 0, ctx)? {
                self.frontier.push(cell);
            }
            self.seeded = true;
        }
        loop {
            if self.frontier.is_empty() {
                return Ok(None);
            }
            // Find the maximal exponent on the frontier.
            let mut max_idx = vec![0usize];
            for k in 1..self.frontier.len() {
                let cmp = ctx.descend(|ctx| {
                    compare_ctx(&self.frontier[k].exp, &self.frontier[max_idx[0]].exp, ctx)
                })?;
                match cmp {
                    CmpResult::Greater => max_idx = vec![k],
                    CmpResult::Equal => max_idx.push(k),
                    CmpResult::Less => {}
                    CmpResult::Indeterminate(_) => {
                        return Err(KernelError::IndeterminateExponent {
                            context: "ordering convolution exponents",
                        })
                    }
                }
            }
            // Pop the maximal cells (descending positions to keep indices valid).
            max_idx.sort_unstable();
            let mut popped = Vec::new();
            for &k in max_idx.iter().rev() {
                popped.push(self.frontier.swap_remove(k));
            }
            let exp = popped[0].exp.clone();
            let mut coeff = popped[0].coeff.clone();
            for cell in &popped[1..] {
                coeff = coeff.add(&cell.coeff);
            }
            // Successors: (i, j+1) always; (i+1, j) only from the j == 0 column.
            for cell in &popped {
                if let Some(next) = self.make_cell(cell.i, cell.j + 1, ctx)? {
                    self.frontier.push(next);
                }
                if cell.j == 0 {
                    if let Some(next) = self.make_cell(cell.i + 1, 0, ctx)? {
                        self.frontier.push(next);
                    }
                }
            }
            match nonzero_or_skip(coeff, ctx)? {
                Some(c) => return Ok(Some(Term::new(c, exp))),
                None => continue,
            }
        }
    }
}

/// Formal power series in an infinitesimal base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// `sum_{k>=0} x^k / k!` — the exponential of an infinitesimal.
    ExpTaylor,
    /// `sum_{k>=1} (-1)^(k-1) x^k / k` — `log(1+x)` for infinitesimal `x`.
    Log1p,
    /// `sum_{k>=0} (-x)^k` — geometric series used by inversion.
    Geometric,
    /// `sum_{k>=0} (-1)^k x^(2k+1) / (2k+1)!` — sine of an infinitesimal.
    SinTaylor,
    /// `sum_{k>=0} (-1)^k x^(2k) / (2k)!` — cosine of an infinitesimal.
    CosTaylor,
}

impl SeriesKind {
    /// Coefficient of `x^k`.
    fn coefficient(self, k: u64) -> Rat {
        match self {
            SeriesKind::ExpTaylor => Rat::new(BigInt::one(), factorial(k)),
            SeriesKind::Log1p => {
                if k == 0 {
                    Rat::from_integer(BigInt::from(0))
                } else {
                    let sign = if k % 2 == 1 { 1 } else { -1 };
                    Rat::new(BigInt::from(sign), BigInt::from(k))
                }
            }
            SeriesKind::Geometric => {
                Rat::from_integer(BigInt::from(if k % 2 == 0 { 1 } else { -1 }))
            }
            SeriesKind::SinTaylor => {
                if k % 2 == 0 {
                    Rat::from_integer(BigInt::from(0))
                } else {
                    let sign = if k % 4 == 1 { 1 } else { -1 };
                    Rat::new(BigInt::from(sign), factorial(k))
                }
            }
            SeriesKind::CosTaylor => {
                if k % 2 == 1 {
                    Rat::from_integer(BigInt::from(0))
                } else {
                    let sign = if k % 4 == 0 { 1 } else { -1 };
                    Rat::new(BigInt::from(sign), factorial(k))
                }
            }
        }
    }
}

fn factorial(k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

/// Build `sum_k c_k base^k` as a lazy stream. The base must be infinitesimal
/// (every exponent negative); the caller enforces that precondition.
pub(crate) fn power_series(base: Surreal, kind: SeriesKind) -> Surreal {
    Surreal::from_generator(Box::new(SeriesSum {
        base,
        kind,
        powers: Vec::new(),
        entries: Vec::new(),
        admitted: 0,
        base_valuation: None,
        base_empty: None,
    }))
}

struct SeriesEntry {
    stream_idx: usize,
    term_idx: usize,
    exp: Surreal,
    coeff: Coeff, // series coefficient folded in already
}

/// Merges the streams `c_k * base^k`. Streams are admitted on demand: before
/// emitting at exponent `E`, every unadmitted stream whose valuation could
/// reach `E` is brought in. Valuations `k * v(base)` strictly decrease, so
/// only finitely many admissions precede each emission.
struct SeriesSum {
    base: Surreal,
    kind: SeriesKind,
    powers: Vec<Surreal>,
    entries: Vec<SeriesEntry>,
    admitted: u64,
    base_valuation: Option<Surreal>,
    base_empty: Option<bool>,
}

impl SeriesSum {
    fn power(&mut self, k: usize) -> Surreal {
        while self.powers.len() <= k {
            let next = match self.powers.len() {
                0 => Surreal::one(),
                n => self.powers[n - 1].mul(&self.base),
            };
            self.powers.push(next);
        }
        self.powers[k].clone()
    }

    fn admit_next(&mut self, ctx: &mut ForceCtx) -> KResult<()> {
        let k = self.admitted;
        self.admitted += 1;
        let coeff = self.kind.coefficient(k);
        if coeff.is_zero() {
            return Ok(());
        }
        let stream = self.power(k as usize);
        if let Some(t) = stream.term(0, ctx)? {
            self.entries.push(SeriesEntry {
                stream_idx: k as usize,
                term_idx: 0,
                exp: t.exp.clone(),
                coeff: Coeff::Exact(coeff).mul(&t.coeff),
            });
        }
        Ok(())
    }

    /// Valuation of the next unadmitted stream: `admitted * v(base)`.
    fn next_valuation(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Surreal>> {
        if self.base_empty == Some(true) {
            return Ok(None);
        }
        if self.base_valuation.is_none() {
            match self.base.term(0, ctx)? {
                None => {
                    self.base_empty = Some(true);
                    return Ok(None);
                }
                Some(t) => {
                    self.base_empty = Some(false);
                    self.base_valuation = Some(t.exp);
                }
            }
        }
        let v = self.base_valuation.as_ref().unwrap();
        let k = rat_from_int(self.admitted as i64);
        Ok(Some(v.scale(&Coeff::Exact(k))))
    }
}

impl Generator for SeriesSum {
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        // First call: admit the k = 0 term and discover whether the base is zero.
        if self.admitted == 0 {
            self.admit_next(ctx)?;
            if let Some(v) = self.next_valuation(ctx)? {
                let _ = v;
            } else {
                // Zero base: the series is the single constant term (if any).
                let entry = self.entries.pop();
                return Ok(entry.map(|e| Term::new(e.coeff, e.exp)));
            }
        }
        loop {
            // Candidate exponent from admitted streams.
            let mut max_idx: Vec<usize> = Vec::new();
            for k in 0..self.entries.len() {
                if max_idx.is_empty() {
                    max_idx.push(k);
                    continue;
                }
                let cmp = ctx.descend(|ctx| {
                    compare_ctx(&self.entries[k].exp, &self.entries[max_idx[0]].exp, ctx)
                })?;
                match cmp {
                    CmpResult::Greater => max_idx = vec![k],
                    CmpResult::Equal => max_idx.push(k),
                    CmpResult::Less => {}
                    CmpResult::Indeterminate(_) => {
                        return Err(KernelError::IndeterminateExponent {
                            context: "ordering series exponents",
                        })
                    }
                }
            }
            // Admit further streams until they provably start below the candidate.
            if self.base_empty != Some(true) {
                let admit = match self.next_valuation(ctx)? {
                    None => false,
                    Some(v) => {
                        if max_idx.is_empty() {
                            true
                        } else {
                            let cand = &self.entries[max_idx[0]].exp;
                            let cmp = ctx.descend(|ctx| compare_ctx(&v, cand, ctx))?;
                            match cmp {
                                CmpResult::Greater | CmpResult::Equal => true,
                                CmpResult::Less => false,
                                CmpResult::Indeterminate(_) => {
                                    return Err(KernelError::IndeterminateExponent {
                                        context: "admitting a series stream",
                                    })
                                }
                            }
                        }
                    }
                };
                if admit {
                    self.admit_next(ctx)?;
                    continue;
                }
            }
            if max_idx.is_empty() {
                return Ok(None);
            }
            // Pop the maximal entries and merge their coefficients.
            max_idx.sort_unstable();
            let mut popped = Vec::new();
            for &k in max_idx.iter().rev() {
                popped.push(self.entries.swap_remove(k));
            }
            let exp = popped[0].exp.clone();
            let mut coeff = popped[0].coeff.clone();
            for e in &popped[1..] {
                coeff = coeff.add(&e.coeff);
            }
            // Advance each popped stream.
            for e in &popped {
                let stream = self.power(e.stream_idx);
                let series_coeff = self.kind.coefficient(e.stream_idx as u64);
                if let Some(t) = stream.term(e.term_idx + 1, ctx)? {
                    self.entries.push(SeriesEntry {
                        stream_idx: e.stream_idx,
                        term_idx: e.term_idx + 1,
                        exp: t.exp.clone(),
                        coeff: Coeff::Exact(series_coeff).mul(&t.coeff),
                    });
                }
            }
            match nonzero_or_skip(coeff, ctx)? {
                Some(c) => return Ok(Some(Term::new(c, exp))),
                None => continue,
            }
        }
    }
}

/// The longest prefix of `src` whose terms satisfy `pred` (lazy; stops at the
/// first failing term).
pub(crate) fn take_while_terms<P>(src: Surreal, pred: P) -> Surreal
where
    P: FnMut(&Term, &mut ForceCtx) -> KResult<bool> + Send + 'static,
{
    Surreal::from_generator(Box::new(TakeWhile { src, i: 0, pred, done: false }))
}

struct TakeWhile<P> {
    src: Surreal,
    i: usize,
    pred: P,
    done: bool,
}

impl<P> Generator for TakeWhile<P>
where
    P: FnMut(&Term, &mut ForceCtx) -> KResult<bool> + Send + 'static,
{
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        if self.done {
            return Ok(None);
        }
        match self.src.term(self.i, ctx)? {
            None => {
                self.done = true;
                Ok(None)
            }
            Some(t) => {
                if (self.pred)(&t, ctx)? {
                    self.i += 1;
                    Ok(Some(t))
                } else {
                    self.done = true;
                    Ok(None)
                }
            }
        }
    }
}

/// Map every exponent through a strictly increasing function, preserving
/// coefficients. Used for the termwise h and g maps on leader exponents.
pub(crate) fn map_exponents<F>(src: Surreal, f: F) -> Surreal
where
    F: FnMut(&Surreal, &mut ForceCtx) -> KResult<Surreal> + Send + 'static,
{
    Surreal::from_generator(Box::new(MapExp { src, i: 0, f }))
}

struct MapExp<F> {
    src: Surreal,
    i: usize,
    f: F,
}

impl<F> Generator for MapExp<F>
where
    F: FnMut(&Surreal, &mut ForceCtx) -> KResult<Surreal> + Send + 'static,
{
    fn next(&mut self, ctx: &mut ForceCtx) -> KResult<Option<Term>> {
        match self.src.term(self.i, ctx)? {
            None => Ok(None),
            Some(t) => {
                let mapped = (self.f)(&t.exp, ctx)?;
                self.i += 1;
                Ok(Some(Term::new(t.coeff, mapped)))
            }
        }
    }
}
