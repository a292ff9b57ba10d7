//! Simplicity-tree machinery: Cantor normal forms, run-length sign
//! expansions, the simplest-element-in-a-cut solver, and the omnific-integer
//! membership rule.

mod cut;
mod signexp;

use num_traits::Signed;

use crate::budget::Budget;
use crate::coeff::{rat_from_int, rat_is_dyadic, rat_is_integer, Rat};
use crate::error::{CmpResult, KernelError, KResult};
use crate::surreal::{ForceCtx, Surreal};

pub use cut::{simplest_in_cut, CutSpec};
pub use signexp::{sign_expansion, surreal_birthday};

/// Ordinals below epsilon_0 in Cantor normal form: a finite list of
/// (exponent, count) pairs with strictly decreasing exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrdinalCNF {
    terms: Vec<(OrdinalCNF, u64)>,
}

impl OrdinalCNF {
    pub fn zero() -> Self {
        OrdinalCNF { terms: Vec::new() }
    }

    pub fn from_u64(n: u64) -> Self {
        if n == 0 {
            OrdinalCNF::zero()
        } else {
            OrdinalCNF { terms: vec![(OrdinalCNF::zero(), n)] }
        }
    }

    pub fn omega() -> Self {
        OrdinalCNF { terms: vec![(OrdinalCNF::from_u64(1), 1)] }
    }

    /// `w^exp * count`.
    pub fn power(exp: OrdinalCNF, count: u64) -> Self {
        if count == 0 {
            OrdinalCNF::zero()
        } else {
            OrdinalCNF { terms: vec![(exp, count)] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self.terms.len() {
            0 => Some(0),
            1 if self.terms[0].0.is_zero() => Some(self.terms[0].1),
            _ => None,
        }
    }

    pub fn terms(&self) -> &[(OrdinalCNF, u64)] {
        &self.terms
    }

    pub fn compare(&self, other: &OrdinalCNF) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.compare(&b.0) {
                Ordering::Equal => match a.1.cmp(&b.1) {
                    Ordering::Equal => continue,
                    other => return other,
                },
                other => return other,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }

    /// Ordinal addition (non-commutative, left absorption).
    pub fn add(&self, other: &OrdinalCNF) -> OrdinalCNF {
        if other.is_zero() {
            return self.clone();
        }
        let lead = &other.terms[0].0;
        let mut out = Vec::new();
        for (e, c) in &self.terms {
            match e.compare(lead) {
                std::cmp::Ordering::Greater => out.push((e.clone(), *c)),
                std::cmp::Ordering::Equal => {
                    out.push((e.clone(), c + other.terms[0].1));
                    out.extend(other.terms[1..].iter().cloned());
                    return OrdinalCNF { terms: out };
                }
                std::cmp::Ordering::Less => break,
            }
        }
        out.extend(other.terms.iter().cloned());
        OrdinalCNF { terms: out }
    }

    /// Ordinal multiplication.
    pub fn mul(&self, other: &OrdinalCNF) -> OrdinalCNF {
        if self.is_zero() || other.is_zero() {
            return OrdinalCNF::zero();
        }
        let mut acc = OrdinalCNF::zero();
        for (f, c) in &other.terms {
            let part = if f.is_zero() {
                // a * n = w^e0*(c0*n) + tail
                let mut terms = self.terms.clone();
                terms[0].1 *= c;
                OrdinalCNF { terms }
            } else {
                OrdinalCNF::power(self.terms[0].0.add(f), *c)
            };
            acc = acc.add(&part);
        }
        acc
    }

    /// Predecessor of a successor ordinal; `None` for limits and zero.
    pub fn predecessor(&self) -> Option<OrdinalCNF> {
        let last = self.terms.last()?;
        if !last.0.is_zero() {
            return None;
        }
        let mut terms = self.terms.clone();
        if last.1 == 1 {
            terms.pop();
        } else {
            terms.last_mut().unwrap().1 -= 1;
        }
        Some(OrdinalCNF { terms })
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && self.predecessor().is_none()
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let body = if e.is_zero() {
                format!("{}", c)
            } else if e.as_u64() == Some(1) {
                if *c == 1 { "w".to_string() } else { format!("w*{}", c) }
            } else if *c == 1 {
                format!("w^({})", e.to_text())
            } else {
                format!("w^({})*{}", e.to_text(), c)
            };
            parts.push(body);
        }
        parts.join(" + ")
    }

    /// The ordinal as a surreal normal form.
    pub fn to_surreal(&self) -> Surreal {
        use crate::coeff::Coeff;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                crate::surreal::Term::new(Coeff::from_rat(rat_from_int(*c as i64)), e.to_surreal())
            })
            .collect();
        Surreal::from_terms(terms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Run-length sign expansion; adjacent runs carry opposite signs and the
/// total length is the birthday where defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSeq {
    runs: Vec<(Sign, OrdinalCNF)>,
}

impl SignSeq {
    pub fn empty() -> Self {
        SignSeq { runs: Vec::new() }
    }

    pub fn runs(&self) -> &[(Sign, OrdinalCNF)] {
        &self.runs
    }

    pub fn push_run(&mut self, sign: Sign, len: OrdinalCNF) {
        if len.is_zero() {
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            if last.0 == sign {
                last.1 = last.1.add(&len);
                return;
            }
        }
        self.runs.push((sign, len));
    }

    pub fn from_signs(signs: &[Sign]) -> Self {
        let mut out = SignSeq::empty();
        for &s in signs {
            out.push_run(s, OrdinalCNF::from_u64(1));
        }
        out
    }

    /// Finite expansions flatten to a list of signs.
    pub fn to_signs(&self) -> Option<Vec<Sign>> {
        let mut out = Vec::new();
        for (s, len) in &self.runs {
            let n = len.as_u64()?;
            out.extend(std::iter::repeat(*s).take(n as usize));
        }
        Some(out)
    }

    /// Total length (the birthday).
    pub fn length(&self) -> OrdinalCNF {
        let mut acc = OrdinalCNF::zero();
        for (_, len) in &self.runs {
            acc = acc.add(len);
        }
        acc
    }

    pub fn mirror(&self) -> SignSeq {
        SignSeq { runs: self.runs.iter().map(|(s, l)| (s.flip(), l.clone())).collect() }
    }

    /// Run-length text: `+^w -^1`.
    pub fn to_text(&self) -> String {
        if self.runs.is_empty() {
            return "(empty)".to_string();
        }
        let mut parts = Vec::new();
        for (s, len) in &self.runs {
            let sign = match s {
                Sign::Plus => '+',
                Sign::Minus => '-',
            };
            let body = if len.as_u64() == Some(1) {
                format!("{}^1", sign)
            } else if let Some(n) = len.as_u64() {
                format!("{}^{}", sign, n)
            } else {
                format!("{}^{}", sign, len.to_text())
            };
            parts.push(body);
        }
        parts.join(" ")
    }
}

/// Sign expansion of a dyadic rational: integer walk then binary bisection.
pub fn dyadic_sign_expansion(d: &Rat) -> KResult<SignSeq> {
    if !rat_is_dyadic(d) {
        return Err(KernelError::NonDyadic);
    }
    Ok(SignSeq::from_signs(&dyadic_signs(d)))
}

pub(crate) fn dyadic_signs(d: &Rat) -> Vec<Sign> {
    let mut signs = Vec::new();
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    let mut cur = Rat::from_integer(0.into());
    while &cur != d {
        if d > &cur {
            signs.push(Sign::Plus);
            lo = Some(cur);
            cur = simplest_rat_between(lo.as_ref(), hi.as_ref()).expect("nonempty");
        } else {
            signs.push(Sign::Minus);
            hi = Some(cur);
            cur = simplest_rat_between(lo.as_ref(), hi.as_ref()).expect("nonempty");
        }
    }
    signs
}

/// Reconstruct a dyadic from a finite sign expansion by the lexicographic
/// tree walk.
pub fn dyadic_from_signs(signs: &[Sign]) -> Rat {
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    let mut cur = Rat::from_integer(0.into());
    for s in signs {
        match s {
            Sign::Plus => lo = Some(cur),
            Sign::Minus => hi = Some(cur),
        }
        cur = simplest_rat_between(lo.as_ref(), hi.as_ref()).expect("nonempty");
    }
    cur
}

/// Sign expansion of an ordinal: that many pluses.
pub fn ordinal_sign_expansion(o: &OrdinalCNF) -> SignSeq {
    let mut s = SignSeq::empty();
    s.push_run(Sign::Plus, o.clone());
    s
}

/// Birthday of a dyadic rational (length of its sign expansion); `None` for
/// non-dyadic rationals, whose expansions have length omega or more.
pub fn dyadic_birthday(q: &Rat) -> Option<u64> {
    if rat_is_dyadic(q) {
        Some(dyadic_signs(q).len() as u64)
    } else {
        None
    }
}

/// The simplest rational in the open interval: the standard Conway rule,
/// smallest-magnitude integer first, then dyadic bisection. Either bound may
/// be absent. The answer is always an integer or a dyadic.
pub fn simplest_rat_between(lo: Option<&Rat>, hi: Option<&Rat>) -> KResult<Rat> {
    if let (Some(a), Some(b)) = (lo, hi) {
        if a >= b {
            return Err(KernelError::EmptyInterval);
        }
    }
    let zero = Rat::from_integer(0.into());
    let one = Rat::from_integer(1.into());
    // Integer fitting.
    let n_min = lo.map(|a| {
        if rat_is_integer(a) { a + &one } else { Rat::from_integer(a.ceil().to_integer()) }
    });
    let n_max = hi.map(|b| {
        if rat_is_integer(b) { b - &one } else { Rat::from_integer(b.floor().to_integer()) }
    });
    let integer_fits = match (&n_min, &n_max) {
        (Some(a), Some(b)) => a <= b,
        _ => true,
    };
    if integer_fits {
        let candidate = match (&n_min, &n_max) {
            (None, None) => zero,
            (Some(a), None) => {
                if a <= &zero {
                    zero
                } else {
                    a.clone()
                }
            }
            (None, Some(b)) => {
                if b >= &zero {
                    zero
                } else {
                    b.clone()
                }
            }
            (Some(a), Some(b)) => {
                if a <= &zero && &zero <= b {
                    zero
                } else if a > &zero {
                    a.clone()
                } else {
                    b.clone()
                }
            }
        };
        return Ok(candidate);
    }
    // No integer inside: binary bisection within the unit interval.
    let a = lo.expect("bounded");
    let b = hi.expect("bounded");
    let mut left = Rat::from_integer(a.floor().to_integer());
    let mut right = &left + &one;
    loop {
        let mid = (&left + &right) / rat_from_int(2);
        if &mid <= a {
            left = mid;
        } else if &mid >= b {
            right = mid;
        } else {
            return Ok(mid);
        }
    }
}

/// The simplest dyadic strictly between two finite sets of rationals.
pub fn simplest_dyadic_between(left: &[Rat], right: &[Rat]) -> KResult<Rat> {
    let lo = left.iter().max();
    let hi = right.iter().min();
    simplest_rat_between(lo, hi)
}

/// Omnific-integer membership: no negative exponents, and an exact integer
/// coefficient at exponent zero if that term is present.
pub fn is_omnific(x: &Surreal, b: &Budget) -> KResult<bool> {
    let mut ctx = ForceCtx::new(b);
    is_omnific_ctx(x, &mut ctx)
}

pub(crate) fn is_omnific_ctx(x: &Surreal, ctx: &mut ForceCtx) -> KResult<bool> {
    let zero = Surreal::zero();
    for i in 0..=ctx.budget.max_terms {
        match x.term(i, ctx)? {
            None => return Ok(true),
            Some(t) => {
                let sign = ctx.descend(|ctx| crate::surreal::compare_ctx(&t.exp, &zero, ctx))?;
                match sign {
                    CmpResult::Greater => continue,
                    CmpResult::Less => return Ok(false),
                    CmpResult::Equal => {
                        return match t.coeff.integrality(ctx.budget.prec) {
                            Some(true) => {
                                // An exponent-zero term is the last nonnegative
                                // one; anything after it is negative.
                                match x.term(i + 1, ctx)? {
                                    None => Ok(true),
                                    Some(_) => Ok(false),
                                }
                            }
                            Some(false) => Ok(false),
                            None => Err(KernelError::IndeterminateCoeff {
                                prec: ctx.budget.prec,
                                context: "integrality of the exponent-zero coefficient",
                            }),
                        };
                    }
                    CmpResult::Indeterminate(_) => {
                        return Err(KernelError::IndeterminateExponent {
                            context: "omnific membership scan",
                        })
                    }
                }
            }
        }
    }
    Err(KernelError::BudgetExhausted { forced: ctx.budget.max_terms })
}

/// Convert a surreal to an ordinal CNF when it is ordinal-shaped: positive
/// integer coefficients and ordinal-shaped exponents, hereditarily.
pub fn surreal_to_ordinal(x: &Surreal, b: &Budget) -> KResult<Option<OrdinalCNF>> {
    let mut ctx = ForceCtx::new(b);
    surreal_to_ordinal_ctx(x, &mut ctx)
}

pub(crate) fn surreal_to_ordinal_ctx(
    x: &Surreal,
    ctx: &mut ForceCtx,
) -> KResult<Option<OrdinalCNF>> {
    let mut terms = Vec::new();
    for i in 0..=ctx.budget.max_terms {
        match x.term(i, ctx)? {
            None => return Ok(Some(OrdinalCNF { terms })),
            Some(t) => {
                let count = match t.coeff.as_exact() {
                    Some(q) if rat_is_integer(q) && q.is_positive() => {
                        match u64::try_from(q.numer().clone()) {
                            Ok(v) => v,
                            Err(_) => return Ok(None),
                        }
                    }
                    _ => return Ok(None),
                };
                let exp = match ctx.descend(|ctx| surreal_to_ordinal_ctx(&t.exp, ctx))? {
                    Some(e) => e,
                    None => return Ok(None),
                };
                terms.push((exp, count));
            }
        }
    }
    Err(KernelError::BudgetExhausted { forced: ctx.budget.max_terms })
}
