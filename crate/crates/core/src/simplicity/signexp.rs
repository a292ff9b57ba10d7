//! Sign expansions for the supported surreal families.
//!
//! Full sign expansions of arbitrary normal forms are out of scope; this
//! covers what the cut solver and the h-map recursion need: dyadic rationals,
//! plus-or-minus ordinal-shaped values, single terms `q * w^n` with integer
//! `n > 0`, and the `q * w^(-n)` infinitesimal patterns. Everything else
//! reports `None` and callers fall back or fail loudly.

use num_traits::Signed;

use crate::budget::Budget;
use crate::coeff::{rat_is_dyadic, rat_is_integer, Rat};
use crate::error::KResult;
use crate::surreal::Surreal;

use super::{
    dyadic_signs, ordinal_sign_expansion, surreal_to_ordinal, OrdinalCNF, Sign, SignSeq,
};

/// Sign expansion of a supported surreal; `None` when the value is outside
/// the supported families.
pub fn sign_expansion(x: &Surreal, b: &Budget) -> KResult<Option<SignSeq>> {
    // Dyadic rational (includes zero and negatives).
    if let Some(q) = x.to_rat(b) {
        if rat_is_dyadic(&q) {
            return Ok(Some(SignSeq::from_signs(&dyadic_signs(&q))));
        }
        return Ok(None);
    }
    // Ordinal-shaped or its negation.
    if let Some(o) = surreal_to_ordinal(x, b)? {
        return Ok(Some(ordinal_sign_expansion(&o)));
    }
    if let Some(o) = surreal_to_ordinal(&x.neg(), b)? {
        return Ok(Some(ordinal_sign_expansion(&o).mirror()));
    }
    // Single-term patterns q * w^(±n).
    let prefix = x.prefix(b)?;
    if prefix.complete && prefix.terms.len() == 1 {
        let t = &prefix.terms[0];
        let q = match t.coeff.as_exact() {
            Some(q) if rat_is_dyadic(q) => q.clone(),
            _ => return Ok(None),
        };
        if let Some(e) = t.exp.to_rat(b) {
            if rat_is_integer(&e) {
                if let Ok(n) = i64::try_from(e.numer().clone()) {
                    if n > 0 {
                        return Ok(single_term_positive(&q, n as u64));
                    }
                    if n < 0 {
                        return Ok(single_term_negative(&q, (-n) as u64));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// `q * w^n` for integer `n > 0`: each sign of the coefficient expansion is
/// repeated `w^n` times.
fn single_term_positive(q: &Rat, n: u64) -> Option<SignSeq> {
    let weight = OrdinalCNF::power(OrdinalCNF::from_u64(n), 1);
    let mut out = SignSeq::empty();
    for s in dyadic_signs(q) {
        out.push_run(s, weight.clone());
    }
    Some(out)
}

/// `q * w^(-n)` for integer `n > 0` and dyadic `q > 0`: a leading plus, then
/// `w * n` minuses, then the coefficient expansion past its leading sign,
/// one sign each. Negative coefficients mirror.
fn single_term_negative(q: &Rat, n: u64) -> Option<SignSeq> {
    if q.is_negative() {
        return single_term_negative(&-q, n).map(|s| s.mirror());
    }
    let mut out = SignSeq::empty();
    out.push_run(Sign::Plus, OrdinalCNF::from_u64(1));
    out.push_run(Sign::Minus, OrdinalCNF::omega().mul(&OrdinalCNF::from_u64(n)));
    for s in dyadic_signs(q).into_iter().skip(1) {
        out.push_run(s, OrdinalCNF::from_u64(1));
    }
    Some(out)
}

/// Birthday (tree rank) of a supported surreal, as an ordinal.
pub fn surreal_birthday(x: &Surreal, b: &Budget) -> KResult<Option<OrdinalCNF>> {
    Ok(sign_expansion(x, b)?.map(|s| s.length()))
}
