//! The exponential and logarithm on the fragment.
//!
//! The exponential factors through the three-way decomposition: purely
//! infinite arguments map to leaders through the termwise inverse h-map,
//! real arguments exponentiate at the coefficient level, and infinitesimal
//! arguments use the formal Taylor series. The logarithm inverts each piece:
//! `log(r w^y (1 + eps)) = log_leader(y) + ln(r) + log1p(eps)`.
//!
//! The h-map is computed from its cut recursion
//! `h(s) = { 0, h(s^L) | h(s^R), (1/k) w^s }` by the simplest-in-cut solver:
//! tree predecessors of `s` are enumerated from its sign expansion, their
//! h-images become bound options, and the `(1/k) w^s` family becomes a
//! valuation ceiling. Limit predecessor families are sampled and matched to a
//! coefficient ladder, which becomes a valuation floor. The inverse g walks
//! the simplicity tree, comparing h at each candidate and jumping past
//! coefficient ladders by valuation; both maps memoize exact finite forms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed};

use crate::budget::Budget;
use crate::coeff::{rreal_fn, Coeff, Rat};
use crate::error::{CmpResult, KernelError, KResult};
use crate::simplicity::{
    dyadic_signs, simplest_in_cut, surreal_to_ordinal, CutSpec, OrdinalCNF, Sign,
};
use crate::surreal::{map_exponents, power_series, SeriesKind, Surreal};

/// Shared exp/log session state: the h and g memo tables.
pub struct ExpLogCtx {
    h_memo: Mutex<HashMap<crate::surreal::CanonKey, Surreal>>,
    g_memo: Mutex<HashMap<crate::surreal::CanonKey, Surreal>>,
    h_pairs: Mutex<Vec<(Surreal, Surreal)>>,
    g_pairs: Mutex<Vec<(Surreal, Surreal)>>,
}

impl Default for ExpLogCtx {
    fn default() -> Self {
        ExpLogCtx {
            h_memo: Mutex::new(HashMap::new()),
            g_memo: Mutex::new(HashMap::new()),
            h_pairs: Mutex::new(Vec::new()),
            g_pairs: Mutex::new(Vec::new()),
        }
    }
}

/// `sum x^n / n!` for infinitesimal `x`.
pub fn exp_taylor(eps: &Surreal, b: &Budget) -> KResult<Surreal> {
    if !eps.is_infinitesimal(b)? {
        return Err(KernelError::NotInfinitesimal);
    }
    Ok(power_series(eps.clone(), SeriesKind::ExpTaylor))
}

/// `log(1 + x)` for infinitesimal `x`.
pub fn log1p(eps: &Surreal, b: &Budget) -> KResult<Surreal> {
    if !eps.is_infinitesimal(b)? {
        return Err(KernelError::NotInfinitesimal);
    }
    Ok(power_series(eps.clone(), SeriesKind::Log1p))
}

impl ExpLogCtx {
    pub fn new() -> Arc<Self> {
        Arc::new(ExpLogCtx::default())
    }

    /// Read-only view of the memoized h pairs, for identity checks.
    pub fn h_memo_snapshot(&self) -> Vec<(Surreal, Surreal)> {
        self.h_pairs.lock().unwrap().clone()
    }

    pub fn g_memo_snapshot(&self) -> Vec<(Surreal, Surreal)> {
        self.g_pairs.lock().unwrap().clone()
    }
}

/// Gonshor's strictly increasing h-map on supported finite forms.
pub fn h_map(ctx: &Arc<ExpLogCtx>, s: &Surreal, b: &Budget) -> KResult<Surreal> {
    let key = s.canonical_key(b)?;
    if let Some(v) = ctx.h_memo.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let cut = h_cut(ctx, s, b)?;
    let value = simplest_in_cut(&cut, b)?;
    ctx.h_memo.lock().unwrap().insert(key, value.clone());
    ctx.h_pairs.lock().unwrap().push((s.clone(), value.clone()));
    Ok(value)
}

/// The h-recursion's cut at `s`.
fn h_cut(ctx: &Arc<ExpLogCtx>, s: &Surreal, b: &Budget) -> KResult<CutSpec> {
    // Dyadic arguments: finitely many tree predecessors, all enumerable.
    if let Some(q) = s.to_rat(b) {
        if crate::coeff::rat_is_dyadic(&q) {
            let mut lefts: Vec<Rat> = Vec::new();
            let mut rights: Vec<Rat> = Vec::new();
            for p in dyadic_prefix_values(&q) {
                if p < q {
                    lefts.push(p);
                } else {
                    rights.push(p);
                }
            }
            let lo = match lefts.iter().max() {
                Some(p) => Some(h_map(ctx, &Surreal::from_rat(p.clone()), b)?),
                None => Some(Surreal::zero()),
            };
            let hi = match rights.iter().min() {
                Some(p) => Some(h_map(ctx, &Surreal::from_rat(p.clone()), b)?),
                None => None,
            };
            return Ok(CutSpec { lo, hi, val_upper: Some(s.clone()), val_lower: None });
        }
        return Err(KernelError::Unsupported("h of a non-dyadic rational"));
    }
    // Infinite ordinal-shaped arguments: all predecessors lie to the left.
    if let Some(o) = surreal_to_ordinal(s, b)? {
        if let Some(p) = o.predecessor() {
            let lo = h_map(ctx, &p.to_surreal(), b)?;
            return Ok(CutSpec {
                lo: Some(lo),
                hi: None,
                val_upper: Some(s.clone()),
                val_lower: None,
            });
        }
        // Limit ordinal: sample the predecessor ladder and match a
        // coefficient ladder `c_j * w^u`, which encodes as a valuation floor.
        let samples = limit_samples(&o).ok_or(KernelError::FragmentExhausted {
            context: "unsupported limit shape in the h recursion",
        })?;
        let mut images = Vec::new();
        for o_j in &samples {
            images.push(h_map(ctx, &o_j.to_surreal(), b)?);
        }
        let floor = ladder_valuation(&images, b)?.ok_or(KernelError::FragmentExhausted {
            context: "h predecessor family is not a recognized ladder",
        })?;
        return Ok(CutSpec {
            lo: Some(images.last().unwrap().clone()),
            hi: None,
            val_upper: Some(s.clone()),
            val_lower: Some(floor),
        });
    }
    Err(KernelError::Unsupported("h outside dyadic and ordinal-shaped arguments"))
}

/// Values of all proper prefixes of a dyadic's sign expansion.
fn dyadic_prefix_values(q: &Rat) -> Vec<Rat> {
    let signs = dyadic_signs(q);
    let mut out = Vec::new();
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    let mut cur = Rat::from_integer(0.into());
    for s in &signs {
        out.push(cur.clone());
        match s {
            Sign::Plus => lo = Some(cur),
            Sign::Minus => hi = Some(cur),
        }
        cur = crate::simplicity::simplest_rat_between(lo.as_ref(), hi.as_ref())
            .expect("prefix walk stays feasible");
    }
    out
}

/// Cofinal samples below a limit ordinal, three of them.
fn limit_samples(o: &OrdinalCNF) -> Option<Vec<OrdinalCNF>> {
    let terms = o.terms();
    let (last_exp, last_count) = terms.last()?;
    let step_exp = last_exp.predecessor()?;
    // base = o with the last term's count reduced by one.
    let mut base = OrdinalCNF::zero();
    for (e, c) in &terms[..terms.len() - 1] {
        base = base.add(&OrdinalCNF::power(e.clone(), *c));
    }
    if *last_count > 1 {
        base = base.add(&OrdinalCNF::power(last_exp.clone(), last_count - 1));
    }
    let mut out = Vec::new();
    for j in 1..=3u64 {
        out.push(base.add(&OrdinalCNF::power(step_exp.clone(), j)));
    }
    Some(out)
}

/// Recognize images `c_1 w^u < c_2 w^u < c_3 w^u` with growing exact
/// coefficients; the family is then cofinal in `{n w^u}` and encodes as the
/// valuation floor `u`.
fn ladder_valuation(images: &[Surreal], b: &Budget) -> KResult<Option<Surreal>> {
    let mut exps: Vec<Surreal> = Vec::new();
    let mut coeffs: Vec<Rat> = Vec::new();
    for im in images {
        let p = im.prefix(b)?;
        if !p.complete || p.terms.len() != 1 {
            return Ok(None);
        }
        let c = match p.terms[0].coeff.as_exact() {
            Some(c) if c.is_positive() => c.clone(),
            _ => return Ok(None),
        };
        exps.push(p.terms[0].exp.clone());
        coeffs.push(c);
    }
    for e in &exps[1..] {
        if e.compare(&exps[0], b) != CmpResult::Equal {
            return Ok(None);
        }
    }
    if !(coeffs[0] < coeffs[1] && coeffs[1] < coeffs[2]) {
        return Ok(None);
    }
    Ok(Some(exps[0].clone()))
}

/// The inverse of h: simplicity-tree descent comparing h at each candidate.
pub fn g_map(ctx: &Arc<ExpLogCtx>, bv: &Surreal, b: &Budget) -> KResult<Surreal> {
    if bv.sign(b) != CmpResult::Greater {
        return Err(KernelError::NonPositive);
    }
    let key = bv.canonical_key(b)?;
    if let Some(v) = ctx.g_memo.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let mut lo: Option<Surreal> = None;
    let mut hi: Option<Surreal> = None;
    // (candidate, went_low) history for ladder detection.
    let mut history: Vec<(Surreal, bool)> = Vec::new();
    for _ in 0..b.depth {
        let mut cand = simplest_in_cut(&CutSpec::between(lo.clone(), hi.clone()), b)?;
        // A ladder probe is only taken when h is defined on the jump target;
        // otherwise plain descent continues.
        if let Some(jumped) = ladder_jump(&history, &lo, &hi, b) {
            if h_map(ctx, &jumped, b).is_ok() {
                cand = jumped;
            }
        }
        let image = h_map(ctx, &cand, b)?;
        match image.compare(bv, b) {
            CmpResult::Equal => {
                ctx.g_memo.lock().unwrap().insert(key, cand.clone());
                ctx.g_pairs.lock().unwrap().push((bv.clone(), cand.clone()));
                return Ok(cand);
            }
            CmpResult::Less => {
                history.push((cand.clone(), true));
                lo = Some(cand);
            }
            CmpResult::Greater => {
                history.push((cand.clone(), false));
                hi = Some(cand);
            }
            CmpResult::Indeterminate(_) => {
                return Err(KernelError::FragmentExhausted {
                    context: "h comparison undecided during g descent",
                })
            }
        }
    }
    Err(KernelError::FragmentExhausted { context: "g descent exceeded the depth budget" })
}

/// After three same-direction moves along a coefficient ladder `c w^u`, probe
/// the next Archimedean class: the simplest value past the whole ladder.
fn ladder_jump(
    history: &[(Surreal, bool)],
    lo: &Option<Surreal>,
    hi: &Option<Surreal>,
    b: &Budget,
) -> Option<Surreal> {
    if history.len() < 3 {
        return None;
    }
    let tail = &history[history.len() - 3..];
    let dir = tail[0].1;
    if !tail.iter().all(|(_, d)| *d == dir) {
        return None;
    }
    if !dir {
        // Descending ladders would need limits from above; not supported.
        return None;
    }
    let last = &tail[2].0;
    let p = last.prefix(b).ok()?;
    if !p.complete || p.terms.len() != 1 {
        return None;
    }
    let u = p.terms[0].exp.clone();
    let probe = CutSpec {
        lo: lo.clone(),
        hi: hi.clone(),
        val_lower: Some(u),
        val_upper: None,
    };
    simplest_in_cut(&probe, b).ok()
}

/// `log(w^gamma)`: map the exponent stream termwise through h.
pub fn log_leader(ctx: &Arc<ExpLogCtx>, gamma: &Surreal) -> Surreal {
    let ctx = ctx.clone();
    map_exponents(gamma.clone(), move |e, fctx| h_map(&ctx, e, &fctx.budget))
}

/// The Kruskal-Gonshor exponential on the fragment.
pub fn exp(ctx: &Arc<ExpLogCtx>, x: &Surreal, b: &Budget) -> KResult<Surreal> {
    let d = x.decompose(b)?;
    // Purely infinite part: exp(sum r w^s) = w^(sum r w^(g(s))).
    let gctx = ctx.clone();
    let gamma = map_exponents(d.purely_infinite, move |e, fctx| g_map(&gctx, e, &fctx.budget));
    // Real part at the coefficient level.
    let real_coeff = if d.real.is_exact_zero() {
        Coeff::one()
    } else {
        Coeff::refinable(rreal_fn("exp", &d.real)?)?
    };
    let lead = Surreal::monomial(real_coeff, gamma);
    let tail = exp_taylor(&d.infinitesimal, b)?;
    Ok(lead.mul(&tail))
}

/// The logarithm of a provably positive fragment element.
pub fn log(ctx: &Arc<ExpLogCtx>, x: &Surreal, b: &Budget) -> KResult<Surreal> {
    let lead = x.leading(b).map_err(|_| KernelError::NonPositive)?;
    match lead.coeff.sign(b.prec) {
        Some(std::cmp::Ordering::Greater) => {}
        _ => return Err(KernelError::NonPositive),
    }
    // x = r w^gamma (1 + eps), eps = tail / (r w^gamma); the tail is taken
    // directly off the stream so refinable leading coefficients never face a
    // cancellation test.
    let r_inv = lead.coeff.inv()?;
    let neg_gamma = lead.exp.neg();
    let eps = x.tail_from(1).monomial_mul(&r_inv, &neg_gamma);

    let from_leader = log_leader(ctx, &lead.exp);
    let from_real = match &lead.coeff {
        Coeff::Exact(q) if q.is_one() => Surreal::zero(),
        c => Surreal::monomial(Coeff::refinable(rreal_fn("ln", c)?)?, Surreal::zero()),
    };
    let from_eps = power_series(eps, SeriesKind::Log1p);
    Ok(from_leader.add(&from_real).add(&from_eps))
}

#[cfg(test)]
mod tests;
