//! The simplest-element-in-a-cut solver.
//!
//! A cut is a pair of strict bounds plus optional valuation constraints that
//! encode the countable option families `{n * w^y}` (from below) and
//! `{(1/k) * w^s}` (from above) as bounds on the leading exponent. The solver
//! emits the answer's normal form greedily: shared leading terms of the
//! bounds are copied, and at the first divergence the simplest admissible
//! (exponent, coefficient) pair is chosen — the exponent by recursing on the
//! induced exponent cut, the coefficient by the dyadic simplest-between rule.
//!
//! Tie-breaking between "bump the bound's coefficient" and "keep it and
//! descend" follows sign-expansion cost: coefficient signs at a positive
//! exponent are repeated transfinitely, so a longer coefficient only wins
//! there when it prunes the bound's expansion; at exponents at most zero the
//! coefficient bump is always the shorter path. The choices are validated
//! against brute force on the dyadic fragment and the h/g identities.

use crate::budget::Budget;
use crate::coeff::{Coeff, Rat};
use crate::error::{CmpResult, KernelError, KResult};
use crate::surreal::{compare_ctx, ForceCtx, Surreal, Term};

use super::{dyadic_birthday, simplest_rat_between, surreal_birthday};

/// A cut over the fragment: strict bounds and valuation constraints.
///
/// `val_upper = Some(u)` requires `|x| < (1/k) w^u` for every `k`, i.e. the
/// leading exponent stays strictly below `u`; `val_lower = Some(l)` requires
/// `|x| > n w^l` for every `n`.
#[derive(Clone)]
pub struct CutSpec {
    pub lo: Option<Surreal>,
    pub hi: Option<Surreal>,
    pub val_upper: Option<Surreal>,
    pub val_lower: Option<Surreal>,
}

impl CutSpec {
    pub fn between(lo: Option<Surreal>, hi: Option<Surreal>) -> Self {
        CutSpec { lo, hi, val_upper: None, val_lower: None }
    }
}

const FE: fn(&'static str) -> KernelError = |context| KernelError::FragmentExhausted { context };

/// The simplest representable surreal strictly inside the cut.
pub fn simplest_in_cut(cut: &CutSpec, b: &Budget) -> KResult<Surreal> {
    let mut ctx = ForceCtx::new(b);
    let out = solve(cut, &mut ctx)?;
    verify(&out, cut, b)?;
    Ok(out)
}

fn cmp(x: &Surreal, y: &Surreal, ctx: &mut ForceCtx) -> KResult<CmpResult> {
    compare_ctx(x, y, ctx)
}

fn decided(c: CmpResult, context: &'static str) -> KResult<CmpResult> {
    if c.decided() {
        Ok(c)
    } else {
        Err(FE(context))
    }
}

pub(crate) fn solve(cut: &CutSpec, ctx: &mut ForceCtx) -> KResult<Surreal> {
    let zero = Surreal::zero();
    if let (Some(lo), Some(hi)) = (&cut.lo, &cut.hi) {
        let c = decided(cmp(lo, hi, ctx)?, "cut bounds do not separate")?;
        if c != CmpResult::Less {
            return Err(KernelError::EmptyInterval);
        }
    }
    let lo_sign = match &cut.lo {
        None => CmpResult::Less,
        Some(l) => decided(cmp(l, &zero, ctx)?, "sign of the lower bound")?,
    };
    let hi_sign = match &cut.hi {
        None => CmpResult::Greater,
        Some(h) => decided(cmp(h, &zero, ctx)?, "sign of the upper bound")?,
    };
    // Zero is the simplest of all when it fits.
    if lo_sign == CmpResult::Less && hi_sign == CmpResult::Greater && cut.val_lower.is_none() {
        return Ok(zero);
    }
    if hi_sign != CmpResult::Greater {
        // The answer is negative: mirror the cut.
        let mirrored = CutSpec {
            lo: cut.hi.as_ref().map(|h| h.neg()),
            hi: cut.lo.as_ref().map(|l| l.neg()),
            val_upper: cut.val_upper.clone(),
            val_lower: cut.val_lower.clone(),
        };
        return Ok(solve_positive(&mirrored, ctx)?.neg());
    }
    // Positive branch; clamp an irrelevant negative lower bound to zero.
    let clamped = if lo_sign == CmpResult::Less {
        CutSpec { lo: Some(zero), ..cut.clone() }
    } else {
        cut.clone()
    };
    solve_positive(&clamped, ctx)
}

/// Leading term of a bound residual, as exact data for window arithmetic.
struct BoundLead {
    exp: Surreal,
    coeff: Rat,
}

fn bound_lead(x: &Surreal, ctx: &mut ForceCtx, context: &'static str) -> KResult<BoundLead> {
    let t = match x.term(0, ctx)? {
        Some(t) => t,
        None => return Err(FE(context)),
    };
    let coeff = t.coeff.as_exact().cloned().ok_or(FE(context))?;
    Ok(BoundLead { exp: t.exp, coeff })
}

fn solve_positive(cut: &CutSpec, ctx: &mut ForceCtx) -> KResult<Surreal> {
    let zero = Surreal::zero();
    let mut prefix: Vec<Term> = Vec::new();
    let mut prefix_val = Surreal::zero();

    for _ in 0..=ctx.budget.max_terms {
        let rlo = cut.lo.as_ref().map(|l| l.sub(&prefix_val));
        let rhi = cut.hi.as_ref().map(|h| h.sub(&prefix_val));

        // Stop as soon as the emitted prefix itself realizes the cut.
        if !prefix.is_empty() {
            let lo_ok = match &rlo {
                None => true,
                Some(r) => decided(cmp(r, &zero, ctx)?, "residual lower sign")? == CmpResult::Less,
            };
            let hi_ok = match &rhi {
                None => true,
                Some(r) => {
                    decided(cmp(r, &zero, ctx)?, "residual upper sign")? == CmpResult::Greater
                }
            };
            if lo_ok && hi_ok {
                return Ok(Surreal::from_terms(prefix));
            }
        }

        // Residual sign: positive unless the remaining upper bound dropped
        // to or below zero (after following the upper bound's terms).
        let first = prefix.is_empty();
        let residual_negative = match &rhi {
            Some(r) => {
                decided(cmp(r, &zero, ctx)?, "residual direction")? != CmpResult::Greater
            }
            None => false,
        };
        let (a_lo, a_hi, negate) = if residual_negative {
            (rhi.as_ref().map(|r| r.neg()), rlo.as_ref().map(|r| r.neg()), true)
        } else {
            (rlo.clone(), rhi.clone(), false)
        };
        // Effective positive residual bounds: drop a lower bound that is not
        // strictly positive.
        let a_lo = match a_lo {
            None => None,
            Some(r) => match decided(cmp(&r, &zero, ctx)?, "residual lower bound sign")? {
                CmpResult::Greater => Some(r),
                _ => None,
            },
        };

        // Strict exponent ceilings: the previous emitted exponent and, on the
        // first term, the valuation upper bound.
        let mut strict_uppers: Vec<Surreal> = Vec::new();
        if let Some(last) = prefix.last() {
            strict_uppers.push(last.exp.clone());
        }
        if first {
            if let Some(vu) = &cut.val_upper {
                strict_uppers.push(vu.clone());
            }
        }
        let strict_lower = if first { cut.val_lower.clone() } else { None };

        let lo_lead = match &a_lo {
            Some(r) => Some(bound_lead(r, ctx, "lower residual leading term")?),
            None => None,
        };
        let hi_lead = match &a_hi {
            Some(r) => Some(bound_lead(r, ctx, "upper residual leading term")?),
            None => None,
        };

        let term = choose_term(
            lo_lead.as_ref(),
            hi_lead.as_ref(),
            &strict_uppers,
            strict_lower.as_ref(),
            ctx,
        )?;
        let emitted = if negate {
            Term::new(Coeff::from_rat(-term_rat(&term)), term.exp.clone())
        } else {
            term
        };
        prefix_val = prefix_val.add(&Surreal::from_terms(vec![emitted.clone()]));
        prefix.push(emitted);
    }
    Err(FE("no representable answer within the term budget"))
}

fn term_rat(t: &Term) -> Rat {
    t.coeff.as_exact().cloned().expect("solver terms carry exact coefficients")
}

/// Pick the next normal-form term for a positive residual constrained by
/// `lo < r < hi` (leads given), strict exponent ceilings and an optional
/// strict exponent floor.
fn choose_term(
    lo: Option<&BoundLead>,
    hi: Option<&BoundLead>,
    strict_uppers: &[Surreal],
    strict_lower: Option<&Surreal>,
    ctx: &mut ForceCtx,
) -> KResult<Term> {
    // Route availability around the bound exponents.
    let el_ok = match lo {
        Some(l) => {
            below_all(&l.exp, strict_uppers, ctx)?
                && match strict_lower {
                    Some(f) => {
                        decided(cmp(&l.exp, f, ctx)?, "exponent floor")? == CmpResult::Greater
                    }
                    None => true,
                }
        }
        None => false,
    };
    let eh_ok = match hi {
        Some(h) => {
            below_all(&h.exp, strict_uppers, ctx)?
                && match strict_lower {
                    Some(f) => {
                        decided(cmp(&h.exp, f, ctx)?, "exponent floor")? == CmpResult::Greater
                    }
                    None => true,
                }
        }
        None => false,
    };
    let same_exp = match (lo, hi) {
        (Some(l), Some(h)) => {
            ctx.descend(|ctx| decided(cmp(&l.exp, &h.exp, ctx)?, "bound exponents"))?
                == CmpResult::Equal
        }
        _ => false,
    };

    // Open route: the simplest exponent strictly between all constraints.
    let open_lo = match (lo.map(|l| l.exp.clone()), strict_lower.cloned()) {
        (Some(a), Some(b)) => Some(max_sur(a, b, ctx)?),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    let mut open_hi: Option<Surreal> = None;
    for u in strict_uppers {
        open_hi = Some(match open_hi {
            None => u.clone(),
            Some(cur) => min_sur(cur, u.clone(), ctx)?,
        });
    }
    if let Some(h) = hi {
        open_hi = Some(match open_hi {
            None => h.exp.clone(),
            Some(cur) => min_sur(cur, h.exp.clone(), ctx)?,
        });
    }
    let open_exp = {
        let sub = CutSpec::between(open_lo, open_hi);
        ctx.descend(|ctx| solve(&sub, ctx)).ok()
    };

    // Choose the simplest exponent among the available routes.
    #[derive(Clone, Copy, PartialEq)]
    enum Route {
        Open,
        Lo,
        Hi,
    }
    let mut routes: Vec<(Route, Surreal)> = Vec::new();
    if let Some(e) = &open_exp {
        routes.push((Route::Open, e.clone()));
    }
    if el_ok {
        routes.push((Route::Lo, lo.unwrap().exp.clone()));
    }
    if eh_ok && !same_exp {
        routes.push((Route::Hi, hi.unwrap().exp.clone()));
    }
    if routes.is_empty() {
        return Err(FE("no admissible leading exponent"));
    }
    let mut best = 0usize;
    for i in 1..routes.len() {
        if simpler_exponent(&routes[i].1, &routes[best].1, ctx)? {
            best = i;
        }
    }
    let (route, exp) = routes[best].clone();

    match route {
        Route::Open => Ok(Term::new(Coeff::one(), exp)),
        Route::Lo => {
            let l = lo.unwrap();
            let cap = if same_exp { Some(hi.unwrap().coeff.clone()) } else { None };
            step_or_follow(&l.coeff, cap.as_ref(), &l.exp, hi.filter(|_| same_exp), ctx)
        }
        Route::Hi => {
            let h = hi.unwrap();
            let window = simplest_rat_between(Some(&Rat::from_integer(0.into())), Some(&h.coeff))?;
            let step_ok = step_beats_follow(&window, &h.coeff, &h.exp, ctx)?;
            if step_ok {
                Ok(Term::new(Coeff::from_rat(window), h.exp.clone()))
            } else {
                Ok(Term::new(Coeff::from_rat(h.coeff.clone()), h.exp.clone()))
            }
        }
    }
}

/// At the lower bound's exponent: either bump the coefficient past it, or
/// copy the bound's term and keep descending. When the upper bound shares the
/// exponent, the coefficient window is capped and following may copy either
/// side; the side with the simpler coefficient is copied.
fn step_or_follow(
    cl: &Rat,
    cap: Option<&Rat>,
    exp: &Surreal,
    hi_same: Option<&BoundLead>,
    ctx: &mut ForceCtx,
) -> KResult<Term> {
    match simplest_rat_between(Some(cl), cap) {
        Ok(c) => {
            if step_beats_follow(&c, cl, exp, ctx)? {
                return Ok(Term::new(Coeff::from_rat(c), exp.clone()));
            }
            follow_side(cl, hi_same, exp)
        }
        Err(_) => follow_side(cl, hi_same, exp),
    }
}

fn follow_side(cl: &Rat, hi_same: Option<&BoundLead>, exp: &Surreal) -> KResult<Term> {
    let coeff = match hi_same {
        Some(h) => {
            let bl = dyadic_birthday(cl).unwrap_or(u64::MAX);
            let bh = dyadic_birthday(&h.coeff).unwrap_or(u64::MAX);
            if bh < bl {
                h.coeff.clone()
            } else {
                cl.clone()
            }
        }
        None => cl.clone(),
    };
    Ok(Term::new(Coeff::from_rat(coeff), exp.clone()))
}

/// Bumping the coefficient wins when the new coefficient's expansion is no
/// longer than the bound's, or when the exponent is at most zero (where
/// coefficient signs are not transfinitely repeated).
fn step_beats_follow(
    candidate: &Rat,
    bound: &Rat,
    exp: &Surreal,
    ctx: &mut ForceCtx,
) -> KResult<bool> {
    let bc = dyadic_birthday(candidate).unwrap_or(u64::MAX);
    let bb = dyadic_birthday(bound).unwrap_or(u64::MAX);
    if bc <= bb {
        return Ok(true);
    }
    let zero = Surreal::zero();
    let s = ctx.descend(|ctx| decided(cmp(exp, &zero, ctx)?, "exponent sign for step rule"))?;
    Ok(s != CmpResult::Greater)
}

/// Is `a` strictly simpler than `b`? Decided by birthday where the sign
/// expansion is known; unknown birthdays lose ties deterministically.
fn simpler_exponent(a: &Surreal, b: &Surreal, ctx: &mut ForceCtx) -> KResult<bool> {
    let budget = ctx.budget;
    let ba = surreal_birthday(a, &budget)?;
    let bb = surreal_birthday(b, &budget)?;
    match (ba, bb) {
        (Some(x), Some(y)) => Ok(x.compare(&y) == std::cmp::Ordering::Less),
        (Some(_), None) => Ok(true),
        _ => Ok(false),
    }
}

fn below_all(e: &Surreal, uppers: &[Surreal], ctx: &mut ForceCtx) -> KResult<bool> {
    for u in uppers {
        let c = ctx.descend(|ctx| decided(cmp(e, u, ctx)?, "exponent ceiling"))?;
        if c != CmpResult::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

fn max_sur(a: Surreal, b: Surreal, ctx: &mut ForceCtx) -> KResult<Surreal> {
    let c = ctx.descend(|ctx| decided(cmp(&a, &b, ctx)?, "bound maximum"))?;
    Ok(if c == CmpResult::Less { b } else { a })
}

fn min_sur(a: Surreal, b: Surreal, ctx: &mut ForceCtx) -> KResult<Surreal> {
    let c = ctx.descend(|ctx| decided(cmp(&a, &b, ctx)?, "bound minimum"))?;
    Ok(if c == CmpResult::Greater { b } else { a })
}

/// Budget-verified membership of the result in the cut.
fn verify(x: &Surreal, cut: &CutSpec, b: &Budget) -> KResult<()> {
    if let Some(lo) = &cut.lo {
        if x.compare(lo, b) != CmpResult::Greater {
            return Err(FE("result does not exceed the lower bound"));
        }
    }
    if let Some(hi) = &cut.hi {
        if x.compare(hi, b) != CmpResult::Less {
            return Err(FE("result does not stay below the upper bound"));
        }
    }
    let lead = match x.is_zero_exact(b) {
        Ok(true) => None,
        _ => Some(x.leading(b)?),
    };
    if let Some(vu) = &cut.val_upper {
        match &lead {
            None => {}
            Some(t) => {
                if t.exp.compare(vu, b) != CmpResult::Less {
                    return Err(FE("result violates the valuation upper bound"));
                }
            }
        }
    }
    if let Some(vl) = &cut.val_lower {
        match &lead {
            None => return Err(FE("zero cannot exceed a valuation lower bound")),
            Some(t) => {
                if t.exp.compare(vl, b) != CmpResult::Greater {
                    return Err(FE("result violates the valuation lower bound"));
                }
            }
        }
    }
    Ok(())
}
