//! The five embedding conditions as executable checks on a finite sample:
//! truncation closure, real and infinitesimal exponential agreement, growth
//! past all powers, and the leader correspondence under log and exp.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::budget::Budget;
use crate::coeff::{rreal_fn, Coeff, Rat};
use crate::error::{CmpResult, KResult};
use crate::exp_log::{exp, log, ExpLogCtx};
use crate::surreal::Surreal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionStatus {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub status: ConditionStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct T1Report {
    pub conditions: Vec<ConditionReport>,
}

impl T1Report {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.status == ConditionStatus::Pass)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn report(condition: &str, status: ConditionStatus, detail: String) -> ConditionReport {
    ConditionReport { condition: condition.to_string(), status, detail }
}

/// Run the five checks over a finite sample of fragment elements.
pub fn check_t1_conditions(
    ctx: &Arc<ExpLogCtx>,
    sample: &[Surreal],
    b: &Budget,
) -> KResult<T1Report> {
    let mut conditions = Vec::new();
    conditions.push(truncation_closed(sample, b));
    conditions.push(real_agreement(ctx, sample, b));
    conditions.push(infinitesimal_agreement(ctx, sample, b));
    conditions.push(growth(ctx, sample, b));
    conditions.push(leader_correspondence(ctx, sample, b));
    Ok(T1Report { conditions })
}

/// (i) every truncation of a sample member is again a fragment element and
/// satisfies the truncation relation.
fn truncation_closed(sample: &[Surreal], b: &Budget) -> ConditionReport {
    let mut checked = 0;
    for x in sample {
        let p = match x.prefix(b) {
            Ok(p) if p.complete => p,
            _ => {
                return report(
                    "truncation-closed",
                    ConditionStatus::Indeterminate,
                    "a sample member did not force completely".into(),
                )
            }
        };
        for k in 0..=p.terms.len() {
            let t = Surreal::from_terms(p.terms[..k].to_vec());
            match t.is_truncation(x, b) {
                Ok(true) => checked += 1,
                Ok(false) => {
                    return report(
                        "truncation-closed",
                        ConditionStatus::Fail,
                        "a prefix failed the truncation relation".into(),
                    )
                }
                Err(_) => {
                    return report(
                        "truncation-closed",
                        ConditionStatus::Indeterminate,
                        "truncation relation undecided".into(),
                    )
                }
            }
        }
    }
    report("truncation-closed", ConditionStatus::Pass, format!("{} truncations verified", checked))
}

/// (ii) on real components the exponential is the coefficient-level e^x.
fn real_agreement(ctx: &Arc<ExpLogCtx>, sample: &[Surreal], b: &Budget) -> ConditionReport {
    let mut checked = 0;
    for x in sample {
        let d = match x.decompose(b) {
            Ok(d) => d,
            Err(_) => {
                return report(
                    "real-exponential-agreement",
                    ConditionStatus::Indeterminate,
                    "decomposition failed".into(),
                )
            }
        };
        let r = Surreal::monomial(d.real.clone(), Surreal::zero());
        let image = match exp(ctx, &r, b) {
            Ok(e) => e,
            Err(_) => {
                return report(
                    "real-exponential-agreement",
                    ConditionStatus::Indeterminate,
                    "exponential failed on a real part".into(),
                )
            }
        };
        let p = match image.prefix(b) {
            Ok(p) if p.complete && p.terms.len() == 1 => p,
            _ => {
                return report(
                    "real-exponential-agreement",
                    ConditionStatus::Fail,
                    "exp of a real is not a single real term".into(),
                )
            }
        };
        let coeff = &p.terms[0].coeff;
        let reference = match rreal_fn("exp", &d.real) {
            Ok(r) => Coeff::Refinable(r),
            Err(_) => {
                return report(
                    "real-exponential-agreement",
                    ConditionStatus::Indeterminate,
                    "reference exponential unavailable".into(),
                )
            }
        };
        let a = coeff.interval(b.prec);
        let c = reference.interval(b.prec);
        if a.lo > c.hi || a.hi < c.lo {
            return report(
                "real-exponential-agreement",
                ConditionStatus::Fail,
                "coefficient intervals separate".into(),
            );
        }
        checked += 1;
    }
    report(
        "real-exponential-agreement",
        ConditionStatus::Pass,
        format!("{} real parts agree", checked),
    )
}

/// (iii) on infinitesimal components the exponential matches the Taylor
/// partial sums computed along an independent arithmetic route.
fn infinitesimal_agreement(
    ctx: &Arc<ExpLogCtx>,
    sample: &[Surreal],
    b: &Budget,
) -> ConditionReport {
    const TERMS: usize = 6;
    const DEGREE: u32 = 6;
    for x in sample {
        let eps = match x.decompose(b) {
            Ok(d) => d.infinitesimal,
            Err(_) => {
                return report(
                    "infinitesimal-taylor-agreement",
                    ConditionStatus::Indeterminate,
                    "decomposition failed".into(),
                )
            }
        };
        let image = match exp(ctx, &eps, b) {
            Ok(e) => e,
            Err(_) => {
                return report(
                    "infinitesimal-taylor-agreement",
                    ConditionStatus::Indeterminate,
                    "exponential failed on an infinitesimal part".into(),
                )
            }
        };
        // Independent route: explicit partial sum of eps^k / k!.
        let mut partial = Surreal::zero();
        let mut fact = BigInt::one();
        for k in 0..=DEGREE {
            if k > 0 {
                fact *= BigInt::from(k);
            }
            let term = eps.pow_u32(k).scale(&Coeff::from_rat(Rat::new(1.into(), fact.clone())));
            partial = partial.add(&term);
        }
        let small = Budget { max_terms: TERMS, ..*b };
        let pa = image.prefix(&small);
        let pb = partial.prefix(&small);
        match (pa, pb) {
            (Ok(pa), Ok(pb)) => {
                let n = TERMS.min(pa.terms.len()).min(pb.terms.len());
                for i in 0..n {
                    let same_coeff = pa.terms[i].coeff.exact_eq(&pb.terms[i].coeff);
                    let same_exp =
                        pa.terms[i].exp.compare(&pb.terms[i].exp, b) == CmpResult::Equal;
                    if !(same_coeff && same_exp) {
                        return report(
                            "infinitesimal-taylor-agreement",
                            ConditionStatus::Fail,
                            format!("term {} differs from the Taylor sum", i),
                        );
                    }
                }
            }
            _ => {
                return report(
                    "infinitesimal-taylor-agreement",
                    ConditionStatus::Indeterminate,
                    "prefix forcing failed".into(),
                )
            }
        }
    }
    report("infinitesimal-taylor-agreement", ConditionStatus::Pass, "prefixes agree".into())
}

/// (iv) `exp x > x^n` for positive infinite sample members, n <= 5.
fn growth(ctx: &Arc<ExpLogCtx>, sample: &[Surreal], b: &Budget) -> ConditionReport {
    let mut checked = 0;
    for x in sample {
        match x.is_positive_infinite(b) {
            Ok(true) => {}
            Ok(false) => continue,
            Err(_) => {
                return report(
                    "growth",
                    ConditionStatus::Indeterminate,
                    "positivity undecided".into(),
                )
            }
        }
        let image = match exp(ctx, x, b) {
            Ok(e) => e,
            Err(_) => {
                return report("growth", ConditionStatus::Indeterminate, "exp failed".into())
            }
        };
        for n in 1..=5u32 {
            match image.compare(&x.pow_u32(n), b) {
                CmpResult::Greater => checked += 1,
                CmpResult::Indeterminate(_) => {
                    return report(
                        "growth",
                        ConditionStatus::Indeterminate,
                        format!("exp(x) vs x^{} undecided", n),
                    )
                }
                _ => {
                    return report(
                        "growth",
                        ConditionStatus::Fail,
                        format!("exp(x) <= x^{}", n),
                    )
                }
            }
        }
    }
    report("growth", ConditionStatus::Pass, format!("{} comparisons decided", checked))
}

/// (v) log of each sampled leader is purely infinite, and exp of each sampled
/// purely infinite member is a leader.
fn leader_correspondence(
    ctx: &Arc<ExpLogCtx>,
    sample: &[Surreal],
    b: &Budget,
) -> ConditionReport {
    for x in sample {
        // Leaders: single positive term with coefficient one.
        let p = match x.prefix(b) {
            Ok(p) => p,
            Err(_) => {
                return report(
                    "leader-correspondence",
                    ConditionStatus::Indeterminate,
                    "prefix forcing failed".into(),
                )
            }
        };
        let is_leader = p.complete && p.terms.len() == 1 && p.terms[0].coeff.is_exact_one();
        if is_leader {
            let positive_leader =
                matches!(p.terms[0].exp.sign(b), CmpResult::Greater | CmpResult::Equal);
            if positive_leader {
                match log(ctx, x, b).and_then(|l| l.is_purely_infinite(b)) {
                    Ok(true) => {}
                    Ok(false) => {
                        // log 1 = 0 counts as purely infinite (empty sum).
                        return report(
                            "leader-correspondence",
                            ConditionStatus::Fail,
                            "log of a leader is not purely infinite".into(),
                        );
                    }
                    Err(_) => {
                        return report(
                            "leader-correspondence",
                            ConditionStatus::Indeterminate,
                            "log failed on a leader".into(),
                        )
                    }
                }
            }
        }
        match x.is_purely_infinite(b) {
            Ok(true) => {
                let e = match exp(ctx, x, b) {
                    Ok(e) => e,
                    Err(_) => {
                        return report(
                            "leader-correspondence",
                            ConditionStatus::Indeterminate,
                            "exp failed on a purely infinite member".into(),
                        )
                    }
                };
                let ep = match e.prefix(b) {
                    Ok(p) if p.complete => p,
                    _ => {
                        return report(
                            "leader-correspondence",
                            ConditionStatus::Indeterminate,
                            "exp image did not force completely".into(),
                        )
                    }
                };
                if !(ep.terms.len() == 1 && ep.terms[0].coeff.is_exact_one()) {
                    return report(
                        "leader-correspondence",
                        ConditionStatus::Fail,
                        "exp of a purely infinite member is not a leader".into(),
                    );
                }
            }
            Ok(false) => {}
            Err(_) => {
                return report(
                    "leader-correspondence",
                    ConditionStatus::Indeterminate,
                    "purely-infinite test undecided".into(),
                )
            }
        }
    }
    report("leader-correspondence", ConditionStatus::Pass, "all leaders correspond".into())
}
