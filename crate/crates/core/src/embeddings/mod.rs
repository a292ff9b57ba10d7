//! Hahn-field embedding machinery: developments over exponent subspaces,
//! paths, atomicity and independence checks, bounded log-exp closures, the
//! five embedding conditions as executable checks, and bounded tower
//! generation.

mod linalg;
mod t1;
mod tower;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::budget::Budget;
use crate::coeff::Rat;
use crate::error::{CmpResult, KernelError, KResult};
use crate::exp_log::{log, log_leader, ExpLogCtx};
use crate::surreal::{take_while_terms, CanonKey, ForceCtx, Surreal};

pub use t1::{check_t1_conditions, ConditionStatus, T1Report};
pub use tower::{tower_generate, TowerKind, TowerSpec};

pub(crate) type SparseVec = BTreeMap<CanonKey, Rat>;

/// A finitely presented exponent subspace: the rational span of finitely many
/// independent finite-form surreals.
#[derive(Clone)]
pub struct SubspaceSpec {
    basis: Vec<Surreal>,
    vectors: Vec<SparseVec>,
}

impl SubspaceSpec {
    pub fn empty() -> Self {
        SubspaceSpec { basis: Vec::new(), vectors: Vec::new() }
    }

    /// Build a subspace from basis elements, rejecting dependent ones.
    pub fn new(basis: Vec<Surreal>, b: &Budget) -> KResult<Self> {
        let mut out = SubspaceSpec::empty();
        for e in basis {
            if !out.try_extend(&e, b)? {
                return Err(KernelError::Unsupported("dependent basis for a subspace"));
            }
        }
        Ok(out)
    }

    pub fn basis(&self) -> &[Surreal] {
        &self.basis
    }

    /// Exact rational-span membership of a finite-form surreal.
    pub fn contains(&self, e: &Surreal, b: &Budget) -> KResult<bool> {
        let v = to_vector(e, b)?;
        Ok(linalg::in_span(&self.vectors, &v))
    }

    /// Add `e` to the basis unless it is already in the span; returns whether
    /// the basis grew.
    pub fn try_extend(&mut self, e: &Surreal, b: &Budget) -> KResult<bool> {
        let v = to_vector(e, b)?;
        if linalg::in_span(&self.vectors, &v) {
            return Ok(false);
        }
        self.basis.push(e.clone());
        self.vectors.push(v);
        Ok(true)
    }
}

/// Flatten a finite form into a sparse rational vector keyed by the canonical
/// forms of its exponents.
pub(crate) fn to_vector(x: &Surreal, b: &Budget) -> KResult<SparseVec> {
    let p = x.prefix(b)?;
    if !p.complete {
        return Err(KernelError::BudgetExhausted { forced: p.terms.len() });
    }
    let mut v = SparseVec::new();
    for t in &p.terms {
        let key = t.exp.canonical_key(b)?;
        let c = t
            .coeff
            .as_exact()
            .cloned()
            .ok_or(KernelError::Unsupported("refinable coefficient in exact linear algebra"))?;
        v.insert(key, c);
    }
    Ok(v)
}

/// The development of `y` over the subspace: the longest prefix of the term
/// stream whose exponents lie in the span (lazy; it is a truncation of `y`).
pub fn development(y: &Surreal, delta: &SubspaceSpec, _b: &Budget) -> Surreal {
    let delta = delta.clone();
    take_while_terms(y.clone(), move |t, fctx: &mut ForceCtx| {
        delta.contains(&t.exp, &fctx.budget)
    })
}

/// One recorded step of a path.
#[derive(Clone)]
pub struct PathStep {
    pub y: Surreal,
    pub d: Surreal,
    pub sign: i8,
    pub v: Surreal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Budget,
    Cycle,
    AtomicConfirmed,
}

#[derive(Clone)]
pub struct PathTrace {
    pub steps: Vec<PathStep>,
    pub terminated: Termination,
}

impl PathTrace {
    pub fn to_json(&self, b: &Budget) -> KResult<serde_json::Value> {
        let mut steps = Vec::new();
        for s in &self.steps {
            steps.push(serde_json::json!({
                "y": s.y.to_text(b)?,
                "d": s.d.to_text(b)?,
                "sign": s.sign,
                "v": s.v.to_text(b)?,
            }));
        }
        Ok(serde_json::json!({
            "steps": steps,
            "terminated": self.terminated,
        }))
    }
}

/// Iterate `y_{n+1} = |log(y_n) - development(log(y_n))|` for up to `n_max`
/// steps, recording each stage.
pub fn delta_path(
    ctx: &Arc<ExpLogCtx>,
    y: &Surreal,
    delta: &SubspaceSpec,
    n_max: usize,
    b: &Budget,
) -> KResult<PathTrace> {
    if !y.is_positive_infinite(b)? {
        return Err(KernelError::Unsupported("path origin must be positive infinite"));
    }
    if delta.contains(&y.valuation(b)?, b)? {
        return Err(KernelError::Unsupported("path origin valuation lies in the subspace"));
    }
    let mut steps: Vec<PathStep> = Vec::new();
    let mut seen: Vec<CanonKey> = Vec::new();
    let mut cur = y.clone();
    let mut terminated = Termination::Budget;
    for n in 0..=n_max {
        let v = cur.valuation(b)?;
        if let Ok(key) = cur.canonical_key(b) {
            if seen.contains(&key) {
                terminated = Termination::Cycle;
                break;
            }
            seen.push(key);
        }
        let l = log(ctx, &cur, b)?;
        // Development prefix of log(y_n), then the first excluded term gives
        // the sign of the remainder.
        let dev = development(&l, delta, b);
        let dev_prefix = dev.prefix(b)?;
        if !dev_prefix.complete {
            return Err(KernelError::BudgetExhausted { forced: dev_prefix.terms.len() });
        }
        let dev_len = dev_prefix.terms.len();
        let d = Surreal::from_terms(dev_prefix.terms);
        let remainder = l.tail_from(dev_len);
        let sign = match remainder.sign(b) {
            CmpResult::Greater => 1i8,
            CmpResult::Less => -1,
            CmpResult::Equal => {
                return Err(KernelError::Unsupported(
                    "path step vanished: log(y_n) lies in the subspace field",
                ))
            }
            CmpResult::Indeterminate(_) => {
                return Err(KernelError::FragmentExhausted { context: "path remainder sign" })
            }
        };
        steps.push(PathStep { y: cur.clone(), d, sign, v });
        if n == n_max {
            break;
        }
        cur = if sign > 0 { remainder } else { remainder.neg() };
    }
    if terminated == Termination::Budget && is_atomic_steps(&steps, b)? {
        terminated = Termination::AtomicConfirmed;
    }
    Ok(PathTrace { steps, terminated })
}

fn is_atomic_steps(steps: &[PathStep], b: &Budget) -> KResult<bool> {
    for s in steps {
        let p = s.y.prefix(b)?;
        if !(p.complete && p.terms.len() == 1 && p.terms[0].coeff.is_exact_one()) {
            return Ok(false);
        }
    }
    Ok(!steps.is_empty())
}

/// Atomicity of a recorded path: every stage is a monomial with coefficient
/// one.
pub fn is_atomic(trace: &PathTrace, b: &Budget) -> KResult<bool> {
    is_atomic_steps(&trace.steps, b)
}

/// Exact rational independence of the recorded valuations over the subspace.
pub fn check_independence(
    trace: &PathTrace,
    delta: &SubspaceSpec,
    b: &Budget,
) -> KResult<bool> {
    let mut vectors = delta.vectors.clone();
    for s in &trace.steps {
        let v = to_vector(&s.v, b)?;
        if linalg::in_span(&vectors, &v) {
            return Ok(false);
        }
        vectors.push(v);
    }
    Ok(true)
}

/// Bounded log-exp closure: repeatedly adjoin the exponents of `log(w^g)` for
/// `g` ranging over the basis and the valuations occurring in the sample,
/// for at most `iters` rounds or until stable. The result contains `delta`.
pub fn log_exp_closure(
    ctx: &Arc<ExpLogCtx>,
    delta: &SubspaceSpec,
    sample: &[Surreal],
    iters: usize,
    b: &Budget,
) -> KResult<SubspaceSpec> {
    let mut out = delta.clone();
    let mut pool: Vec<Surreal> = Vec::new();
    for s in sample {
        let p = s.prefix(b)?;
        for t in &p.terms {
            pool.push(t.exp.clone());
        }
    }
    pool.extend(out.basis.iter().cloned());
    for _ in 0..iters {
        let mut grew = false;
        let snapshot = pool.clone();
        for gamma in &snapshot {
            let image = log_leader(ctx, gamma);
            let p = image.prefix(b)?;
            if !p.complete {
                return Err(KernelError::BudgetExhausted { forced: p.terms.len() });
            }
            for t in &p.terms {
                if out.try_extend(&t.exp, b)? {
                    pool.push(t.exp.clone());
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
