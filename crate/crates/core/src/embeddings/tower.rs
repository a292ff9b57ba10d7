//! Bounded generation of exp/log towers over the rationals and omega.
//!
//! Three seeds: plain rational functions of omega, the same with an iterated
//! logarithm chain, and a sum-closed variant that also keeps truncations.
//! Each round closes under exp, log of provably positive elements, and
//! pairwise sums and products, deduplicating by exact form where available
//! and budgeted comparison otherwise. Enumeration order is deterministic.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{CmpResult, KResult};
use crate::exp_log::{exp, log, ExpLogCtx};
use crate::surreal::{CanonKey, Surreal};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerKind {
    /// Sum-closed tower: also closes under truncation of members.
    OmegaSeries,
    /// Exp-log tower seeded with rational functions of omega.
    LE,
    /// Exp-log tower seeded with the iterated-logarithm chain of omega.
    EL,
}

#[derive(Clone, Copy, Debug)]
pub struct TowerSpec {
    pub kind: TowerKind,
    pub depth: usize,
    pub size_bound: usize,
}

impl TowerSpec {
    pub fn new(kind: TowerKind, depth: usize, size_bound: usize) -> Self {
        assert!(depth >= 1 && size_bound >= 1);
        TowerSpec { kind, depth, size_bound }
    }
}

/// Generated elements, deterministic for a given spec and budget.
pub fn tower_generate(
    ctx: &Arc<ExpLogCtx>,
    spec: &TowerSpec,
    b: &Budget,
) -> KResult<Vec<Surreal>> {
    let mut set = TowerSet::new(spec.size_bound);
    // Seed: 0, 1, 2, 1/2 and omega.
    for q in ["0", "1", "2", "1/2"] {
        set.insert(Surreal::from_rat(q.parse().unwrap()), b);
    }
    set.insert(Surreal::omega(), b);
    if spec.kind == TowerKind::EL {
        let mut cur = Surreal::omega();
        for _ in 0..spec.depth {
            match log(ctx, &cur, b) {
                Ok(l) => {
                    set.insert(l.clone(), b);
                    cur = l;
                }
                Err(_) => break,
            }
        }
    }
    for _ in 0..spec.depth {
        let snapshot = set.elements.clone();
        for x in &snapshot {
            if set.full() {
                break;
            }
            if let Ok(e) = exp(ctx, x, b) {
                set.insert(e, b);
            }
            if x.sign(b) == CmpResult::Greater {
                if let Ok(l) = log(ctx, x, b) {
                    set.insert(l, b);
                }
            }
        }
        for x in &snapshot {
            for y in &snapshot {
                if set.full() {
                    break;
                }
                set.insert(x.add(y), b);
                set.insert(x.mul(y), b);
            }
        }
        if spec.kind == TowerKind::OmegaSeries {
            for x in &snapshot {
                if let Ok(p) = x.prefix(b) {
                    if p.complete {
                        for k in 1..p.terms.len() {
                            set.insert(Surreal::from_terms(p.terms[..k].to_vec()), b);
                        }
                    }
                }
            }
        }
        if set.full() {
            break;
        }
    }
    Ok(set.elements)
}

struct TowerSet {
    elements: Vec<Surreal>,
    keys: BTreeSet<CanonKey>,
    bound: usize,
}

impl TowerSet {
    fn new(bound: usize) -> Self {
        TowerSet { elements: Vec::new(), keys: BTreeSet::new(), bound }
    }

    fn full(&self) -> bool {
        self.elements.len() >= self.bound
    }

    /// Deduplicate by canonical key when the element is an exact finite form,
    /// falling back to budgeted comparison. Elements that cannot be decided
    /// distinct are kept (never merge unequal values).
    fn insert(&mut self, x: Surreal, b: &Budget) {
        if self.full() {
            return;
        }
        match x.canonical_key(b) {
            Ok(key) => {
                if self.keys.insert(key) {
                    self.elements.push(x);
                }
            }
            Err(_) => {
                for existing in &self.elements {
                    if x.compare(existing, b) == CmpResult::Equal {
                        return;
                    }
                }
                self.elements.push(x);
            }
        }
    }
}
