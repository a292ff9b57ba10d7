//! Exact rational linear algebra over sparse vectors keyed by canonical
//! exponent forms. Small systems only; plain elimination.

use num_traits::Zero;

use super::SparseVec;
use crate::coeff::Rat;

/// Reduce `target` against `basis` (treated as a generating set); `true` when
/// the remainder vanishes.
pub(crate) fn in_span(basis: &[SparseVec], target: &SparseVec) -> bool {
    let mut rows: Vec<SparseVec> = basis.to_vec();
    echelonize(&mut rows);
    let mut t = target.clone();
    for row in &rows {
        reduce_against(&mut t, row);
    }
    t.values().all(|c| c.is_zero()) || t.is_empty()
}

fn leading_key(v: &SparseVec) -> Option<&crate::surreal::CanonKey> {
    v.iter().find(|(_, c)| !c.is_zero()).map(|(k, _)| k)
}

fn echelonize(rows: &mut Vec<SparseVec>) {
    let mut done: Vec<SparseVec> = Vec::new();
    while let Some(mut row) = rows.pop() {
        for d in &done {
            reduce_against(&mut row, d);
        }
        row.retain(|_, c| !c.is_zero());
        if !row.is_empty() {
            done.push(row);
        }
    }
    *rows = done;
}

/// Subtract the right multiple of `row` from `v` to clear `row`'s pivot.
fn reduce_against(v: &mut SparseVec, row: &SparseVec) {
    let pivot = match leading_key(row) {
        Some(k) => k.clone(),
        None => return,
    };
    let vc = match v.get(&pivot) {
        Some(c) if !c.is_zero() => c.clone(),
        _ => return,
    };
    let rc = row.get(&pivot).expect("pivot present").clone();
    let factor = vc / rc;
    for (k, c) in row {
        let delta = c * &factor;
        let entry = v.entry(k.clone()).or_insert_with(Rat::zero);
        *entry -= delta;
    }
    v.retain(|_, c| !c.is_zero());
}
