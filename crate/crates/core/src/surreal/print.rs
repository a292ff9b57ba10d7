//! Canonical text form: `3*w^2 + 1/2 + 7*w^(-1) + w^(w^(-1))`.
//!
//! `w` denotes the first infinite ordinal, terms appear in decreasing
//! exponent order, and a stream cut off by the budget ends with an explicit
//! `+ ...[truncated@N]` marker. Integer exponents at least zero print without
//! parentheses; all other exponents are parenthesized subexpressions.

use num_traits::{Signed, Zero};

use crate::budget::Budget;
use crate::coeff::{format_rat, rat_is_integer, Coeff, Rat};
use crate::error::KResult;

use super::Surreal;

impl Surreal {
    /// Render the forced prefix in canonical text form.
    pub fn to_text(&self, b: &Budget) -> KResult<String> {
        let prefix = self.prefix(b)?;
        if prefix.terms.is_empty() {
            return Ok(if prefix.complete {
                "0".to_string()
            } else {
                "...[truncated@0]".to_string()
            });
        }
        let mut out = String::new();
        for (idx, term) in prefix.terms.iter().enumerate() {
            let (neg, magnitude) = sign_and_magnitude(&term.coeff);
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&term_body(&magnitude, &term.exp, b)?);
        }
        if !prefix.complete {
            out.push_str(&format!(" + ...[truncated@{}]", prefix.terms.len()));
        }
        Ok(out)
    }
}

fn sign_and_magnitude(c: &Coeff) -> (bool, String) {
    match c {
        Coeff::Exact(q) => (q.is_negative(), format_rat(&q.abs())),
        Coeff::PiTimes(q) => {
            let mag = q.abs();
            let body = if mag == Rat::from_integer(1.into()) {
                "pi".to_string()
            } else {
                format!("{}*pi", format_rat(&mag))
            };
            (q.is_negative(), body)
        }
        Coeff::Refinable(r) => match r.sign_witness(64) {
            Some((std::cmp::Ordering::Less, _)) => {
                let flipped = c.neg();
                (true, flipped.to_text().to_string())
            }
            _ => (false, c.to_text()),
        },
    }
}

fn term_body(magnitude: &str, exp: &Surreal, b: &Budget) -> KResult<String> {
    let small = Budget { max_terms: 4, ..*b };
    // Exponent zero: the bare coefficient.
    if let Some(q) = exp.to_rat(&small) {
        if q.is_zero() {
            return Ok(magnitude.to_string());
        }
        if rat_is_integer(&q) && q.is_positive() {
            let w_part = if q == Rat::from_integer(1.into()) {
                "w".to_string()
            } else {
                format!("w^{}", q.numer())
            };
            return Ok(apply_coeff(magnitude, &w_part));
        }
    }
    let inner = exp.to_text(b)?;
    Ok(apply_coeff(magnitude, &format!("w^({})", inner)))
}

fn apply_coeff(magnitude: &str, w_part: &str) -> String {
    if magnitude == "1" {
        w_part.to_string()
    } else {
        format!("{}*{}", magnitude, w_part)
    }
}
