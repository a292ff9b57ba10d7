//! Canonical sine and cosine via the omnific-integer part, and the canonical
//! exponential on the complexification.
//!
//! Angles reduce modulo `2 pi` against the omnific integer part: the floor of
//! `x / (2 pi)` keeps its purely infinite component exactly, so infinite
//! angles like `w` reduce to exact residues. Rational multiples of pi in the
//! residue take exact table values; other real residues fall back to
//! refinable sine and cosine; infinitesimal residues use the Taylor tails and
//! the angle-addition formula.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::budget::Budget;
use crate::coeff::{rat_from_int, rreal_fn, Coeff, Rat};
use crate::error::{CmpResult, KernelError, KResult};
use crate::exp_log::{exp, ExpLogCtx};
use crate::simplicity::is_omnific;
use crate::surreal::{power_series, SeriesKind, Surreal};

/// An element of the complexification, as a pair of surreals.
#[derive(Clone)]
pub struct SurComplex {
    pub re: Surreal,
    pub im: Surreal,
}

impl SurComplex {
    pub fn new(re: Surreal, im: Surreal) -> Self {
        SurComplex { re, im }
    }

    pub fn from_real(re: Surreal) -> Self {
        SurComplex { re, im: Surreal::zero() }
    }

    pub fn to_text(&self, b: &Budget) -> KResult<String> {
        Ok(format!("{} + ({})i", self.re.to_text(b)?, self.im.to_text(b)?))
    }

    pub fn to_json(&self, b: &Budget) -> KResult<serde_json::Value> {
        Ok(serde_json::json!({ "re": self.re.to_text(b)?, "im": self.im.to_text(b)? }))
    }

    pub fn mul(&self, other: &SurComplex) -> SurComplex {
        SurComplex {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    pub fn add(&self, other: &SurComplex) -> SurComplex {
        SurComplex { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn eq_prefix(&self, other: &SurComplex, b: &Budget) -> bool {
        self.re.compare(&other.re, b) == CmpResult::Equal
            && self.im.compare(&other.im, b) == CmpResult::Equal
    }
}

/// The canonical integer part: `floor` against the omnific integers.
///
/// With `q = q_P + q_R + q_I`, the floor is `q_P + floor(q_R)`, minus one
/// when the real part is exactly an integer and the infinitesimal part is
/// negative.
pub fn oz_floor(q: &Surreal, b: &Budget) -> KResult<Surreal> {
    let d = q.decompose(b)?;
    let mut whole = d.real.floor(b.prec)?;
    let exact_integer = d.real.integrality(b.prec) == Some(true);
    if exact_integer {
        match d.infinitesimal.sign(b) {
            CmpResult::Less => whole -= BigInt::one(),
            CmpResult::Equal | CmpResult::Greater => {}
            CmpResult::Indeterminate(_) => {
                return Err(KernelError::FragmentExhausted {
                    context: "sign of the infinitesimal part in oz_floor",
                })
            }
        }
    }
    Ok(d.purely_infinite.add(&Surreal::from_rat(Rat::from_integer(whole))))
}

/// The residue of an angle: `x = 2 pi d + a` with `d` omnific and
/// `0 <= a < 2 pi`. The residue is assembled directly from the components,
/// never by subtracting streams, so exactness survives.
pub fn reduce_mod_2pi(x: &Surreal, b: &Budget) -> KResult<(Surreal, Surreal)> {
    let two_pi = Coeff::pi_times(rat_from_int(2));
    let t = x.scale_div(&two_pi)?;
    let td = t.decompose(b)?;
    let mut m = td.real.floor(b.prec)?;
    if td.real.integrality(b.prec) == Some(true) {
        match td.infinitesimal.sign(b) {
            CmpResult::Less => m -= BigInt::one(),
            CmpResult::Equal | CmpResult::Greater => {}
            CmpResult::Indeterminate(_) => {
                return Err(KernelError::FragmentExhausted {
                    context: "sign of the infinitesimal part in angle reduction",
                })
            }
        }
    }
    let m_rat = Rat::from_integer(m);
    let d = td.purely_infinite.add(&Surreal::from_rat(m_rat.clone()));
    // a = (x_R - 2 pi m) + x_I, from the original components.
    let xd = x.decompose(b)?;
    let a_real = xd.real.sub(&Coeff::pi_times(&m_rat * rat_from_int(2)));
    let a = Surreal::monomial(a_real, Surreal::zero()).add(&xd.infinitesimal);
    Ok((d, a))
}

/// Exact sine of `pi * q` where defined; `None` falls back to refinable.
fn sin_pi_table(q: &Rat) -> Option<Rat> {
    let two = rat_from_int(2);
    let mut r = q - (q / &two).floor() * &two; // q mod 2 in [0, 2)
    if r.is_negative() {
        r += &two;
    }
    let den = r.denom();
    if den == &BigInt::from(1) {
        return Some(Rat::zero()); // sin(0), sin(pi)
    }
    if den == &BigInt::from(2) {
        // r in {1/2, 3/2}
        return Some(if r.numer() == &BigInt::from(1) { Rat::one() } else { -Rat::one() });
    }
    if den == &BigInt::from(6) {
        let n = r.numer().clone();
        let half = Rat::new(1.into(), 2.into());
        return match u32::try_from(n).ok()? {
            1 | 5 => Some(half),
            7 | 11 => Some(-half),
            _ => None,
        };
    }
    None
}

/// Exact cosine of `pi * q` where defined.
fn cos_pi_table(q: &Rat) -> Option<Rat> {
    // cos(pi q) = sin(pi (q + 1/2)).
    sin_pi_table(&(q + Rat::new(1.into(), 2.into())))
}

/// Sine and cosine of the real residue as coefficients. Each component takes
/// its exact table value independently when the angle is a rational multiple
/// of pi with a recognized denominator.
fn sin_cos_of_real(rho: &Coeff) -> KResult<(Coeff, Coeff)> {
    match rho {
        Coeff::Exact(q) if q.is_zero() => Ok((Coeff::zero(), Coeff::one())),
        Coeff::PiTimes(q) => {
            let s = match sin_pi_table(q) {
                Some(v) => Coeff::Exact(v),
                None => Coeff::Refinable(rreal_fn("sin", rho)?),
            };
            let c = match cos_pi_table(q) {
                Some(v) => Coeff::Exact(v),
                None => Coeff::Refinable(rreal_fn("cos", rho)?),
            };
            Ok((s, c))
        }
        _ => Ok((
            Coeff::Refinable(rreal_fn("sin", rho)?),
            Coeff::Refinable(rreal_fn("cos", rho)?),
        )),
    }
}

/// Canonical sine: reduce by the omnific part, then apply angle addition to
/// the real-plus-infinitesimal residue.
pub fn sin(x: &Surreal, b: &Budget) -> KResult<Surreal> {
    let (_, a) = reduce_mod_2pi(x, b)?;
    let ad = a.decompose(b)?;
    let (s, c) = sin_cos_of_real(&ad.real)?;
    let eps = ad.infinitesimal;
    let sin_eps = power_series(eps.clone(), SeriesKind::SinTaylor);
    let cos_eps = power_series(eps, SeriesKind::CosTaylor);
    Ok(cos_eps.scale(&s).add(&sin_eps.scale(&c)))
}

/// Canonical cosine.
pub fn cos(x: &Surreal, b: &Budget) -> KResult<Surreal> {
    let (_, a) = reduce_mod_2pi(x, b)?;
    let ad = a.decompose(b)?;
    let (s, c) = sin_cos_of_real(&ad.real)?;
    let eps = ad.infinitesimal;
    let sin_eps = power_series(eps.clone(), SeriesKind::SinTaylor);
    let cos_eps = power_series(eps, SeriesKind::CosTaylor);
    Ok(cos_eps.scale(&c).sub(&sin_eps.scale(&s)))
}

/// The canonical exponential on the complexification:
/// `a + ib` maps to `exp(a) (cos b + i sin b)`.
pub fn cexp(ctx: &Arc<ExpLogCtx>, z: &SurComplex, b: &Budget) -> KResult<SurComplex> {
    let magnitude = exp(ctx, &z.re, b)?;
    let c = cos(&z.im, b)?;
    let s = sin(&z.im, b)?;
    Ok(SurComplex { re: magnitude.mul(&c), im: magnitude.mul(&s) })
}

/// Kernel membership: purely imaginary with `im / (2 pi)` omnific.
pub fn in_kernel(z: &SurComplex, b: &Budget) -> KResult<bool> {
    if !z.re.is_zero_exact(b)? {
        return Ok(false);
    }
    let scaled = z.im.scale_div(&Coeff::pi_times(rat_from_int(2)))?;
    is_omnific(&scaled, b)
}

/// A point of the fundamental strip: `re` free, `0 <= im < 2 pi`.
#[derive(Clone)]
pub struct StripPoint {
    re: Surreal,
    im: Surreal,
}

impl StripPoint {
    /// Budget-verified construction.
    pub fn new(re: Surreal, im: Surreal, b: &Budget) -> KResult<Self> {
        let two_pi = Surreal::monomial(Coeff::pi_times(rat_from_int(2)), Surreal::zero());
        let nonneg = matches!(im.sign(b), CmpResult::Greater | CmpResult::Equal);
        let below = im.compare(&two_pi, b) == CmpResult::Less;
        if !(nonneg && below) {
            return Err(KernelError::Unsupported("imaginary part outside [0, 2 pi)"));
        }
        Ok(StripPoint { re, im })
    }

    pub fn re(&self) -> &Surreal {
        &self.re
    }

    pub fn im(&self) -> &Surreal {
        &self.im
    }
}

/// The strip group law: real parts add, imaginary parts add modulo `2 pi`.
pub fn strip_mul(p: &StripPoint, q: &StripPoint, b: &Budget) -> KResult<StripPoint> {
    let re = p.re.add(&q.re);
    let im_sum = p.im.add(&q.im);
    let two_pi = Surreal::monomial(Coeff::pi_times(rat_from_int(2)), Surreal::zero());
    let im = match im_sum.compare(&two_pi, b) {
        CmpResult::Less => im_sum,
        CmpResult::Equal | CmpResult::Greater => im_sum.sub(&two_pi),
        CmpResult::Indeterminate(_) => {
            return Err(KernelError::FragmentExhausted {
                context: "strip bound comparison undecided",
            })
        }
    };
    StripPoint::new(re, im, b)
}

#[cfg(test)]
mod tests;
