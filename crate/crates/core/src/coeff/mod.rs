//! Normal-form coefficients: exact rationals, exact rational multiples of pi,
//! and refinable reals.
//!
//! The pi-multiple variant exists so that angle reduction in the trig module
//! can divide out pi exactly; mixing a pi-multiple with anything else decays
//! to a refinable real.

mod rreal;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{CmpResult, KernelError, KResult, Undecided};

pub use rreal::{exp_rat_interval, ln_rat_interval, pi_interval, ArgSource, Interval, RReal};

/// Exact arbitrary-precision rational, always in lowest terms.
pub type Rat = num_rational::BigRational;

pub fn rat_from_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `2^e` as an exact rational (negative exponents allowed).
pub fn rat_pow2(e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::one() << e as u64)
    } else {
        Rat::new(BigInt::one(), BigInt::one() << (-e) as u64)
    }
}

pub fn rat_floor(q: &Rat) -> BigInt {
    q.floor().to_integer()
}

pub fn rat_is_integer(q: &Rat) -> bool {
    q.denom().is_one()
}

/// Dyadic means the denominator is a power of two.
pub fn rat_is_dyadic(q: &Rat) -> bool {
    let mut d = q.denom().clone();
    while d.is_even() {
        d >>= 1;
    }
    d.is_one()
}

use num_integer::Integer;

/// Checked exact division.
pub fn rat_div(a: &Rat, b: &Rat) -> KResult<Rat> {
    if b.is_zero() {
        return Err(KernelError::DivisionByZero);
    }
    Ok(a / b)
}

/// Precision ceiling for establishing nonzero witnesses at construction time.
pub const WITNESS_PREC_CAP: u32 = 512;

/// A normal-form coefficient.
#[derive(Clone, Debug)]
pub enum Coeff {
    /// An exact rational.
    Exact(Rat),
    /// Exactly `q * pi` with rational `q != 0`.
    PiTimes(Rat),
    /// A refinable real with a nonzero witness established at construction.
    Refinable(RReal),
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::Exact(Rat::zero())
    }

    pub fn one() -> Self {
        Coeff::Exact(Rat::one())
    }

    pub fn from_rat(q: Rat) -> Self {
        Coeff::Exact(q)
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::Exact(rat_from_int(n))
    }

    pub fn pi_times(q: Rat) -> Self {
        if q.is_zero() {
            Coeff::Exact(Rat::zero())
        } else {
            Coeff::PiTimes(q)
        }
    }

    /// Wrap a refinable real as a coefficient, establishing the mandatory
    /// nonzero witness. Fails if the interval cannot exclude zero within the
    /// construction cap.
    pub fn refinable(r: RReal) -> KResult<Self> {
        match r.sign_witness(WITNESS_PREC_CAP) {
            Some(_) => Ok(Coeff::Refinable(r)),
            None => Err(KernelError::IndeterminateCoeff {
                prec: WITNESS_PREC_CAP,
                context: "constructing a refinable coefficient",
            }),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Coeff::Exact(q) if q.is_zero())
    }

    pub fn is_exact_one(&self) -> bool {
        matches!(self, Coeff::Exact(q) if q.is_one())
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Coeff::Exact(q) => Some(q),
            _ => None,
        }
    }

    /// `Some(n)` iff the coefficient is exactly the integer `n`.
    /// Pi-multiples are never integers; for refinables the answer is `None`
    /// (unknowable) unless the interval refutes integrality, which callers
    /// detect through [`Coeff::integrality`].
    pub fn as_exact_integer(&self) -> Option<BigInt> {
        match self {
            Coeff::Exact(q) if rat_is_integer(q) => Some(q.numer().clone()),
            _ => None,
        }
    }

    /// Three-way integrality: Some(true)/Some(false) decided, None unknown.
    pub fn integrality(&self, prec: u32) -> Option<bool> {
        match self {
            Coeff::Exact(q) => Some(rat_is_integer(q)),
            // q*pi is irrational for q != 0.
            Coeff::PiTimes(_) => Some(false),
            Coeff::Refinable(r) => {
                let iv = r.approx(prec);
                let lo_ceil = iv.lo.ceil();
                if lo_ceil > iv.hi.floor() {
                    return Some(false); // no integer inside
                }
                None
            }
        }
    }

    /// View as a refinable argument for derived nodes.
    pub fn as_arg(&self) -> ArgSource {
        match self {
            Coeff::Exact(q) => ArgSource::Exact(q.clone()),
            Coeff::PiTimes(q) => ArgSource::PiTimes(q.clone()),
            Coeff::Refinable(r) => ArgSource::Real(r.clone()),
        }
    }

    pub fn interval(&self, k: u32) -> Interval {
        self.as_arg().approx(k)
    }

    /// Sign decided at up to `prec` bits: `None` when still ambiguous.
    pub fn sign(&self, prec: u32) -> Option<Ordering> {
        match self {
            Coeff::Exact(q) => Some(q.cmp(&Rat::zero())),
            Coeff::PiTimes(q) => Some(q.cmp(&Rat::zero())),
            Coeff::Refinable(r) => r.sign_witness(prec).map(|(s, _)| s),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Exact(q) => Coeff::Exact(-q),
            Coeff::PiTimes(q) => Coeff::PiTimes(-q),
            Coeff::Refinable(r) => Coeff::Refinable(r.neg_node()),
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a + b),
            (Coeff::PiTimes(a), Coeff::PiTimes(b)) => Coeff::pi_times(a + b),
            (Coeff::Refinable(a), Coeff::Refinable(b)) if a.is_negation_of(b) => Coeff::zero(),
            (a, b) => {
                if a.is_exact_zero() {
                    return b.clone();
                }
                if b.is_exact_zero() {
                    return a.clone();
                }
                Coeff::Refinable(RReal::add(a.as_arg(), b.as_arg()))
            }
        }
    }

    pub fn sub(&self, other: &Coeff) -> Coeff {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        // Unit and negation fast paths keep refinable node identity, which
        // is what lets later merges cancel `c + (-c)` exactly.
        if let Coeff::Exact(q) = self {
            if q.is_one() {
                return other.clone();
            }
            if *q == -Rat::one() {
                return other.neg();
            }
        }
        if let Coeff::Exact(q) = other {
            if q.is_one() {
                return self.clone();
            }
            if *q == -Rat::one() {
                return self.neg();
            }
        }
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a * b),
            (Coeff::Exact(a), Coeff::PiTimes(b)) | (Coeff::PiTimes(b), Coeff::Exact(a)) => {
                Coeff::pi_times(a * b)
            }
            (a, b) => {
                if a.is_exact_zero() || b.is_exact_zero() {
                    return Coeff::zero();
                }
                Coeff::Refinable(RReal::mul(a.as_arg(), b.as_arg()))
            }
        }
    }

    /// Multiplicative inverse; requires a nonzero coefficient.
    pub fn inv(&self) -> KResult<Coeff> {
        match self {
            Coeff::Exact(q) => {
                if q.is_zero() {
                    Err(KernelError::DivisionByZero)
                } else {
                    Ok(Coeff::Exact(q.recip()))
                }
            }
            Coeff::PiTimes(q) => {
                // 1/(q pi) is refinable.
                let r = RReal::recip(ArgSource::PiTimes(q.clone()), 8);
                Ok(Coeff::Refinable(r))
            }
            Coeff::Refinable(r) => {
                let (_, prec) = r
                    .sign_witness(WITNESS_PREC_CAP)
                    .ok_or(KernelError::DivisionByZero)?;
                Ok(Coeff::Refinable(RReal::recip(ArgSource::Real(r.clone()), prec)))
            }
        }
    }

    pub fn div(&self, other: &Coeff) -> KResult<Coeff> {
        match (self, other) {
            (Coeff::PiTimes(a), Coeff::PiTimes(b)) => {
                if b.is_zero() {
                    Err(KernelError::DivisionByZero)
                } else {
                    Ok(Coeff::Exact(a / b))
                }
            }
            (a, b) => Ok(a.mul(&b.inv()?)),
        }
    }

    /// Floor as an exact integer when decidable at `prec` bits.
    pub fn floor(&self, prec: u32) -> KResult<BigInt> {
        match self {
            Coeff::Exact(q) => Ok(rat_floor(q)),
            _ => {
                let mut k = 16;
                loop {
                    let iv = self.interval(k);
                    let f_lo = rat_floor(&iv.lo);
                    let f_hi = rat_floor(&iv.hi);
                    if f_lo == f_hi {
                        return Ok(f_lo);
                    }
                    if k >= prec {
                        return Err(KernelError::IndeterminateCoeff {
                            prec,
                            context: "taking the floor of a refinable coefficient",
                        });
                    }
                    k = (k * 2).min(prec);
                }
            }
        }
    }

    /// Compare two coefficients at up to `prec` bits.
    pub fn compare(&self, other: &Coeff, prec: u32) -> CmpResult {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => ordering_to_cmp(a.cmp(b)),
            (Coeff::PiTimes(a), Coeff::PiTimes(b)) => ordering_to_cmp(a.cmp(b)),
            (a, b) => {
                let mut k = 8;
                loop {
                    let ia = a.interval(k);
                    let ib = b.interval(k);
                    if ia.lo > ib.hi {
                        return CmpResult::Greater;
                    }
                    if ia.hi < ib.lo {
                        return CmpResult::Less;
                    }
                    if k >= prec {
                        return CmpResult::Indeterminate(Undecided::Coeff);
                    }
                    k = (k * 2).min(prec);
                }
            }
        }
    }

    /// Exact structural equality (used for finite-form identity, memo keys).
    /// Refinable coefficients are equal only when they are the same node.
    pub fn exact_eq(&self, other: &Coeff) -> bool {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => a == b,
            (Coeff::PiTimes(a), Coeff::PiTimes(b)) => a == b,
            (Coeff::Refinable(a), Coeff::Refinable(b)) => a.ptr_eq(b),
            _ => false,
        }
    }

    /// Decimal rendering: exact rationals verbatim, everything else as a
    /// `~`-prefixed approximation at a fixed precision (deterministic).
    pub fn to_text(&self) -> String {
        match self {
            Coeff::Exact(q) => format_rat(q),
            Coeff::PiTimes(q) => {
                if q.is_one() {
                    "pi".to_string()
                } else if *q == -Rat::one() {
                    "-pi".to_string()
                } else {
                    format!("{}*pi", format_rat(q))
                }
            }
            Coeff::Refinable(r) => format!("~{}", approx_decimal(&r.approx(64), 12)),
        }
    }
}

fn ordering_to_cmp(o: Ordering) -> CmpResult {
    match o {
        Ordering::Less => CmpResult::Less,
        Ordering::Equal => CmpResult::Equal,
        Ordering::Greater => CmpResult::Greater,
    }
}

pub fn format_rat(q: &Rat) -> String {
    if rat_is_integer(q) {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Deterministic decimal approximation of the interval midpoint.
fn approx_decimal(iv: &Interval, digits: u32) -> String {
    let mid = (&iv.lo + &iv.hi) / rat_from_int(2);
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (&mid * Rat::from_integer(scale.clone())).round().to_integer();
    let neg = scaled.is_negative();
    let abs = scaled.magnitude().to_string();
    let (int_part, frac_part) = if abs.len() > digits as usize {
        let split = abs.len() - digits as usize;
        (abs[..split].to_string(), abs[split..].to_string())
    } else {
        ("0".to_string(), format!("{:0>width$}", abs, width = digits as usize))
    };
    let frac = frac_part.trim_end_matches('0');
    let body = if frac.is_empty() {
        int_part
    } else {
        format!("{}.{}", int_part, frac)
    };
    if neg {
        format!("-{}", body)
    } else {
        body
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Named refinable constants exposed to the expression evaluator.
pub fn rreal_const(name: &str) -> Option<RReal> {
    match name {
        "pi" => Some(RReal::pi()),
        "e" => Some(RReal::e()),
        _ => None,
    }
}

/// Refinable elementary functions on coefficient arguments.
pub fn rreal_fn(name: &str, x: &Coeff) -> KResult<RReal> {
    let label = format!("{}({})", name, x.to_text());
    match name {
        "exp" => Ok(RReal::exp(label, x.as_arg())),
        "sin" => Ok(RReal::sin(label, x.as_arg())),
        "cos" => Ok(RReal::cos(label, x.as_arg())),
        "ln" => {
            let witness = match x.sign(WITNESS_PREC_CAP) {
                Some(Ordering::Greater) => 16,
                Some(_) => return Err(KernelError::NonPositive),
                None => {
                    return Err(KernelError::IndeterminateCoeff {
                        prec: WITNESS_PREC_CAP,
                        context: "ln of a coefficient that cannot be proven positive",
                    })
                }
            };
            Ok(RReal::ln(label, x.as_arg(), witness))
        }
        _ => Err(KernelError::Unsupported("unknown refinable function")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn rat(s: &str) -> Rat {
        Rat::from_str(s).unwrap()
    }

    #[test]
    fn rat_ops_basics() {
        assert_eq!(rat("1/2") + rat("1/2"), rat("1"));
        assert_eq!(rat_floor(&rat("7/2")), BigInt::from(3));
        assert_eq!(rat_floor(&rat("-7/2")), BigInt::from(-4));
        assert!(rat("1/3") < rat("1/2"));
        assert!(rat_div(&rat("1"), &rat("0")).is_err());
        assert_eq!(rat_div(&rat("3"), &rat("2")).unwrap(), rat("3/2"));
    }

    #[test]
    fn dyadic_detection() {
        assert!(rat_is_dyadic(&rat("3/8")));
        assert!(rat_is_dyadic(&rat("5")));
        assert!(!rat_is_dyadic(&rat("1/3")));
    }

    #[test]
    fn compare_exact_and_refinable() {
        let half = Coeff::from_rat(rat("1/2"));
        assert_eq!(half.compare(&Coeff::from_rat(rat("1/2")), 4), CmpResult::Equal);

        let pi = Coeff::refinable(RReal::pi()).unwrap();
        assert_eq!(pi.compare(&Coeff::from_int(3), 4), CmpResult::Greater);

        // Refinable equality is semi-decidable: two independent instances of
        // pi never separate.
        let pi2 = Coeff::refinable(RReal::pi()).unwrap();
        assert!(matches!(pi.compare(&pi2, 64), CmpResult::Indeterminate(_)));
    }

    #[test]
    fn pi_multiples_stay_exact() {
        let a = Coeff::pi_times(rat("3/2"));
        let b = Coeff::pi_times(rat("1"));
        let sum = a.add(&b);
        assert!(matches!(&sum, Coeff::PiTimes(q) if *q == rat("5/2")));
        let ratio = sum.div(&Coeff::pi_times(rat("2"))).unwrap();
        assert!(matches!(&ratio, Coeff::Exact(q) if *q == rat("5/4")));
        assert_eq!(a.compare(&b, 4), CmpResult::Greater);
    }

    #[test]
    fn pi_multiple_is_never_an_integer() {
        assert_eq!(Coeff::pi_times(rat("2")).integrality(32), Some(false));
    }

    #[test]
    fn floor_of_refinable() {
        let pi = Coeff::refinable(RReal::pi()).unwrap();
        assert_eq!(pi.floor(64).unwrap(), BigInt::from(3));
        let neg = pi.neg();
        assert_eq!(neg.floor(64).unwrap(), BigInt::from(-4));
    }

    #[test]
    fn refinable_constructor_requires_nonzero() {
        let zero = RReal::constant("0", Rat::zero());
        assert!(Coeff::refinable(zero).is_err());
    }

    #[test]
    fn compare_monotone_in_precision() {
        let pi = Coeff::refinable(RReal::pi()).unwrap();
        let lo = Coeff::from_rat(rat("311/99")); // about 3.1414 < pi
        let at4 = pi.compare(&lo, 4);
        let at64 = pi.compare(&lo, 64);
        assert_eq!(at64, CmpResult::Greater);
        if at4.decided() {
            assert_eq!(at4, at64);
        }
    }

    #[test]
    fn mixed_arithmetic_decays_to_refinable() {
        let x = Coeff::pi_times(rat("1")).add(&Coeff::from_int(1));
        assert!(matches!(x, Coeff::Refinable(_)));
        let iv = x.interval(32);
        // pi + 1 is about 4.14159
        assert!(iv.lo > rat("4") && iv.hi < rat("42/10"));
    }

    #[test]
    fn rreal_fn_exp_at_zero() {
        let r = rreal_fn("exp", &Coeff::zero()).unwrap();
        let iv = r.approx(32);
        assert!(iv.contains(&Rat::one()));
    }

    #[test]
    fn rreal_fn_sin_at_zero() {
        let r = rreal_fn("sin", &Coeff::zero()).unwrap();
        assert!(r.approx(32).contains(&Rat::zero()));
    }

    #[test]
    fn rreal_fn_ln_requires_positivity() {
        assert!(rreal_fn("ln", &Coeff::from_int(-1)).is_err());
        let ln2 = rreal_fn("ln", &Coeff::from_int(2)).unwrap();
        let iv = ln2.approx(40);
        assert!(iv.lo > rat("693/1000") && iv.hi < rat("6932/10000"));
    }

    #[test]
    fn coeff_text_forms() {
        assert_eq!(Coeff::from_rat(rat("-7/4")).to_text(), "-7/4");
        assert_eq!(Coeff::pi_times(rat("1")).to_text(), "pi");
        assert_eq!(Coeff::pi_times(rat("-3/2")).to_text(), "-3/2*pi");
    }
}
