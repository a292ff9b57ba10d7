//! Refinable (computable) reals: nested rational intervals on demand.
//!
//! An [`RReal`] answers precision queries: `approx(k)` returns a rational
//! interval of width at most `2^-k` containing the value. Queries memoize the
//! tightest interval seen so far, and every new interval is intersected with
//! the cached one, so refinement is monotone and concurrent refiners agree.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{rat_from_int, rat_pow2, Rat};

/// A closed rational interval `[lo, hi]`, `lo <= hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn point(v: Rat) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn strictly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn excludes_zero(&self) -> bool {
        self.strictly_positive() || self.strictly_negative()
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi <= other.hi { self.hi.clone() } else { other.hi.clone() };
        assert!(lo <= hi, "refinable real produced inconsistent intervals");
        Interval { lo, hi }
    }

    /// Round endpoints outward to denominator `2^bits`, keeping containment
    /// while bounding coefficient growth in later arithmetic.
    fn round_out(&self, bits: u32) -> Interval {
        Interval { lo: dyadic_round(&self.lo, bits, false), hi: dyadic_round(&self.hi, bits, true) }
    }

    fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / rat_from_int(2)
    }
}

/// Round `v` to a dyadic with denominator `2^bits`; `up` selects the direction.
fn dyadic_round(v: &Rat, bits: u32, up: bool) -> Rat {
    let scale = BigInt::one() << bits;
    let scaled = v * Rat::from_integer(scale.clone());
    let num = if up { scaled.ceil() } else { scaled.floor() };
    num / Rat::from_integer(scale)
}

type ComputeFn = Box<dyn Fn(u32) -> Interval + Send + Sync>;

struct RRealInner {
    name: String,
    cache: Mutex<Option<(u32, Interval)>>,
    compute: ComputeFn,
    /// Backlink to the node this one negates, so `c + (-c)` cancels exactly.
    neg_partner: Mutex<Option<std::sync::Weak<RRealInner>>>,
}

/// A refinable real number.
#[derive(Clone)]
pub struct RReal {
    inner: Arc<RRealInner>,
}

impl fmt::Debug for RReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RReal({})", self.inner.name)
    }
}

impl RReal {
    pub fn from_fn(name: impl Into<String>, compute: ComputeFn) -> Self {
        RReal {
            inner: Arc::new(RRealInner {
                name: name.into(),
                cache: Mutex::new(None),
                compute,
                neg_partner: Mutex::new(None),
            }),
        }
    }

    /// Negation with a cached partner link in both directions.
    pub fn neg_node(&self) -> RReal {
        {
            let guard = self.inner.neg_partner.lock().unwrap();
            if let Some(weak) = guard.as_ref() {
                if let Some(partner) = weak.upgrade() {
                    return RReal { inner: partner };
                }
            }
        }
        let out = RReal::neg(ArgSource::Real(self.clone()));
        *self.inner.neg_partner.lock().unwrap() = Some(Arc::downgrade(&out.inner));
        *out.inner.neg_partner.lock().unwrap() = Some(Arc::downgrade(&self.inner));
        out
    }

    /// True when one node is the recorded negation of the other.
    pub fn is_negation_of(&self, other: &RReal) -> bool {
        let check = |a: &RReal, b: &RReal| {
            a.inner
                .neg_partner
                .lock()
                .unwrap()
                .as_ref()
                .and_then(|w| w.upgrade())
                .map(|p| Arc::ptr_eq(&p, &b.inner))
                .unwrap_or(false)
        };
        check(self, other) || check(other, self)
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    /// Same underlying node, hence trivially the same value.
    pub fn ptr_eq(&self, other: &RReal) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    /// Interval of width at most `2^-k` containing the value. Nested: the
    /// returned interval is contained in every interval previously returned.
    pub fn approx(&self, k: u32) -> Interval {
        {
            let cache = self.inner.cache.lock().unwrap();
            if let Some((prec, iv)) = cache.as_ref() {
                if *prec >= k {
                    return iv.clone();
                }
            }
        }
        // Compute outside the lock: children of derived nodes take their own
        // locks during `compute`.
        let fresh = (self.inner.compute)(k).round_out(k + 8);
        debug_assert!(fresh.width() <= rat_pow2(-(k as i64)), "compute() broke its width contract");
        let mut cache = self.inner.cache.lock().unwrap();
        let merged = match cache.take() {
            Some((_, old)) => fresh.intersect(&old),
            None => fresh,
        };
        *cache = Some((k, merged.clone()));
        merged
    }

    /// Refine until the interval excludes zero; `None` if `max_prec` is hit.
    pub fn sign_witness(&self, max_prec: u32) -> Option<(std::cmp::Ordering, u32)> {
        let mut k = 8;
        loop {
            let iv = self.approx(k);
            if iv.strictly_positive() {
                return Some((std::cmp::Ordering::Greater, k));
            }
            if iv.strictly_negative() {
                return Some((std::cmp::Ordering::Less, k));
            }
            if k >= max_prec {
                return None;
            }
            k = (k * 2).min(max_prec);
        }
    }

    pub fn constant(name: impl Into<String>, v: Rat) -> Self {
        RReal::from_fn(name, Box::new(move |_| Interval::point(v.clone())))
    }

    pub fn pi() -> Self {
        RReal::from_fn("pi", Box::new(pi_interval))
    }

    pub fn e() -> Self {
        let one = RReal::constant("1", Rat::one());
        RReal::exp("e", ArgSource::Real(one))
    }

    pub fn add(a: ArgSource, b: ArgSource) -> Self {
        let name = format!("({}+{})", a.label(), b.label());
        RReal::from_fn(
            name,
            Box::new(move |k| {
                let ia = a.approx(k + 2);
                let ib = b.approx(k + 2);
                Interval::new(ia.lo + ib.lo, ia.hi + ib.hi)
            }),
        )
    }

    pub fn neg(a: ArgSource) -> Self {
        let name = format!("(-{})", a.label());
        RReal::from_fn(
            name,
            Box::new(move |k| {
                let ia = a.approx(k);
                Interval::new(-ia.hi, -ia.lo)
            }),
        )
    }

    pub fn mul(a: ArgSource, b: ArgSource) -> Self {
        let name = format!("({}*{})", a.label(), b.label());
        RReal::from_fn(
            name,
            Box::new(move |k| {
                // Pick precision so |a|·wb + |b|·wa stays within 2^-k.
                let coarse_a = a.approx(4);
                let coarse_b = b.approx(4);
                let mag =
                    |iv: &Interval| iv.lo.abs().max(iv.hi.abs()).ceil().to_integer().bits() as u32;
                let slack = mag(&coarse_a) + mag(&coarse_b) + 4;
                let ia = a.approx(k + slack);
                let ib = b.approx(k + slack);
                let corners = [
                    &ia.lo * &ib.lo,
                    &ia.lo * &ib.hi,
                    &ia.hi * &ib.lo,
                    &ia.hi * &ib.hi,
                ];
                let mut lo = corners[0].clone();
                let mut hi = corners[0].clone();
                for c in &corners[1..] {
                    if c < &lo {
                        lo = c.clone();
                    }
                    if c > &hi {
                        hi = c.clone();
                    }
                }
                Interval::new(lo, hi)
            }),
        )
    }

    /// Reciprocal of a value whose sign witness the caller has established.
    pub fn recip(a: ArgSource, witness_prec: u32) -> Self {
        let name = format!("(1/{})", a.label());
        RReal::from_fn(
            name,
            Box::new(move |k| {
                let mut p = witness_prec;
                loop {
                    let ia = a.approx(p);
                    if ia.excludes_zero() {
                        // width(1/x) <= w / lo_abs^2
                        let lo_abs = ia.lo.abs().min(ia.hi.abs());
                        let target = rat_pow2(-(k as i64)) * &lo_abs * &lo_abs;
                        if ia.width() <= target {
                            let (lo, hi) = (ia.hi.recip(), ia.lo.recip());
                            return if lo <= hi { Interval::new(lo, hi) } else { Interval::new(hi, lo) };
                        }
                    }
                    p = p.saturating_mul(2).max(p + 8);
                }
            }),
        )
    }

    pub fn exp(name: impl Into<String>, a: ArgSource) -> Self {
        RReal::from_fn(
            name,
            Box::new(move |k| {
                let mut p = k + 8;
                loop {
                    let ia = a.approx(p);
                    let lo = exp_rat_interval(&ia.lo, p);
                    let hi = exp_rat_interval(&ia.hi, p);
                    let out = Interval::new(lo.lo, hi.hi);
                    if out.width() <= rat_pow2(-(k as i64)) {
                        return out;
                    }
                    p += 16;
                }
            }),
        )
    }

    /// Natural log; the caller must have established positivity.
    pub fn ln(name: impl Into<String>, a: ArgSource, witness_prec: u32) -> Self {
        RReal::from_fn(
            name,
            Box::new(move |k| {
                let mut p = witness_prec.max(k + 8);
                loop {
                    let ia = a.approx(p);
                    if ia.strictly_positive() {
                        let lo = ln_rat_interval(&ia.lo, p);
                        let hi = ln_rat_interval(&ia.hi, p);
                        let out = Interval::new(lo.lo, hi.hi);
                        if out.width() <= rat_pow2(-(k as i64)) {
                            return out;
                        }
                    }
                    p += 16;
                }
            }),
        )
    }

    pub fn sin(name: impl Into<String>, a: ArgSource) -> Self {
        RReal::trig(name, a, true)
    }

    pub fn cos(name: impl Into<String>, a: ArgSource) -> Self {
        RReal::trig(name, a, false)
    }

    fn trig(name: impl Into<String>, a: ArgSource, is_sin: bool) -> Self {
        RReal::from_fn(
            name,
            Box::new(move |k| {
                let mut p = k + 8;
                loop {
                    let ia = a.approx(p);
                    let out = sincos_interval(&ia, p, is_sin);
                    if out.width() <= rat_pow2(-(k as i64)) {
                        return out;
                    }
                    p += 16;
                }
            }),
        )
    }
}

/// Argument to a derived refinable node: either another refinable or an exact
/// rational (possibly a rational multiple of pi).
#[derive(Clone)]
pub enum ArgSource {
    Exact(Rat),
    PiTimes(Rat),
    Real(RReal),
}

impl ArgSource {
    pub fn approx(&self, k: u32) -> Interval {
        match self {
            ArgSource::Exact(q) => Interval::point(q.clone()),
            ArgSource::PiTimes(q) => {
                let mag_bits = q.abs().ceil().to_integer().bits() as u32 + 2;
                let pi = pi_interval(k + mag_bits);
                let a = &pi.lo * q;
                let b = &pi.hi * q;
                if a <= b {
                    Interval::new(a, b)
                } else {
                    Interval::new(b, a)
                }
            }
            ArgSource::Real(r) => r.approx(k),
        }
    }

    fn label(&self) -> String {
        match self {
            ArgSource::Exact(q) => format!("{}", q),
            ArgSource::PiTimes(q) => format!("{}*pi", q),
            ArgSource::Real(r) => r.name().to_string(),
        }
    }
}

const PI_CACHE_NAME: &str = "pi";

/// Machin's formula with alternating-series tail bounds.
pub fn pi_interval(k: u32) -> Interval {
    use std::sync::OnceLock;
    static CACHE: OnceLock<Mutex<Option<(u32, Interval)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(None));
    {
        let guard = cache.lock().unwrap();
        if let Some((prec, iv)) = guard.as_ref() {
            if *prec >= k {
                return iv.clone();
            }
        }
    }
    let _ = PI_CACHE_NAME;
    let eps = rat_pow2(-(k as i64 + 2));
    let (a5, e5) = atan_inv_series(5, &(&eps / rat_from_int(32)));
    let (a239, e239) = atan_inv_series(239, &(&eps / rat_from_int(8)));
    let sixteen = rat_from_int(16);
    let four = rat_from_int(4);
    let centre = &sixteen * &a5 - &four * &a239;
    let err = &sixteen * &e5 + &four * &e239;
    let iv = Interval::new(&centre - &err, &centre + &err).round_out(k + 8);
    let mut guard = cache.lock().unwrap();
    let merged = match guard.take() {
        Some((_, old)) => iv.intersect(&old),
        None => iv,
    };
    *guard = Some((k, merged.clone()));
    merged
}

/// `atan(1/q)` as (partial sum, error bound); alternating series.
fn atan_inv_series(q: i64, eps: &Rat) -> (Rat, Rat) {
    let qr = rat_from_int(q);
    let q2 = &qr * &qr;
    let mut term = Rat::one() / qr; // 1/(q^(2j+1)) part
    let mut sum = Rat::zero();
    let mut j: i64 = 0;
    loop {
        let contrib = &term / rat_from_int(2 * j + 1);
        if &contrib <= eps {
            return (sum, contrib);
        }
        if j % 2 == 0 {
            sum += &contrib;
        } else {
            sum -= &contrib;
        }
        term = term / &q2;
        j += 1;
    }
}

/// `exp(x)` for rational `x`, interval of width about `2^-k`.
pub fn exp_rat_interval(x: &Rat, k: u32) -> Interval {
    if x.is_zero() {
        return Interval::point(Rat::one());
    }
    // Halve until |t| <= 1/2, Taylor, then square back up.
    let mut m = 0u32;
    let half = rat_pow2(-1);
    let mut t = x.clone();
    while t.abs() > half {
        t /= rat_from_int(2);
        m += 1;
    }
    // Squaring m times multiplies width by about (2 exp(|x|))^m; be generous.
    let guard_bits = (k as i64) + 4 * m as i64 + 8 + magnitude_bits(x) as i64;
    let eps = rat_pow2(-guard_bits);
    let (sum, tail) = exp_taylor_series(&t, &eps);
    let mut lo = &sum - &tail;
    let mut hi = &sum + &tail;
    if !lo.is_positive() {
        // exp(t) >= 1/2 for |t| <= 1/2; the tail bound keeps us well above 0,
        // but clamp defensively.
        lo = rat_pow2(-2);
    }
    for _ in 0..m {
        let l2 = &lo * &lo;
        let h2 = &hi * &hi;
        lo = l2;
        hi = h2;
    }
    Interval::new(lo, hi).round_out(k + 8)
}

fn magnitude_bits(x: &Rat) -> u32 {
    x.abs().ceil().to_integer().bits() as u32 + 1
}

/// Σ t^n/n! with a rigorous tail bound, valid for |t| <= 1/2.
fn exp_taylor_series(t: &Rat, eps: &Rat) -> (Rat, Rat) {
    let mut sum = Rat::one();
    let mut term = Rat::one();
    let mut n: u64 = 1;
    loop {
        term = &term * t / rat_from_int(n as i64);
        sum += &term;
        // Tail after degree n: sum_{j>n} |t|^j/j! <= |term| * |t| * 2 for |t| <= 1/2.
        let tail = term.abs() * t.abs() * rat_from_int(2);
        if &tail <= eps && n >= 2 {
            return (sum, tail);
        }
        n += 1;
    }
}

/// `ln(x)` for rational `x > 0`, interval of width about `2^-k`.
pub fn ln_rat_interval(x: &Rat, k: u32) -> Interval {
    assert!(x.is_positive(), "ln argument must be positive");
    let eps = rat_pow2(-(k as i64 + 4));
    // Normalize x = 2^m * y with y in [3/4, 3/2).
    let mut m: i64 = 0;
    let mut y = x.clone();
    let three_half = Rat::new(BigInt::from(3), BigInt::from(2));
    let three_quarter = Rat::new(BigInt::from(3), BigInt::from(4));
    while y >= three_half {
        y /= rat_from_int(2);
        m += 1;
    }
    while y < three_quarter {
        y *= rat_from_int(2);
        m -= 1;
    }
    let (ln_y, e_y) = atanh_ln(&y, &(&eps / rat_from_int(2)));
    if m == 0 {
        return Interval::new(&ln_y - &e_y, &ln_y + &e_y).round_out(k + 8);
    }
    let scale = rat_from_int(m.unsigned_abs() as i64 + 1);
    let (ln2, e2) = atanh_ln(&rat_from_int(2), &(&eps / (rat_from_int(2) * &scale)));
    let mr = rat_from_int(m);
    let centre = &mr * &ln2 + &ln_y;
    let err = mr.abs() * &e2 + &e_y;
    Interval::new(&centre - &err, &centre + &err).round_out(k + 8)
}

/// `ln(y) = 2 atanh((y-1)/(y+1))` with a geometric tail bound.
fn atanh_ln(y: &Rat, eps: &Rat) -> (Rat, Rat) {
    let u = (y - Rat::one()) / (y + Rat::one());
    let u2 = &u * &u;
    debug_assert!(u2 < Rat::new(BigInt::from(1), BigInt::from(2)));
    let mut term = u.clone();
    let mut sum = Rat::zero();
    let mut n: u64 = 0;
    loop {
        sum += &term / rat_from_int(2 * n as i64 + 1);
        term = &term * &u2;
        // Tail: sum_{j>n} |u|^(2j+1)/(2j+1) <= |term| / (1 - u^2) <= 2|term|.
        let tail = term.abs() * rat_from_int(2);
        if &tail <= eps {
            return (sum * rat_from_int(2), tail * rat_from_int(2));
        }
        n += 1;
    }
}

/// sin or cos over a rational interval, Lipschitz-1 midpoint evaluation.
fn sincos_interval(arg: &Interval, k: u32, is_sin: bool) -> Interval {
    let eps = rat_pow2(-(k as i64 + 4));
    // Reduce the midpoint by multiples of 2 pi so Taylor converges briskly.
    let mid = arg.mid();
    let pi = pi_interval(k + magnitude_bits(&mid) + 8);
    let two_pi_mid = &pi.lo + &pi.hi; // 2 * midpoint of pi interval
    let turns = (&mid / &two_pi_mid).round().to_integer();
    let turns_rat = Rat::from_integer(turns.clone());
    // t = mid - 2 pi n, with interval error |n| * width(2 pi).
    let red_err = turns_rat.abs() * (&pi.hi - &pi.lo) * rat_from_int(2);
    let t = &mid - Rat::from_integer(turns) * two_pi_mid;
    let (s, tail) = sincos_taylor(&t, &eps, is_sin);
    let half_width = arg.width() / rat_from_int(2);
    let err = tail + red_err + half_width;
    let lo = (&s - &err).max(rat_from_int(-1));
    let hi = (&s + &err).min(rat_from_int(1));
    Interval::new(lo, hi).round_out(k + 8)
}

/// Taylor series for sin/cos at a rational `t` with `|t| <= about 4`.
fn sincos_taylor(t: &Rat, eps: &Rat, is_sin: bool) -> (Rat, Rat) {
    let t2 = t * t;
    let mut sum;
    let mut term;
    let mut n: u64;
    if is_sin {
        sum = t.clone();
        term = t.clone();
        n = 1;
    } else {
        sum = Rat::one();
        term = Rat::one();
        n = 0;
    }
    loop {
        // next term: t^(n+2)/(n+2)! relative factor
        let denom = rat_from_int((n as i64 + 1) * (n as i64 + 2));
        term = &term * &t2 / denom;
        n += 2;
        if n % 4 == (if is_sin { 3 } else { 2 }) % 4 {
            sum -= &term;
        } else {
            sum += &term;
        }
        // Once (n+1)(n+2) >= 2 t^2 the tail is geometric with ratio <= 1/2.
        let next_ratio_ok = rat_from_int((n as i64 + 1) * (n as i64 + 2)) >= &t2 * rat_from_int(2);
        if next_ratio_ok {
            let tail = term.abs() * rat_from_int(2);
            if &tail <= eps {
                return (sum, tail);
            }
        }
    }
}

#[allow(dead_code)]
fn to_f64(v: &Rat) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
