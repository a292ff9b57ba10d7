use std::str::FromStr;

use super::*;use crate::error::CmpResult;

fn b() -> Budget {
    Budget::default_budget()
}

fn rat(s: &str) -> Rat {
    Rat::from_str(s).unwrap()
}

fn sur(q: &str) -> Surreal {
    Surreal::from_rat(rat(q))
}

fn text(x: &Surreal) -> String {
    x.to_text(&b()).unwrap()
}

#[test]
fn taylor_series_of_zero() {
    let e = exp_taylor(&Surreal::zero(), &b()).unwrap();
    assert_eq!(text(&e), "1");
}

#[test]
fn taylor_series_of_inverse_omega() {
    let eps = Surreal::omega_pow(sur("-1"));
    let e = exp_taylor(&eps, &b()).unwrap();
    let p = e.prefix(&Budget { max_terms: 4, ..b() }).unwrap();
    let expect = ["1", "1", "1/2", "1/6"];
    for (t, want) in p.terms.iter().zip(expect.iter()) {
        assert_eq!(&t.coeff.to_text(), want);
    }
}

#[test]
fn taylor_rejects_non_infinitesimal() {
    assert!(exp_taylor(&Surreal::one(), &b()).is_err());
    assert!(log1p(&Surreal::omega(), &b()).is_err());
}

#[test]
fn log1p_inverts_exp_taylor_prefixwise() {
    let eps = Surreal::omega_pow(sur("-1"));
    let e = exp_taylor(&eps, &b()).unwrap();
    let delta = e.sub(&Surreal::one());
    let back = log1p(&delta, &b()).unwrap();
    // First 8 forced terms must be exactly eps = w^(-1).
    let p = back.prefix(&Budget { max_terms: 8, ..b() }).unwrap();
    assert_eq!(p.terms.len(), 1, "{:?}", p.terms.len());
    assert!(p.complete || p.terms.len() == 1);
    assert_eq!(text(&Surreal::from_terms(p.terms)), "w^(-1)");
}

#[test]
fn h_golden_values() {
    let ctx = ExpLogCtx::new();
    assert_eq!(text(&h_map(&ctx, &Surreal::zero(), &b()).unwrap()), "w^(-1)");
    assert_eq!(text(&h_map(&ctx, &Surreal::one(), &b()).unwrap()), "1");
    assert_eq!(text(&h_map(&ctx, &sur("2"), &b()).unwrap()), "2");
    assert_eq!(text(&h_map(&ctx, &sur("-1"), &b()).unwrap()), "w^(-2)");
    // Further fragment values.
    assert_eq!(text(&h_map(&ctx, &sur("1/2"), &b()).unwrap()), "1/2");
    assert_eq!(text(&h_map(&ctx, &sur("-2"), &b()).unwrap()), "w^(-3)");
    assert_eq!(text(&h_map(&ctx, &Surreal::omega(), &b()).unwrap()), "w");
}

/// Independent oracle for the h goldens: enumerate small candidates and check
/// that every strictly simpler one violates the defining cut.
#[test]
fn h_goldens_survive_tree_descent_oracle() {
    let ctx = ExpLogCtx::new();
    // Candidate pool: c * w^e for dyadic c of birthday <= 6 and integer
    // exponents -3..=3, plus plain dyadics. Birthday proxy: (|e|-weighted,
    // coefficient birthday) lexicographically, which respects simplicity
    // within this family.
    let dyadics = crate::simplicity::tests::dyadics_to_birthday(6);
    struct Cand {
        value: Surreal,
        rank: (u64, u64),
    }
    let mut pool = Vec::new();
    for (c, day) in &dyadics {
        if c == &rat("0") {
            continue;
        }
        for e in -3i64..=3 {
            let value = Surreal::monomial(Coeff::from_rat(c.clone()), sur(&e.to_string()));
            let weight = if e == 0 { 0 } else { e.unsigned_abs() };
            pool.push(Cand { value, rank: (weight, *day) });
        }
    }
    pool.push(Cand { value: Surreal::zero(), rank: (0, 0) });

    // (argument, lo, hi-as-valuation) for the four goldens.
    let cases: Vec<(Surreal, Surreal, Option<Surreal>, Surreal)> = vec![
        // h(0): cut (0, .) with result < (1/k) w^0; expected w^(-1).
        (Surreal::zero(), Surreal::zero(), None, Surreal::omega_pow(sur("-1"))),
        // h(1): cut (h(0), .) with result < (1/k) w; expected 1.
        (Surreal::one(), Surreal::omega_pow(sur("-1")), None, Surreal::one()),
        // h(2): cut (h(1), .) under w^2; expected 2.
        (sur("2"), Surreal::one(), None, sur("2")),
        // h(-1): cut (0, h(0)) under w^(-1); expected w^(-2).
        (sur("-1"), Surreal::zero(), Some(Surreal::omega_pow(sur("-1"))), Surreal::omega_pow(sur("-2"))),
    ];
    for (arg, lo, hi, expected) in cases {
        let got = h_map(&ctx, &arg, &b()).unwrap();
        assert_eq!(got.compare(&expected, &b()), CmpResult::Equal);
        let vu = arg.clone();
        let in_cut = |x: &Surreal| -> bool {
            if x.compare(&lo, &b()) != CmpResult::Greater {
                return false;
            }
            if let Some(h) = &hi {
                if x.compare(h, &b()) != CmpResult::Less {
                    return false;
                }
            }
            // x must be < (1/k) w^vu for all k: leading exponent < vu.
            match x.leading(&b()) {
                Err(_) => false, // zero: never admissible here (demands > lo >= 0)
                Ok(t) => t.exp.compare(&vu, &b()) == CmpResult::Less,
            }
        };
        assert!(in_cut(&got), "golden h({}) not in its own cut", text(&arg));
        // Find the expected value's rank in the pool, then check everything
        // strictly simpler fails the cut.
        let got_rank = pool
            .iter()
            .find(|c| c.value.compare(&got, &b()) == CmpResult::Equal)
            .map(|c| c.rank)
            .expect("golden value inside the candidate pool");
        for cand in &pool {
            if cand.rank < got_rank {
                assert!(
                    !in_cut(&cand.value),
                    "candidate {} is simpler than h({}) yet realizes the cut",
                    text(&cand.value),
                    text(&arg)
                );
            }
        }
    }
}

#[test]
fn h_is_strictly_increasing_on_memo() {
    let ctx = ExpLogCtx::new();
    for s in ["-2", "-1", "-1/2", "0", "1/2", "1", "3/2", "2", "3"] {
        let _ = h_map(&ctx, &sur(s), &b()).unwrap();
    }
    let _ = h_map(&ctx, &Surreal::omega(), &b()).unwrap();
    let pairs = ctx.h_memo_snapshot();
    for (s1, v1) in &pairs {
        for (s2, v2) in &pairs {
            let cs = s1.compare(s2, &b());
            if cs == CmpResult::Less {
                assert_eq!(
                    v1.compare(v2, &b()),
                    CmpResult::Less,
                    "h not increasing between {} and {}",
                    text(s1),
                    text(s2)
                );
            }
        }
    }
}

#[test]
fn g_golden_values() {
    let ctx = ExpLogCtx::new();
    assert_eq!(text(&g_map(&ctx, &Surreal::one(), &b()).unwrap()), "1");
    assert_eq!(text(&g_map(&ctx, &Surreal::omega_pow(sur("-1")), &b()).unwrap()), "0");
    assert_eq!(text(&g_map(&ctx, &sur("2"), &b()).unwrap()), "2");
    // The ladder jump: g(w) requires passing all the naturals.
    assert_eq!(text(&g_map(&ctx, &Surreal::omega(), &b()).unwrap()), "w");
    assert!(g_map(&ctx, &sur("-1"), &b()).is_err());
}

#[test]
fn h_and_g_invert_each_other_on_memo() {
    let ctx = ExpLogCtx::new();
    for s in ["-2", "-1", "0", "1/2", "1", "2"] {
        let hv = h_map(&ctx, &sur(s), &b()).unwrap();
        let back = g_map(&ctx, &hv, &b()).unwrap();
        assert_eq!(back.compare(&sur(s), &b()), CmpResult::Equal, "g(h({})) != {}", s, s);
    }
    for (bv, gv) in ctx.g_memo_snapshot() {
        let forward = h_map(&ctx, &gv, &b()).unwrap();
        assert_eq!(forward.compare(&bv, &b()), CmpResult::Equal, "h(g(b)) != b");
    }
}

#[test]
fn log_leader_golden_values() {
    let ctx = ExpLogCtx::new();
    // log 1 = 0.
    assert_eq!(text(&log_leader(&ctx, &Surreal::zero())), "0");
    // log w = w^(1/w).
    let lw = log_leader(&ctx, &Surreal::one());
    assert_eq!(text(&lw), "w^(w^(-1))");
    // log w^w = w.
    let lww = log_leader(&ctx, &Surreal::omega());
    assert_eq!(text(&lww), "w");
}

#[test]
fn exp_golden_values() {
    let ctx = ExpLogCtx::new();
    assert_eq!(text(&exp(&ctx, &Surreal::zero(), &b()).unwrap()), "1");
    // exp(w) = w^w.
    let ew = exp(&ctx, &Surreal::omega(), &b()).unwrap();
    assert_eq!(text(&ew), "w^(w)");
    // exp(2) = e^2 as a refinable coefficient at exponent zero.
    let e2 = exp(&ctx, &sur("2"), &b()).unwrap();
    let p = e2.prefix(&b()).unwrap();
    assert!(p.complete && p.terms.len() == 1);
    let iv = p.terms[0].coeff.interval(64);
    // e^2 = 7.38905609893065...
    assert!(iv.lo < rat("73890560989307/10000000000000"));
    assert!(iv.hi > rat("73890560989306/10000000000000"));
    assert!(p.terms[0].exp.is_zero_exact(&b()).unwrap());
}

#[test]
fn log_golden_values() {
    let ctx = ExpLogCtx::new();
    assert_eq!(text(&log(&ctx, &Surreal::one(), &b()).unwrap()), "0");
    let lw = log(&ctx, &Surreal::omega(), &b()).unwrap();
    assert_eq!(text(&lw), "w^(w^(-1))");
    // log log w = w^(w^(-2)).
    let llw = log(&ctx, &lw, &b()).unwrap();
    assert_eq!(text(&llw), "w^(w^(-2))");
    assert!(log(&ctx, &Surreal::zero(), &b()).is_err());
    assert!(log(&ctx, &Surreal::one().neg(), &b()).is_err());
}

#[test]
fn log_of_scaled_leader_splits_into_summands() {
    // log(e^2 * w) = w^(1/w) + 2 : leader part plus ln of the coefficient.
    let ctx = ExpLogCtx::new();
    let e2 = exp(&ctx, &sur("2"), &b()).unwrap();
    let x = e2.mul(&Surreal::omega());
    let lx = log(&ctx, &x, &b()).unwrap();
    let p = lx.prefix(&b()).unwrap();
    assert!(p.complete);
    assert_eq!(p.terms.len(), 2);
    // Leading term w^(1/w).
    assert!(p.terms[0].coeff.is_exact_one());
    // Constant term ln(e^2) overlaps 2.
    let iv = p.terms[1].coeff.interval(64);
    assert!(iv.contains(&rat("2")));
}

#[test]
fn exp_then_log_roundtrip_on_omega() {
    let ctx = ExpLogCtx::new();
    let ew = exp(&ctx, &Surreal::omega(), &b()).unwrap();
    let back = log(&ctx, &ew, &b()).unwrap();
    assert_eq!(back.compare(&Surreal::omega(), &b()), CmpResult::Equal);
    // And the other direction: exp(log w) = w.
    let lw = log(&ctx, &Surreal::omega(), &b()).unwrap();
    let there = exp(&ctx, &lw, &b()).unwrap();
    assert_eq!(there.compare(&Surreal::omega(), &b()), CmpResult::Equal);
}

#[test]
fn exp_of_purely_infinite_is_a_leader() {
    let ctx = ExpLogCtx::new();
    for x in [
        Surreal::omega(),
        Surreal::omega().scale(&Coeff::from_int(3)),
        Surreal::omega_pow(sur("2")),
        Surreal::omega_pow(sur("1/2")),
    ] {
        let e = exp(&ctx, &x, &b()).unwrap();
        let p = e.prefix(&b()).unwrap();
        assert!(p.complete && p.terms.len() == 1, "exp image not a single term");
        assert!(p.terms[0].coeff.is_exact_one(), "leader coefficient must be one");
    }
}

#[test]
fn exp_growth_beats_powers() {
    let ctx = ExpLogCtx::new();
    let samples = [
        Surreal::omega(),
        Surreal::omega().add(&sur("3")),
        Surreal::omega_pow(sur("1/2")),
        Surreal::omega().scale(&Coeff::from_rat(rat("1/2"))),
    ];
    for x in &samples {
        let e = exp(&ctx, x, &b()).unwrap();
        for n in 1..=5u32 {
            let xn = x.pow_u32(n);
            assert_eq!(
                e.compare(&xn, &b()),
                CmpResult::Greater,
                "exp(x) <= x^{} for {}",
                n,
                text(x)
            );
        }
    }
}

#[test]
fn exp_bracket_cross_check() {
    // For purely infinite x with known purely infinite predecessors, exp(x)
    // lies strictly between (exp x^L)(x - x^L)^n and exp(x^R)/((x^R - x)^n).
    let ctx = ExpLogCtx::new();
    let w = Surreal::omega();
    let cases: Vec<(Surreal, Vec<Surreal>, Vec<Surreal>)> = vec![
        // x = w: purely infinite left predecessor 0.
        (w.clone(), vec![Surreal::zero()], vec![]),
        // x = 2w: left predecessors 0 and w.
        (w.scale(&Coeff::from_int(2)), vec![Surreal::zero(), w.clone()], vec![]),
        // x = w/2: left 0, right w.
        (w.scale(&Coeff::from_rat(rat("1/2"))), vec![Surreal::zero()], vec![w.clone()]),
    ];
    for (x, lefts, rights) in cases {
        let ex = exp(&ctx, &x, &b()).unwrap();
        for xl in &lefts {
            let exl = exp(&ctx, xl, &b()).unwrap();
            let diff = x.sub(xl);
            for n in 1..=4u32 {
                let option = exl.mul(&diff.pow_u32(n));
                assert_eq!(ex.compare(&option, &b()), CmpResult::Greater);
            }
        }
        for xr in &rights {
            let exr = exp(&ctx, xr, &b()).unwrap();
            let diff = xr.sub(&x);
            for n in 1..=4u32 {
                let option = exr.mul(&diff.pow_u32(n).inv(&b()).unwrap());
                assert_eq!(ex.compare(&option, &b()), CmpResult::Less);
            }
        }
    }
}

#[test]
fn exp_is_monotone_on_samples() {
    let ctx = ExpLogCtx::new();
    let mut samples = vec![
        Surreal::zero(),
        sur("1"),
        sur("-3/2"),
        Surreal::omega_pow(sur("-1")),
        Surreal::omega(),
        Surreal::omega().add(&sur("1")),
        Surreal::omega().neg(),
    ];
    samples.sort_by(|a, c| match a.compare(c, &b()) {
        CmpResult::Less => std::cmp::Ordering::Less,
        CmpResult::Greater => std::cmp::Ordering::Greater,
        _ => std::cmp::Ordering::Equal,
    });
    let images: Vec<Surreal> =
        samples.iter().map(|x| exp(&ctx, x, &b()).unwrap()).collect();
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if samples[i].compare(&samples[j], &b()) == CmpResult::Less {
                assert_eq!(images[i].compare(&images[j], &b()), CmpResult::Less);
            }
        }
    }
}

