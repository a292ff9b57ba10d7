use std::str::FromStr;

use super::*;

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

fn pi_multiple(q: &str) -> Surreal {
    Surreal::monomial(Coeff::pi_times(rat(q)), Surreal::zero())
}

#[test]
fn oz_floor_examples() {
    assert_eq!(text(&oz_floor(&sur("7/2"), &b()).unwrap()), "3");
    // w/2 + 1/2 + w^(-1): the omnific part is w/2, floor(1/2) = 0.
    let x = Surreal::omega()
        .scale(&Coeff::from_rat(rat("1/2")))
        .add(&sur("1/2"))
        .add(&Surreal::omega_pow(sur("-1")));
    let d = oz_floor(&x, &b()).unwrap();
    assert_eq!(text(&d), "1/2*w");
    assert!(crate::simplicity::is_omnific(&d, &b()).unwrap());

    // Integer real part with a negative infinitesimal drops by one.
    let y = sur("2").add(&Surreal::omega_pow(sur("-1")).neg());
    assert_eq!(text(&oz_floor(&y, &b()).unwrap()), "1");

    // w/(2 pi) is its own floor.
    let z = Surreal::omega().scale_div(&Coeff::pi_times(rat("2"))).unwrap();
    let dz = oz_floor(&z, &b()).unwrap();
    assert_eq!(dz.compare(&z, &b()), CmpResult::Equal);
}

#[test]
fn oz_floor_contract_on_samples() {
    let samples = vec![
        sur("7/2"),
        sur("-7/2"),
        Surreal::omega().add(&sur("5/4")),
        Surreal::omega().scale(&Coeff::from_rat(rat("1/2"))).add(&Surreal::omega_pow(sur("-2"))),
        sur("3").add(&Surreal::omega_pow(sur("-1")).neg()),
        Surreal::omega_pow(sur("2")).add(&Surreal::omega().neg()).add(&sur("-1/2")),
    ];
    let one = Surreal::one();
    for q in &samples {
        let d = oz_floor(q, &b()).unwrap();
        assert!(crate::simplicity::is_omnific(&d, &b()).unwrap(), "floor not omnific");
        assert!(
            matches!(q.compare(&d, &b()), CmpResult::Greater | CmpResult::Equal),
            "d > q for {}",
            text(q)
        );
        assert_eq!(q.compare(&d.add(&one), &b()), CmpResult::Less, "q >= d + 1 for {}", text(q));
    }
}

#[test]
fn reduction_examples() {
    // w reduces to angle zero with d = w/(2 pi).
    let (d, a) = reduce_mod_2pi(&Surreal::omega(), &b()).unwrap();
    assert!(a.is_zero_exact(&b()).unwrap());
    let expected_d = Surreal::omega().scale_div(&Coeff::pi_times(rat("2"))).unwrap();
    assert_eq!(d.compare(&expected_d, &b()), CmpResult::Equal);

    // 1 is already reduced.
    let (d1, a1) = reduce_mod_2pi(&Surreal::one(), &b()).unwrap();
    assert!(d1.is_zero_exact(&b()).unwrap());
    assert_eq!(text(&a1), "1");

    // -1 wraps: d = -1, a = 2 pi - 1.
    let (d2, a2) = reduce_mod_2pi(&sur("-1"), &b()).unwrap();
    assert_eq!(text(&d2), "-1");
    let expect = pi_multiple("2").sub(&Surreal::one());
    assert_eq!(a2.compare(&expect, &b()), CmpResult::Equal);
    // Bounds: 0 <= a < 2 pi.
    assert_eq!(a2.sign(&b()), CmpResult::Greater);
    assert_eq!(a2.compare(&pi_multiple("2"), &b()), CmpResult::Less);

    // Exact multiples of 2 pi reduce to zero with an exact integer floor.
    let (d3, a3) = reduce_mod_2pi(&pi_multiple("10"), &b()).unwrap();
    assert_eq!(text(&d3), "5");
    assert!(a3.is_zero_exact(&b()).unwrap());
}

#[test]
fn sin_cos_golden_values() {
    assert_eq!(text(&sin(&Surreal::zero(), &b()).unwrap()), "0");
    assert_eq!(text(&cos(&Surreal::zero(), &b()).unwrap()), "1");
    // sin w = 0 and cos w = 1, exactly.
    assert!(sin(&Surreal::omega(), &b()).unwrap().is_zero_exact(&b()).unwrap());
    assert_eq!(text(&cos(&Surreal::omega(), &b()).unwrap()), "1");
    // sin(pi) = 0 and cos(pi) = -1, exactly, via the symbolic table.
    assert!(sin(&pi_multiple("1"), &b()).unwrap().is_zero_exact(&b()).unwrap());
    assert_eq!(text(&cos(&pi_multiple("1"), &b()).unwrap()), "-1");
    assert_eq!(text(&sin(&pi_multiple("1/2"), &b()).unwrap()), "1");
    assert_eq!(text(&sin(&pi_multiple("1/6"), &b()).unwrap()), "1/2");
}

#[test]
fn sin_of_infinitesimal_is_taylor_tail() {
    let x = Surreal::omega_pow(sur("-1"));
    let s = sin(&x, &b()).unwrap();
    let p = s.prefix(&Budget { max_terms: 3, ..b() }).unwrap();
    assert_eq!(text(&Surreal::from_terms(p.terms.clone())), "w^(-1) - 1/6*w^(-3) + 1/120*w^(-5)");
}

#[test]
fn sin_periodicity_under_omnific_shifts() {
    // sin(x + 2 pi d) = sin(x) for omnific d.
    let shifts = vec![sur("3"), Surreal::omega(), Surreal::omega().scale(&Coeff::from_rat(rat("1/2")))];
    let xs = vec![Surreal::one(), sur("1/2"), Surreal::omega_pow(sur("-1"))];
    for x in &xs {
        let sx = sin(x, &b()).unwrap();
        for d in &shifts {
            let shifted = x.add(&d.scale(&Coeff::pi_times(rat("2"))));
            let s2 = sin(&shifted, &b()).unwrap();
            assert_eq!(
                s2.compare(&sx, &b()),
                CmpResult::Equal,
                "periodicity failed for {} with shift {}",
                text(x),
                text(d)
            );
        }
    }
}

#[test]
fn pythagorean_identity_prefixes() {
    let samples = vec![
        Surreal::zero(),
        Surreal::one(),
        Surreal::omega_pow(sur("-1")),
        Surreal::one().add(&Surreal::omega_pow(sur("-1"))),
        pi_multiple("1/2").add(&Surreal::omega_pow(sur("-2"))),
    ];
    let small = Budget { max_terms: 8, ..b() };
    for x in &samples {
        let s = sin(x, &b()).unwrap();
        let c = cos(x, &b()).unwrap();
        let total = s.mul(&s).add(&c.mul(&c));
        // sum - 1 must show no decidedly nonzero term in 8 forced terms.
        let diff = total.sub(&Surreal::one());
        match diff.prefix(&small) {
            Ok(p) => {
                for t in &p.terms {
                    if let Some(sign) = t.coeff.sign(32) {
                        assert_eq!(
                            sign,
                            std::cmp::Ordering::Equal,
                            "sin^2 + cos^2 != 1 at {}",
                            text(x)
                        );
                    }
                }
            }
            Err(KernelError::IndeterminateCoeff { .. }) => {
                // Refinable coefficients that cannot witness a sign are
                // consistent with zero.
            }
            Err(e) => panic!("unexpected failure: {e}"),
        }
    }
}

#[test]
fn cexp_golden_values() {
    let ctx = ExpLogCtx::new();
    // cexp(0) = 1.
    let one = cexp(&ctx, &SurComplex::from_real(Surreal::zero()), &b()).unwrap();
    assert_eq!(text(&one.re), "1");
    assert!(one.im.is_zero_exact(&b()).unwrap());

    // cexp(i w) = 1: w is in the kernel since w/(2 pi) is omnific.
    let iw = SurComplex::new(Surreal::zero(), Surreal::omega());
    let e = cexp(&ctx, &iw, &b()).unwrap();
    assert_eq!(text(&e.re), "1");
    assert!(e.im.is_zero_exact(&b()).unwrap());

    // cexp(i pi) = -1 exactly via the symbolic table.
    let ipi = SurComplex::new(Surreal::zero(), pi_multiple("1"));
    let m = cexp(&ctx, &ipi, &b()).unwrap();
    assert_eq!(text(&m.re), "-1");
    assert!(m.im.is_zero_exact(&b()).unwrap());
}

#[test]
fn kernel_membership() {
    // 2 pi i * 5.
    let z = SurComplex::new(Surreal::zero(), pi_multiple("10"));
    assert!(in_kernel(&z, &b()).unwrap());
    // i w.
    let iw = SurComplex::new(Surreal::zero(), Surreal::omega());
    assert!(in_kernel(&iw, &b()).unwrap());
    // i pi is not in the kernel: pi/(2 pi) = 1/2.
    let ipi = SurComplex::new(Surreal::zero(), pi_multiple("1"));
    assert!(!in_kernel(&ipi, &b()).unwrap());
    // Nonzero real part disqualifies.
    let z2 = SurComplex::new(Surreal::one(), pi_multiple("10"));
    assert!(!in_kernel(&z2, &b()).unwrap());
}

#[test]
fn kernel_members_map_to_one() {
    let ctx = ExpLogCtx::new();
    let kernel_samples = vec![
        pi_multiple("2"),
        pi_multiple("10"),
        pi_multiple("-4"),
        Surreal::omega(),
        Surreal::omega().scale(&Coeff::pi_times(rat("2"))),
    ];
    for im in kernel_samples {
        let z = SurComplex::new(Surreal::zero(), im.clone());
        assert!(in_kernel(&z, &b()).unwrap(), "not in kernel: {}", text(&im));
        let e = cexp(&ctx, &z, &b()).unwrap();
        assert_eq!(text(&e.re), "1", "cexp != 1 on kernel member {}", text(&im));
        assert!(e.im.is_zero_exact(&b()).unwrap());
    }
}

#[test]
fn cexp_restricted_to_reals_is_exp() {
    let ctx = ExpLogCtx::new();
    for x in [Surreal::omega(), sur("2"), Surreal::omega_pow(sur("-1"))] {
        let via_c = cexp(&ctx, &SurComplex::from_real(x.clone()), &b()).unwrap();
        let direct = exp(&ctx, &x, &b()).unwrap();
        assert_eq!(via_c.re.compare(&direct, &b()), CmpResult::Equal);
        assert!(via_c.im.is_zero_exact(&b()).unwrap());
    }
}

#[test]
fn cexp_homomorphism_on_samples() {
    let ctx = ExpLogCtx::new();
    let zs = vec![
        SurComplex::new(Surreal::one(), pi_multiple("1/2")),
        SurComplex::new(Surreal::zero(), pi_multiple("1")),
        SurComplex::new(sur("1/2"), pi_multiple("3/2")),
        SurComplex::new(Surreal::omega(), Surreal::zero()),
    ];
    for z in &zs {
        for w in &zs {
            let lhs = cexp(&ctx, &z.add(w), &b()).unwrap();
            let rhs = cexp(&ctx, z, &b()).unwrap().mul(&cexp(&ctx, w, &b()).unwrap());
            // Compare componentwise at the default budget; refinable
            // coefficients compare by interval overlap inside compare().
            let dr = lhs.re.sub(&rhs.re);
            let di = lhs.im.sub(&rhs.im);
            for d in [dr, di] {
                match d.prefix(&Budget { max_terms: 4, ..b() }) {
                    Ok(p) => {
                        for t in &p.terms {
                            if let Some(sign) = t.coeff.sign(32) {
                                assert_eq!(sign, std::cmp::Ordering::Equal);
                            }
                        }
                    }
                    Err(KernelError::IndeterminateCoeff { .. }) => {}
                    Err(e) => panic!("unexpected failure: {e}"),
                }
            }
        }
    }
}

#[test]
fn strip_group_law() {
    // Identity.
    let id = StripPoint::new(Surreal::zero(), Surreal::zero(), &b()).unwrap();
    let p = StripPoint::new(sur("2"), pi_multiple("1"), &b()).unwrap();
    let r = strip_mul(&id, &p, &b()).unwrap();
    assert_eq!(r.re().compare(p.re(), &b()), CmpResult::Equal);
    assert_eq!(r.im().compare(p.im(), &b()), CmpResult::Equal);

    // (3 pi / 2) + pi wraps to pi / 2.
    let a = StripPoint::new(Surreal::zero(), pi_multiple("3/2"), &b()).unwrap();
    let c = StripPoint::new(Surreal::zero(), pi_multiple("1"), &b()).unwrap();
    let m = strip_mul(&a, &c, &b()).unwrap();
    assert_eq!(m.im().compare(&pi_multiple("1/2"), &b()), CmpResult::Equal);

    // Out-of-range construction is rejected.
    assert!(StripPoint::new(Surreal::zero(), pi_multiple("2"), &b()).is_err());
    assert!(StripPoint::new(Surreal::zero(), sur("-1"), &b()).is_err());
}

#[test]
fn strip_associativity_samples() {
    let pts = vec![
        StripPoint::new(Surreal::zero(), pi_multiple("1/2"), &b()).unwrap(),
        StripPoint::new(sur("1"), pi_multiple("3/2"), &b()).unwrap(),
        StripPoint::new(sur("-2"), pi_multiple("1"), &b()).unwrap(),
        StripPoint::new(Surreal::omega(), pi_multiple("1/6"), &b()).unwrap(),
    ];
    for p in &pts {
        for q in &pts {
            for r in &pts {
                let left = strip_mul(&strip_mul(p, q, &b()).unwrap(), r, &b()).unwrap();
                let right = strip_mul(p, &strip_mul(q, r, &b()).unwrap(), &b()).unwrap();
                assert_eq!(left.re().compare(right.re(), &b()), CmpResult::Equal);
                assert_eq!(left.im().compare(right.im(), &b()), CmpResult::Equal);
            }
        }
    }
}

#[test]
fn surcomplex_serialization() {
    let z = SurComplex::new(Surreal::omega(), sur("1/2"));
    assert_eq!(z.to_text(&b()).unwrap(), "w + (1/2)i");
    let json = z.to_json(&b()).unwrap();
    assert_eq!(json["re"], "w");
    assert_eq!(json["im"], "1/2");
}
