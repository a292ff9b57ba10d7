use std::str::FromStr;

use super::*;
use crate::coeff::Coeff;

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
fn subspace_membership() {
    // span{2}: rational multiples of 2 include 1 and 1/2.
    let delta = SubspaceSpec::new(vec![sur("2")], &b()).unwrap();
    assert!(delta.contains(&sur("1"), &b()).unwrap());
    assert!(delta.contains(&sur("1/2"), &b()).unwrap());
    assert!(delta.contains(&Surreal::zero(), &b()).unwrap());
    assert!(!delta.contains(&Surreal::omega(), &b()).unwrap());

    // span{w}: no rational multiple gives 1.
    let dw = SubspaceSpec::new(vec![Surreal::omega()], &b()).unwrap();
    assert!(!dw.contains(&sur("1"), &b()).unwrap());
    assert!(dw.contains(&Surreal::omega().scale(&Coeff::from_rat(rat("2/3"))), &b()).unwrap());

    // Mixed combinations.
    let dm = SubspaceSpec::new(vec![Surreal::omega(), sur("1")], &b()).unwrap();
    let combo = Surreal::omega().scale(&Coeff::from_int(3)).add(&sur("1/2"));
    assert!(dm.contains(&combo, &b()).unwrap());

    // Dependent basis is rejected.
    assert!(SubspaceSpec::new(vec![sur("1"), sur("1/2")], &b()).is_err());
}

#[test]
fn development_examples() {
    // All exponents inside the span: development is the element itself.
    let delta = SubspaceSpec::new(vec![sur("1")], &b()).unwrap();
    let y = Surreal::omega().add(&sur("3")).add(&Surreal::omega_pow(sur("-1")));
    let d = development(&y, &delta, &b());
    assert_eq!(d.compare(&y, &b()), crate::error::CmpResult::Equal);

    // Exponents 1 and 1/2 both fall outside span{2}? No: they are rational
    // multiples of 2, so they are inside; use span{w} to exclude them.
    let dw = SubspaceSpec::new(vec![Surreal::omega()], &b()).unwrap();
    let y2 = Surreal::omega().add(&Surreal::omega_pow(sur("1/2"))).add(&sur("1"));
    let d2 = development(&y2, &dw, &b());
    assert!(d2.is_zero_exact(&b()).unwrap());

    // 3 w^w + w + 5 over span{w}: keeps the w^w term, stops at exponent 1.
    let y3 = Surreal::omega_pow(Surreal::omega())
        .scale(&Coeff::from_int(3))
        .add(&Surreal::omega())
        .add(&sur("5"));
    let d3 = development(&y3, &dw, &b());
    assert_eq!(text(&d3), "3*w^(w)");
}

#[test]
fn development_is_truncation_and_idempotent() {
    let delta = SubspaceSpec::new(vec![sur("1")], &b()).unwrap();
    let samples = vec![
        Surreal::omega().add(&sur("3")),
        Surreal::omega_pow(Surreal::omega()).add(&Surreal::omega()).add(&sur("1/2")),
        Surreal::omega_pow(sur("1/2")).add(&Surreal::omega_pow(sur("-2"))),
        sur("7"),
    ];
    for y in &samples {
        let d = development(y, &delta, &b());
        assert!(d.is_truncation(y, &b()).unwrap());
        let dd = development(&d, &delta, &b());
        assert_eq!(dd.compare(&d, &b()), crate::error::CmpResult::Equal);
    }
}

#[test]
fn same_cut_same_development() {
    // Two elements realizing the same cut over the sampled subspace field
    // have equal developments. The span of {1} holds every rational
    // exponent, so the tails must live below all of them: exponent -w.
    let delta = SubspaceSpec::new(vec![sur("1")], &b()).unwrap();
    let base = Surreal::omega().add(&sur("3"));
    let y1 = base.add(&Surreal::omega_pow(Surreal::omega().neg()));
    let y2 = base.add(&Surreal::omega_pow(Surreal::omega().neg()).scale(&Coeff::from_int(5)));
    // Same cut: both lie strictly between base and base + w^q for every
    // rational q < 0 (spot-checked against a finite field sample).
    for q in ["-1", "-2", "-6"] {
        let upper = base.add(&Surreal::omega_pow(sur(q)));
        for y in [&y1, &y2] {
            assert_eq!(y.compare(&base, &b()), crate::error::CmpResult::Greater);
            assert_eq!(y.compare(&upper, &b()), crate::error::CmpResult::Less);
        }
    }
    let d1 = development(&y1, &delta, &b());
    let d2 = development(&y2, &delta, &b());
    assert_eq!(d1.compare(&d2, &b()), crate::error::CmpResult::Equal);
    assert_eq!(text(&d1), "w + 3");
}

#[test]
fn delta_path_golden_chain() {
    let ctx = ExpLogCtx::new();
    let trace = delta_path(&ctx, &Surreal::omega(), &SubspaceSpec::empty(), 3, &b()).unwrap();
    assert_eq!(trace.steps.len(), 4);
    let expected = ["w", "w^(w^(-1))", "w^(w^(-2))", "w^(w^(-3))"];
    for (step, want) in trace.steps.iter().zip(expected.iter()) {
        assert_eq!(&text(&step.y), want);
        assert!(step.d.is_zero_exact(&b()).unwrap());
        assert_eq!(step.sign, 1);
    }
    assert_eq!(trace.terminated, Termination::AtomicConfirmed);
    assert!(is_atomic(&trace, &b()).unwrap());
    assert!(check_independence(&trace, &SubspaceSpec::empty(), &b()).unwrap());

    // Every recorded step is positive infinite.
    for step in &trace.steps {
        assert!(step.y.is_positive_infinite(&b()).unwrap());
    }
}

#[test]
fn delta_path_recurrence_re_verifies() {
    let ctx = ExpLogCtx::new();
    let trace = delta_path(&ctx, &Surreal::omega(), &SubspaceSpec::empty(), 3, &b()).unwrap();
    for i in 0..trace.steps.len() - 1 {
        let l = crate::exp_log::log(&ctx, &trace.steps[i].y, &b()).unwrap();
        let recomputed = l.sub(&trace.steps[i].d);
        let expected = if trace.steps[i].sign > 0 {
            trace.steps[i + 1].y.clone()
        } else {
            trace.steps[i + 1].y.neg()
        };
        assert_eq!(recomputed.compare(&expected, &b()), crate::error::CmpResult::Equal);
    }
}

#[test]
fn path_preconditions_enforced() {
    let ctx = ExpLogCtx::new();
    // Not positive infinite.
    assert!(delta_path(&ctx, &sur("3"), &SubspaceSpec::empty(), 2, &b()).is_err());
    // Valuation inside the subspace.
    let delta = SubspaceSpec::new(vec![sur("1")], &b()).unwrap();
    assert!(delta_path(&ctx, &Surreal::omega(), &delta, 2, &b()).is_err());
}

#[test]
fn atomicity_counterexamples() {
    let ctx = ExpLogCtx::new();
    // 2w fails at step zero: coefficient 2.
    let y = Surreal::omega().scale(&Coeff::from_int(2));
    let trace = delta_path(&ctx, &y, &SubspaceSpec::empty(), 1, &b()).unwrap();
    assert!(!is_atomic(&trace, &b()).unwrap());
    assert_eq!(trace.terminated, Termination::Budget);

    // w + 1 fails at step zero: two terms.
    let y2 = Surreal::omega().add(&sur("1"));
    let trace2 = delta_path(&ctx, &y2, &SubspaceSpec::empty(), 1, &b()).unwrap();
    assert!(!is_atomic(&trace2, &b()).unwrap());
}

#[test]
fn independence_detects_duplicates_and_span_members() {
    let ctx = ExpLogCtx::new();
    let trace = delta_path(&ctx, &Surreal::omega(), &SubspaceSpec::empty(), 2, &b()).unwrap();
    // Duplicated step valuation breaks independence.
    let mut doubled = trace.clone();
    doubled.steps.push(trace.steps[0].clone());
    assert!(!check_independence(&doubled, &SubspaceSpec::empty(), &b()).unwrap());
    // A basis containing v_0 = 1 breaks it too.
    let delta = SubspaceSpec::new(vec![sur("1")], &b()).unwrap();
    assert!(!check_independence(&trace, &delta, &b()).unwrap());
}

#[test]
fn log_exp_closure_gains_logarithm_chain() {
    let ctx = ExpLogCtx::new();
    let out = log_exp_closure(&ctx, &SubspaceSpec::empty(), &[Surreal::omega()], 2, &b()).unwrap();
    // Gains 1/w (from log w) and w^(-2) (from log log w).
    assert!(out.contains(&Surreal::omega_pow(sur("-1")), &b()).unwrap());
    assert!(out.contains(&Surreal::omega_pow(sur("-2")), &b()).unwrap());

    // Zero iterations: unchanged.
    let same = log_exp_closure(&ctx, &SubspaceSpec::empty(), &[Surreal::omega()], 0, &b()).unwrap();
    assert!(same.basis().is_empty());
}

#[test]
fn log_exp_closure_fixed_point() {
    let ctx = ExpLogCtx::new();
    // Start from the closure of the previous test; one more round adds the
    // next chain element but the earlier ones are stable.
    let once = log_exp_closure(&ctx, &SubspaceSpec::empty(), &[Surreal::omega()], 2, &b()).unwrap();
    let twice = log_exp_closure(&ctx, &once, &[Surreal::omega()], 1, &b()).unwrap();
    for e in once.basis() {
        assert!(twice.contains(e, &b()).unwrap());
    }
}

#[test]
fn t1_conditions_pass_on_golden_sample() {
    let ctx = ExpLogCtx::new();
    let ew = crate::exp_log::exp(&ctx, &Surreal::omega(), &b()).unwrap();
    let sample = vec![
        Surreal::omega(),
        Surreal::omega_pow(sur("-1")),
        sur("3"),
        Surreal::omega_pow(sur("1/2")),
        ew,
    ];
    let report = check_t1_conditions(&ctx, &sample, &b()).unwrap();
    for c in &report.conditions {
        assert_eq!(
            c.status,
            ConditionStatus::Pass,
            "condition {} failed: {}",
            c.condition,
            c.detail
        );
    }
    assert!(report.all_pass());
    let json = report.to_json();
    assert_eq!(json["conditions"].as_array().unwrap().len(), 5);
    assert_eq!(json["conditions"][0]["status"], "pass");
}

#[test]
fn tower_el_seed_contains_log_chain() {
    let ctx = ExpLogCtx::new();
    let spec = TowerSpec::new(TowerKind::EL, 3, 40);
    let set = tower_generate(&ctx, &spec, &b()).unwrap();
    let want = [
        Surreal::omega(),
        Surreal::omega_pow(Surreal::omega_pow(sur("-1"))),
        Surreal::omega_pow(Surreal::omega_pow(sur("-2"))),
    ];
    for w in &want {
        assert!(
            set.iter().any(|x| x.compare(w, &b()) == crate::error::CmpResult::Equal),
            "missing {}",
            text(w)
        );
    }
}

#[test]
fn tower_le_depth_one_contains_exp_omega() {
    let ctx = ExpLogCtx::new();
    let spec = TowerSpec::new(TowerKind::LE, 1, 40);
    let set = tower_generate(&ctx, &spec, &b()).unwrap();
    let ww = Surreal::omega_pow(Surreal::omega());
    assert!(set.iter().any(|x| x.compare(&ww, &b()) == crate::error::CmpResult::Equal));
}

#[test]
fn tower_developments_are_truncations() {
    let ctx = ExpLogCtx::new();
    let spec = TowerSpec::new(TowerKind::LE, 2, 24);
    let set = tower_generate(&ctx, &spec, &b()).unwrap();
    // Span from the first few exponents seen in the generation.
    let mut delta = SubspaceSpec::empty();
    for x in set.iter().take(8) {
        if let Ok(p) = x.prefix(&b()) {
            for t in &p.terms {
                let _ = delta.try_extend(&t.exp, &b());
            }
        }
    }
    for y in &set {
        let d = development(y, &delta, &b());
        match d.is_truncation(y, &b()) {
            Ok(ok) => assert!(ok, "development of {} is not a truncation", text(y)),
            Err(_) => {} // budget-undecided members are skipped
        }
    }
}

#[test]
fn tower_growth_is_monotone_in_depth() {
    let ctx = ExpLogCtx::new();
    let small = tower_generate(&ctx, &TowerSpec::new(TowerKind::LE, 1, 60), &b()).unwrap();
    let large = tower_generate(&ctx, &TowerSpec::new(TowerKind::LE, 2, 60), &b()).unwrap();
    assert!(large.len() >= small.len());
}

#[test]
fn path_trace_serializes() {
    let ctx = ExpLogCtx::new();
    let trace = delta_path(&ctx, &Surreal::omega(), &SubspaceSpec::empty(), 2, &b()).unwrap();
    let json = trace.to_json(&b()).unwrap();
    assert_eq!(json["terminated"], "atomic_confirmed");
    assert_eq!(json["steps"][0]["y"], "w");
    assert_eq!(json["steps"][1]["y"], "w^(w^(-1))");
}
