//! Properties of generated well-typed terms across the syntax, typing,
//! reduction, evaluation and machine modules.

use std::collections::{BTreeSet, HashSet, VecDeque};

use lrec_core::eval::{eval_cbn, force_numeral_with, EvalOptions, EvalOutcome, NatOutcome};
use lrec_core::generate::{gen_closed, gen_term, random_type, GenConfig};
use lrec_core::machine::{machine_step, run, ExtTerm, MachineConfig, MachineOutcome};
use lrec_core::reduction::{normalize, normalize_random, redexes, reduce_whnf, run_steps, step_at, step_lo};
use lrec_core::syntax::{
    alpha_eq, check_linear, free_vars, freshen, numeral, numeral_value, parse, pretty, subst, Term, TermKind, Var,
};
use lrec_core::typing::{check, check_nonlinear, infer, infer_detailed, LinType, TypeEnv};
use lrec_core::{Calculus, Fuel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn samples(seed: u64, n: usize) -> Vec<(Term, LinType)> {
    let mut r = rng(seed);
    (0..n).map(|_| gen_closed(&mut r, &GenConfig::default())).collect()
}

fn has_shape(t: &Term, ty: &LinType) -> bool {
    match ty {
        LinType::Nat => numeral_value(t).is_some(),
        LinType::Tensor(..) => matches!(t.kind(), TermKind::Pair(..)),
        LinType::Lolli(..) => matches!(t.kind(), TermKind::Lam(..)),
        LinType::Meta(_) => true,
    }
}

#[test]
fn subject_reduction_and_linearity_along_leftmost_outermost() {
    for (t, ty) in samples(1, 500) {
        let a = infer(&t, &TypeEnv::new()).unwrap();
        check(&t, &TypeEnv::new(), &ty).unwrap();
        let mut cur = t.clone();
        for _ in 0..200 {
            let Some(s) = step_lo(&cur) else { break };
            // checking also re-verifies linearity
            check(&s.term, &TypeEnv::new(), &a).unwrap_or_else(|e| panic!("{cur} -> {}: {e}", s.term));
            cur = s.term;
        }
    }
}

#[test]
fn normalize_takes_the_leftmost_outermost_steps() {
    for (t, _) in samples(10, 300) {
        for limit in [7, 10_000] {
            let plain = run_steps(&t, &mut Fuel::new(limit), step_lo, |_, _| {});
            match (normalize(&t, &mut Fuel::new(limit)), plain) {
                (Ok(a), Ok(b)) => assert!(a.steps == b.steps && alpha_eq(&a.term, &b.term), "{t}"),
                (Err(a), Err(b)) => assert!(a.steps == b.steps && alpha_eq(&a.last, &b.last), "{t}"),
                (a, b) => panic!("{t}: {a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn adequacy_of_normal_forms() {
    for (t, ty) in samples(2, 300) {
        if let Ok(r) = normalize(&t, &mut Fuel::new(100_000)) {
            assert!(has_shape(&r.term, &ty), "{t} normalised to {} at {ty}", r.term);
        }
    }
}

#[test]
fn confluence_under_random_strategies() {
    let mut r = rng(3);
    for (t, _) in samples(4, 300) {
        let Ok(nf) = normalize(&t, &mut Fuel::new(10_000)) else { continue };
        for _ in 0..10 {
            if let Ok(other) = normalize_random(Calculus::Lrec, &t, &mut Fuel::new(10_000), &mut r) {
                assert!(alpha_eq(&nf.term, &other.term), "{t}: {} vs {}", nf.term, other.term);
            }
        }
    }
}

#[test]
fn machine_agrees_with_call_by_name() {
    for (t, _) in samples(5, 300) {
        let e = eval_cbn(&t, &mut Fuel::new(100_000));
        let m = run(&t, &mut Fuel::new(100_000), false).outcome;
        match (&e, &m) {
            (EvalOutcome::Val(v), MachineOutcome::Halted { value, residual_stack }) => {
                assert!(residual_stack.is_empty());
                assert!(alpha_eq(v, value), "{t}: {v} vs {value}");
            }
            (EvalOutcome::FuelExhausted, MachineOutcome::FuelExhausted(_)) => {}
            _ => panic!("{t}: {e:?} vs {m:?}"),
        }
    }
}

#[test]
fn standardisation_and_whnf() {
    for (t, ty) in samples(6, 300) {
        let Ok(nf) = normalize(&t, &mut Fuel::new(10_000)) else { continue };
        let v = eval_cbn(&t, &mut Fuel::new(10_000_000));
        let EvalOutcome::Val(v) = v else { panic!("{t} normalises but call-by-name fails: {v:?}") };
        assert!(v.is_whnf());
        let w = reduce_whnf(&t, &mut Fuel::new(100_000)).unwrap();
        assert!(w.term.is_whnf());
        if ty == LinType::Nat {
            let n = numeral_value(&nf.term).unwrap();
            for opts in [EvalOptions::cbn(), EvalOptions::cbv()] {
                assert_eq!(force_numeral_with(&t, &opts, &mut Fuel::new(1_000_000)), NatOutcome::Nat(n), "{t}");
            }
            let forced = normalize(&w.term, &mut Fuel::new(100_000)).unwrap();
            assert!(alpha_eq(&forced.term, &nf.term));
        }
    }
}

/// Every term reachable from `t` in at most `depth` steps, any position.
fn reachable(t: &Term, depth: usize) -> Vec<Term> {
    let mut seen: HashSet<String> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(t.clone(), 0)]);
    while let Some((u, d)) = queue.pop_front() {
        if !seen.insert(pretty(&freshen(&u))) {
            continue;
        }
        out.push(u.clone());
        if d == depth {
            continue;
        }
        for p in redexes(Calculus::Lrec, &u) {
            let s = step_at(Calculus::Lrec, &u, &p).unwrap();
            queue.push_back((s.term, d + 1));
        }
    }
    out
}

#[test]
fn call_by_name_values_are_reachable() {
    let fixtures = [
        "(\\x. x) 0",
        "let <a, b> = <\\x. x, 2> in a b",
        "rec(<2, 0>, 0, \\x. S x, \\x. x)",
        "(\\f. f 1) (\\y. S y)",
        "(\\p. let <a, b> = p in <b, a>) <0, 1>",
    ];
    for src in fixtures {
        let t = parse(src).unwrap();
        let EvalOutcome::Val(v) = eval_cbn(&t, &mut Fuel::new(1000)) else { panic!("{src}") };
        assert!(reachable(&t, 12).iter().any(|u| alpha_eq(u, &v)), "{src} ⇓ {v}");
    }
}

#[test]
fn machine_stack_append_and_closedness() {
    let mut r = rng(7);
    for (t, _) in samples(8, 200) {
        let mut c = MachineConfig::initial(t.clone());
        let stop = r.gen_range(0..40);
        for _ in 0..stop {
            let Some((next, _)) = machine_step(&c) else { break };
            assert!(next.is_closed(), "{next:?}");
            c = next;
        }
        let Some((after, rule)) = machine_step(&c) else { continue };
        let extra = vec![ExtTerm::Plain(numeral(r.gen_range(0..3))), ExtTerm::Plain(Term::identity())];
        let mut bigger = c.clone();
        bigger.stack.splice(0..0, extra.clone());
        let (after_big, rule_big) = machine_step(&bigger).expect("extended stack still steps");
        assert_eq!(rule, rule_big);
        assert_eq!(after_big.code, after.code);
        let mut want = extra.clone();
        want.extend(after.stack.iter().cloned());
        assert_eq!(after_big.stack, want);
    }
}

#[test]
fn typing_domain_and_relaxed_system() {
    for (t, _) in samples(9, 200) {
        let a = infer(&t, &TypeEnv::new()).unwrap();
        assert_eq!(check_nonlinear(&t, &TypeEnv::new(), &BTreeSet::new()).unwrap(), a);
        let inf = infer_detailed(Calculus::Lrec, &t, &TypeEnv::new()).unwrap();
        for (l, r) in &inf.constraints {
            assert_eq!(inf.apply(l), inf.apply(r));
        }
    }
    // open terms: the domain is exactly the free variables
    let t = parse("\\y. x y").unwrap_or_else(|_| Term::lam("y", Term::app(Term::var("x"), Term::var("y"))));
    let env = TypeEnv::from_pairs([(Var::new("x"), LinType::lolli(LinType::Nat, LinType::Nat))]).unwrap();
    infer(&t, &env).unwrap();
    let fv: Vec<Var> = free_vars(&t).into_iter().collect();
    assert_eq!(env.vars().cloned().collect::<Vec<_>>(), fv);
    let extra = TypeEnv::from_pairs([
        (Var::new("x"), LinType::lolli(LinType::Nat, LinType::Nat)),
        (Var::new("z"), LinType::Nat),
    ])
    .unwrap();
    assert!(infer(&t, &extra).is_err());
}

#[test]
fn numerals_round_trip() {
    // every suffix of a long numeral is itself a numeral
    let mut t = numeral(10_000);
    for n in (0..=10_000u64).rev() {
        assert_eq!(numeral_value(&t), Some(n));
        if let TermKind::Suc(m) = t.kind() {
            t = m.clone();
        }
    }
    assert_eq!(numeral(37), parse("37").unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pretty_parse_round_trip(seed in any::<u64>()) {
        let (t, _) = gen_closed(&mut rng(seed), &GenConfig::default());
        let back = parse(&pretty(&t)).unwrap();
        prop_assert!(alpha_eq(&back, &t));
        prop_assert!(check_linear(&back).is_ok());
    }

    #[test]
    fn alpha_eq_is_an_equivalence(seed in any::<u64>()) {
        let (t, _) = gen_closed(&mut rng(seed), &GenConfig::default());
        let u = freshen(&parse(&pretty(&t)).unwrap());
        let w = freshen(&u);
        prop_assert!(alpha_eq(&t, &t));
        prop_assert_eq!(alpha_eq(&t, &u), alpha_eq(&u, &t));
        prop_assert!(alpha_eq(&t, &u) && alpha_eq(&u, &w) && alpha_eq(&t, &w));
        let (other, _) = gen_closed(&mut rng(seed.wrapping_add(1)), &GenConfig::default());
        prop_assert_eq!(alpha_eq(&t, &other), alpha_eq(&other, &t));
    }

    #[test]
    fn substitution_free_variables(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_type(&mut r, 2);
        let b = random_type(&mut r, 2);
        let body = gen_term(&mut r, &LinType::lolli(a.clone(), b), &GenConfig::default());
        let TermKind::Lam(x, open) = body.kind() else { return Ok(()) };
        let s = gen_term(&mut r, &a, &GenConfig::default());
        let out = subst(open, x, &s);
        let mut want = free_vars(open);
        want.remove(x);
        prop_assert_eq!(free_vars(&out), want);
        prop_assert!(check_linear(&out).is_ok());
    }
}
