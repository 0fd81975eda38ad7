//! Acceptance suite: thirteen criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (no libtest harness) so the lines always print.
//! Exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use lrec::corpus::{self, Kind};
use lrec::difftest::{corpus_files, has_shape, pcf_row, DiffConfig};
use lrec_core::eval::{cbn_cbv_separator, eval_cbn, eval_cbv, force_numeral, EvalOutcome};
use lrec_core::generate::{gen_closed, gen_term, GenConfig};
use lrec_core::machine::{run, MachineOutcome};
use lrec_core::minext::{mforce_numeral, mtype, mu_enc, MTerm};
use lrec_core::pcf::{compile, programs, PcfTerm, PcfType};
use lrec_core::reduction::{normalize, normalize_in, normalize_random, step_lo, step_root, RuleName};
use lrec_core::stdlib::{
    add_enc, delta, dup, erase_term, fix, iszero_enc, maker, min_enc, mult_enc, pred_enc,
};
use lrec_core::syntax::{alpha_eq, numeral, parse, Term};
use lrec_core::typing::{check, infer, TypeEnv};
use lrec_core::{Calculus, Fuel, LinType, TermKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn generated(seed: u64, n: usize) -> Vec<(Term, LinType)> {
    let mut r = rng(seed);
    (0..n).map(|_| gen_closed(&mut r, &GenConfig::default())).collect()
}

/// Every λ-rec and minimiser-calculus definition in the corpus that parses,
/// with its calculus.
fn corpus_terms() -> Vec<(String, Calculus, Term)> {
    let mut out = Vec::new();
    for path in corpus_files(&corpus_dir()).expect("corpus directory") {
        let calculus = match Kind::of(&path) {
            Some(Kind::Lrec) => Calculus::Lrec,
            Some(Kind::Llcim) => Calculus::Llcim,
            _ => continue,
        };
        let Ok(source) = corpus::read(&path).and_then(|t| corpus::split(&t)) else { continue };
        for (name, r) in corpus::load_terms(&source, calculus) {
            if let Ok(t) = r {
                out.push((format!("{}:{name}", path.display()), calculus, t));
            }
        }
    }
    out
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 ------------------------------------------------------------------------

fn reduction_rules() -> Outcome {
    let p = |s: &str| parse(s).unwrap_or_else(|e| panic!("{s}: {e}"));
    let cases: [(&str, Option<(Term, RuleName)>); 8] = [
        ("(\\x. S x) 0", Some((p("S 0"), RuleName::Beta))),
        ("(\\x. S x) y", None),
        ("let <a, b> = <0, S 0> in <b, a>", Some((p("<S 0, 0>"), RuleName::Let))),
        ("let <a, b> = <y, 0> in <b, a>", None),
        ("rec(<0, 0>, 5, \\x. x, \\x. x)", Some((p("5"), RuleName::RecZero))),
        ("rec(<0, y>, 5, \\x. x, \\x. x)", None),
        (
            "rec(<S 0, 0>, 0, \\x. S x, \\x. x)",
            Some((p("(\\x. S x) rec((\\x. x) <0, 0>, 0, \\x. S x, \\x. x)"), RuleName::RecSuc)),
        ),
        ("rec(<S 0, 0>, 0, \\x. y x, \\x. x)", None),
    ];
    for (src, want) in &cases {
        let got = step_root(&p(src));
        match (got, want) {
            (None, None) => {}
            (Some((t, r)), Some((u, q))) => {
                ensure(r == *q && alpha_eq(&t, u), || format!("{src} gave {r} {t}, expected {q} {u}"))?;
            }
            (got, want) => return Err(format!("{src}: got {got:?}, expected {want:?}")),
        }
    }
    Ok(format!("{} fixtures", cases.len()))
}

// 2 ------------------------------------------------------------------------

fn subject_reduction() -> Outcome {
    let mut steps = 0;
    for (t, ty) in generated(1, 500) {
        let a = infer(&t, &TypeEnv::new()).map_err(|e| format!("{t}: {e}"))?;
        check(&t, &TypeEnv::new(), &ty).map_err(|e| format!("{t} : {ty}: {e}"))?;
        let mut cur = t;
        for _ in 0..200 {
            let Some(s) = step_lo(&cur) else { break };
            check(&s.term, &TypeEnv::new(), &a).map_err(|e| format!("{cur} -> {}: {e}", s.term))?;
            steps += 1;
            cur = s.term;
        }
    }
    Ok(format!("500 terms, {steps} steps, 0 violations"))
}

// 3 ------------------------------------------------------------------------

fn adequacy() -> Outcome {
    let mut checked = 0;
    let mut typed = 0;
    for (name, calculus, t) in corpus_terms() {
        let ty = match calculus {
            Calculus::Lrec => infer(&t, &TypeEnv::new()),
            Calculus::Llcim => mtype(&MTerm::new(t.clone()).unwrap(), &TypeEnv::new()),
        };
        let Ok(ty) = ty else { continue };
        typed += 1;
        if let Ok(r) = normalize_in(calculus, &t, &mut Fuel::new(100_000)) {
            ensure(has_shape(&r.term, &ty.ground()), || format!("{name}: normal form {} at {ty}", r.term))?;
            checked += 1;
        }
    }
    ensure(checked >= 30, || format!("only {checked} corpus normal forms"))?;
    Ok(format!("{checked} normal forms of {typed} typed corpus terms"))
}

// 4 ------------------------------------------------------------------------

fn confluence() -> Outcome {
    let mut r = rng(3);
    let mut runs = 0;
    for (t, _) in generated(4, 300) {
        let Ok(nf) = normalize(&t, &mut Fuel::new(10_000)) else { continue };
        for _ in 0..10 {
            if let Ok(other) = normalize_random(Calculus::Lrec, &t, &mut Fuel::new(10_000), &mut r) {
                ensure(alpha_eq(&nf.term, &other.term), || format!("{t}: {} and {}", nf.term, other.term))?;
                runs += 1;
            }
        }
    }
    Ok(format!("300 terms, {runs} random runs, one normal form each"))
}

// 5 ------------------------------------------------------------------------

fn machine_agrees(t: &Term) -> Result<(), String> {
    let e = eval_cbn(t, &mut Fuel::new(100_000));
    let m = run(t, &mut Fuel::new(100_000), false).outcome;
    match (&e, &m) {
        (EvalOutcome::Val(v), MachineOutcome::Halted { value, residual_stack }) if residual_stack.is_empty() => {
            ensure(alpha_eq(v, value), || format!("{t}: {v} vs {value}"))
        }
        (EvalOutcome::FuelExhausted, MachineOutcome::FuelExhausted(_)) => Ok(()),
        (EvalOutcome::Stuck { .. }, MachineOutcome::Stuck(_)) => Ok(()),
        _ => Err(format!("{t}: {e:?} vs {m:?}")),
    }
}

fn machine_vs_cbn() -> Outcome {
    let corpus: Vec<Term> = corpus_terms().into_iter().filter(|(_, c, _)| *c == Calculus::Lrec).map(|(_, _, t)| t).collect();
    for t in &corpus {
        machine_agrees(t)?;
    }
    for (t, _) in generated(5, 300) {
        machine_agrees(&t)?;
    }
    Ok(format!("{} corpus + 300 generated terms", corpus.len()))
}

// 6 ------------------------------------------------------------------------

fn arithmetic() -> Outcome {
    let c = Calculus::Lrec;
    let nat = |t: Term| force_numeral(&t, &mut Fuel::new(1_000_000)).nat();
    for m in 0..=8u64 {
        for n in 0..=8u64 {
            let add = nat(Term::apps(add_enc(c), [numeral(m), numeral(n)]));
            ensure(add == Some(m + n), || format!("add {m} {n} = {add:?}"))?;
            let mult = nat(Term::apps(mult_enc(c), [numeral(m), numeral(n)]));
            ensure(mult == Some(m * n), || format!("mult {m} {n} = {mult:?}"))?;
        }
        let pred = nat(Term::app(pred_enc(c), numeral(m)));
        ensure(pred == Some(m.saturating_sub(1)), || format!("pred {m} = {pred:?}"))?;
        let z = nat(Term::app(iszero_enc(c), numeral(m)));
        ensure(z == Some(u64::from(m != 0)), || format!("iszero {m} = {z:?}"))?;
    }
    Ok("add, mult on 81 pairs; pred, iszero on 0..8".into())
}

// 7 ------------------------------------------------------------------------

fn erasure() -> Outcome {
    let types = LinType::all_up_to_depth(3);
    for ty in &types {
        let t = erase_term(maker(ty), ty);
        let r = normalize(&t, &mut Fuel::new(10_000)).map_err(|_| format!("ε(M({ty})) does not normalise"))?;
        ensure(alpha_eq(&r.term, &Term::identity()), || format!("ε(M({ty}), {ty}) = {}", r.term))?;
    }
    let mut r = rng(7);
    let mut sampled = 0;
    for ty in &types {
        let mut got = 0;
        for _ in 0..400 {
            if got == 20 {
                break;
            }
            let t = gen_term(&mut r, ty, &GenConfig::default());
            if normalize(&t, &mut Fuel::new(10_000)).is_err() {
                continue;
            }
            let e = erase_term(t.clone(), ty);
            let n = normalize(&e, &mut Fuel::new(100_000)).map_err(|_| format!("ε({t}, {ty}) does not normalise"))?;
            ensure(alpha_eq(&n.term, &Term::identity()), || format!("ε({t}, {ty}) = {}", n.term))?;
            got += 1;
        }
        ensure(got == 20, || format!("only {got} normalising samples at {ty}"))?;
        sampled += got;
    }
    Ok(format!("{} types; {sampled} sampled terms", types.len()))
}

// 8 ------------------------------------------------------------------------

fn duplication() -> Outcome {
    let n = LinType::Nat;
    let types = [
        n.clone(),
        LinType::tensor(n.clone(), n.clone()),
        LinType::lolli(n.clone(), n.clone()),
        LinType::tensor(LinType::lolli(n.clone(), n.clone()), n.clone()),
        LinType::lolli(LinType::tensor(n.clone(), n.clone()), n.clone()),
    ];
    let mut r = rng(8);
    let mut count = 0;
    for ty in &types {
        for _ in 0..10 {
            let t = gen_term(&mut r, ty, &GenConfig::default());
            let want = normalize(&t, &mut Fuel::new(10_000)).map_err(|_| format!("{t} does not normalise"))?.term;
            let d = normalize(&Term::app(dup(ty), t.clone()), &mut Fuel::new(100_000))
                .map_err(|_| format!("D[{ty}] {t} does not normalise"))?
                .term;
            let TermKind::Pair(a, b) = d.kind() else { return Err(format!("D[{ty}] {t} = {d}")) };
            ensure(alpha_eq(a, &want) && alpha_eq(b, &want), || format!("D[{ty}] {t} = {d}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} samples across {} types", types.len()))
}

// 9 ------------------------------------------------------------------------

/// `λx. max(k - x, 0)` by iterating the predecessor.
fn countdown(c: Calculus, k: u64) -> Term {
    let body = match c {
        Calculus::Lrec => Term::rec(Term::pair(Term::var("x"), Term::zero()), numeral(k), pred_enc(c), Term::identity()),
        Calculus::Llcim => Term::iter(Term::var("x"), numeral(k), pred_enc(c)),
    };
    Term::lam("x", body)
}

fn minimisation() -> Outcome {
    for k in 0..=5u64 {
        let lrec = force_numeral(&min_enc(&countdown(Calculus::Lrec, k)), &mut Fuel::new(1_000_000)).nat();
        ensure(lrec == Some(k), || format!("min_enc for k = {k}: {lrec:?}"))?;
        let f = MTerm::new(countdown(Calculus::Llcim, k)).map_err(|e| e.to_string())?;
        let m = mforce_numeral(&mu_enc(&f), &mut Fuel::new(1_000_000)).nat();
        ensure(m == Some(k), || format!("mu_enc for k = {k}: {m:?}"))?;
    }
    // f x = 1 for every x
    let positive = |c| Term::lam("x", Term::app(lrec_core::stdlib::erase_in(c, Term::var("x"), &LinType::Nat), numeral(1)));
    let lrec = force_numeral(&min_enc(&positive(Calculus::Lrec)), &mut Fuel::new(100_000));
    ensure(lrec == lrec_core::eval::NatOutcome::FuelExhausted, || format!("min_enc of a positive f: {lrec:?}"))?;
    let f = MTerm::new(positive(Calculus::Llcim)).map_err(|e| e.to_string())?;
    let m = mforce_numeral(&mu_enc(&f), &mut Fuel::new(100_000));
    ensure(m == lrec_core::eval::NatOutcome::FuelExhausted, || format!("mu_enc of a positive f: {m:?}"))?;
    Ok("k = 0..5 in both calculi; a positive f runs out of fuel".into())
}

// 10 -----------------------------------------------------------------------

fn fixpoint_law() -> Outcome {
    let n = LinType::Nat;
    let types = [n.clone(), LinType::tensor(n.clone(), n.clone()), LinType::lolli(n.clone(), n.clone())];
    let mut r = rng(10);
    let mut count = 0;
    for a in &types {
        for _ in 0..10 {
            let f = gen_term(&mut r, &LinType::lolli(a.clone(), a.clone()), &GenConfig::default());
            let yf = Term::app(fix(a), f.clone());
            let (unfolded, r1) = step_root(&yf).ok_or("Y f is not a redex")?;
            let (next, r2) = step_root(&unfolded).ok_or("no recursion step")?;
            ensure(r1 == RuleName::Beta && r2 == RuleName::RecSuc, || format!("rules {r1}, {r2}"))?;
            // f (rec(W <0, 0>, M, f, W)): bring the scrutinee back to <1, 0>
            let TermKind::App(head, inner) = next.kind() else { return Err(format!("{next}")) };
            let TermKind::Rec(s, u, v, w) = inner.kind() else { return Err(format!("{inner}")) };
            let (s1, r3) = step_root(s).ok_or("update is not a redex")?;
            let (s2, r4) = step_root(&s1).ok_or("update does not rebuild the pair")?;
            ensure(r3 == RuleName::Beta && r4 == RuleName::Let, || format!("rules {r3}, {r4}"))?;
            let again = Term::app(head.clone(), Term::rec(s2, u.clone(), v.clone(), w.clone()));
            ensure(alpha_eq(&again, &Term::app(f.clone(), unfolded.clone())), || format!("{again} vs f ({unfolded})"))?;
            count += 1;
        }
    }
    Ok(format!("{count} functions at {} types", types.len()))
}

// 11 -----------------------------------------------------------------------

fn pcf_end_to_end() -> Outcome {
    let cfg = DiffConfig::default();
    let dir = corpus_dir().join("pcf");
    let mut rows = Vec::new();
    for file in ["programs.pcf", "higher.pcf"] {
        let path = dir.join(file);
        let source = corpus::split(&corpus::read(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for (name, p) in corpus::load_pcf(&source) {
            let p = p.map_err(|e| format!("{file}:{name}: {e}"))?;
            let row = pcf_row(&format!("{file}:{name}"), &p, &cfg)?;
            ensure(row.agree, || format!("{row:?}"))?;
            rows.push((name, row));
        }
    }
    let nat: Vec<_> = rows.iter().filter(|(_, r)| r.ty == PcfType::Nat).collect();
    ensure(nat.len() >= 10, || format!("only {} Nat programs", nat.len()))?;
    ensure(nat.iter().all(|(_, r)| r.reference.is_some()), || "a Nat program did not terminate".into())?;
    let fact = rows.iter().find(|(n, _)| n == "fact5").ok_or("no fact5 program")?;
    ensure(fact.1.compiled == Some(120), || format!("fact 5 = {:?}", fact.1.compiled))?;
    let add = rows.iter().find(|(n, _)| n == "add").ok_or("no Y-defined addition")?;
    ensure(add.1.compiled == Some(15), || format!("add 7 8 = {:?}", add.1.compiled))?;
    // the built-in programs themselves, at higher type
    for p in [programs::add(), programs::mult(), programs::factorial()] {
        pcf_row("builtin", &p, &cfg)?;
    }
    Ok(format!("{} Nat programs agree, fact 5 = 120; {} compiled outputs type-check", nat.len(), rows.len() + 3))
}

// 12 -----------------------------------------------------------------------

fn diverges_everywhere(name: &str, t: &Term) -> Result<(), String> {
    let fuel = || Fuel::new(1_000);
    ensure(normalize(t, &mut fuel()).is_err(), || format!("{name} normalises"))?;
    for seed in 0..5 {
        let r = normalize_random(Calculus::Lrec, t, &mut fuel(), &mut rng(seed));
        ensure(r.is_err(), || format!("{name} normalises under random strategy {seed}"))?;
    }
    ensure(eval_cbn(t, &mut fuel()) == EvalOutcome::FuelExhausted, || format!("{name} converges by name"))?;
    ensure(eval_cbv(t, &mut fuel()) == EvalOutcome::FuelExhausted, || format!("{name} converges by value"))?;
    let m = run(t, &mut fuel(), false).outcome;
    ensure(matches!(m, MachineOutcome::FuelExhausted(_)), || format!("{name} on the machine: {m:?}"))
}

fn divergence() -> Outcome {
    let nat = LinType::Nat;
    let d = delta(Calculus::Lrec);
    let y_id = Term::app(fix(&nat), Term::identity());
    let ey = erase_term(fix(&nat), &LinType::lolli(LinType::lolli(nat.clone(), nat.clone()), nat.clone()));
    let succ_loop = PcfTerm::app(PcfTerm::Succ, PcfTerm::app(PcfTerm::Y(PcfType::Nat), PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x"))));
    let compiled = compile(&succ_loop, &[]).map_err(|e| e.to_string())?;
    let cases = [("Δ Δ", Term::app(d.clone(), d)), ("Y_Nat I", y_id), ("ε(Y_Nat)", ey), ("compiled succ (Y id)", compiled)];
    for (name, t) in &cases {
        diverges_everywhere(name, t)?;
    }
    Ok(format!("{} witnesses, 5 reduction strategies, both evaluators, machine", cases.len()))
}

// 13 -----------------------------------------------------------------------

fn separation() -> Outcome {
    let t = cbn_cbv_separator();
    let by_name = eval_cbn(&t, &mut Fuel::new(100_000));
    ensure(matches!(by_name, EvalOutcome::Val(_)), || format!("by name: {by_name:?}"))?;
    let by_value = eval_cbv(&t, &mut Fuel::new(100_000));
    ensure(by_value == EvalOutcome::FuelExhausted, || format!("by value: {by_value:?}"))?;
    Ok(format!("{t}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("reduction rules fire exactly when their side conditions hold", reduction_rules),
        ("leftmost-outermost steps preserve types", subject_reduction),
        ("normal forms have the constructor their type dictates", adequacy),
        ("random strategies reach a single normal form", confluence),
        ("the machine agrees with call-by-name evaluation", machine_vs_cbn),
        ("arithmetic encodings match integer arithmetic", arithmetic),
        ("erasure of made and sampled terms yields the identity", erasure),
        ("duplication copies its argument", duplication),
        ("minimisation finds the least zero", minimisation),
        ("the fixpoint unfolds to f applied to itself", fixpoint_law),
        ("compiled PCF programs agree with the PCF evaluator", pcf_end_to_end),
        ("divergent witnesses diverge everywhere", divergence),
        ("call-by-name converges where call-by-value diverges", separation),
    ];
    let failed = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || {
            let total = Instant::now();
            let mut failed = 0;
            for (i, (name, run)) in criteria.iter().enumerate() {
                let start = Instant::now();
                let r = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
                    let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
                    Err(format!("panicked: {}", msg.unwrap_or_default()))
                });
                let ms = start.elapsed().as_millis();
                match r {
                    Ok(detail) => println!("PASS  {:>2}  {name}: {detail} [{ms} ms]", i + 1),
                    Err(why) => {
                        failed += 1;
                        println!("FAIL  {:>2}  {name}: {why} [{ms} ms]", i + 1);
                    }
                }
            }
            println!("{} of {} criteria passed in {:.1} s", criteria.len() - failed, criteria.len(), total.elapsed().as_secs_f64());
            failed
        })
        .expect("spawn")
        .join()
        .expect("acceptance thread");
    if failed > 0 {
        std::process::exit(1);
    }
}
