//! Differential testing: normalisation, call-by-name evaluation and the
//! machine must agree on generated terms and on corpus files; compiled PCF
//! programs must agree with the PCF evaluator.

use std::path::{Path, PathBuf};

use lrec_core::eval::{eval_cbn, force_numeral_with, EvalOptions, EvalOutcome, NatOutcome};
use lrec_core::generate::{gen_closed, GenConfig};
use lrec_core::machine::{run, MachineOutcome};
use lrec_core::minext::{mforce_numeral, mnormalize, mtype, MTerm};
use lrec_core::pcf::{compile, pcf_check, pcf_eval, PcfOutcome, PcfTerm, PcfType};
use lrec_core::reduction::normalize;
use lrec_core::syntax::{alpha_eq, numeral_value};
use lrec_core::typing::{check, infer, TypeEnv};
use lrec_core::{Calculus, Fuel, LinType, Term, TermKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{self, Kind};
use crate::report::{digest, RunReport, Timer};

#[derive(Debug, Clone)]
pub struct DiffConfig {
    pub seed: u64,
    pub n: usize,
    /// Budget for each normalisation, evaluation and machine run.
    pub fuel: u64,
    /// Budget for running a compiled PCF program.
    pub compiled_fuel: u64,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig { seed: 42, n: 300, fuel: 100_000, compiled_fuel: 10_000_000 }
    }
}

/// What the three engines agreed on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Agreement {
    /// Normal form found; evaluator and machine reached the same value.
    Normal(Term),
    /// Normalisation ran out of fuel; the weak-head engines agree.
    Weak(Option<Term>),
}

/// The constructor a closed normal form of type `ty` must have.
pub fn has_shape(t: &Term, ty: &LinType) -> bool {
    match ty {
        LinType::Nat => numeral_value(t).is_some(),
        LinType::Tensor(..) => matches!(t.kind(), TermKind::Pair(..)),
        LinType::Lolli(..) => matches!(t.kind(), TermKind::Lam(..)),
        LinType::Meta(_) => true,
    }
}

/// Retries with ten times the budget when only one side ran out, so that
/// the evaluator's and the machine's different step counts do not register
/// as disagreement.
fn eval_and_machine(t: &Term, fuel: u64) -> (EvalOutcome, MachineOutcome) {
    let mut e = eval_cbn(t, &mut Fuel::new(fuel));
    let mut m = run(t, &mut Fuel::new(fuel), false).outcome;
    let e_out = matches!(e, EvalOutcome::FuelExhausted);
    let m_out = matches!(m, MachineOutcome::FuelExhausted(_));
    if e_out && !m_out {
        e = eval_cbn(t, &mut Fuel::new(fuel * 10));
    } else if m_out && !e_out {
        m = run(t, &mut Fuel::new(fuel * 10), false).outcome;
    }
    (e, m)
}

/// Runs every engine on a closed term of type `ty` and checks that they agree.
pub fn cross_check(t: &Term, ty: &LinType, fuel: u64) -> Result<Agreement, String> {
    let nf = normalize(t, &mut Fuel::new(fuel)).ok().map(|r| r.term);
    if let Some(n) = &nf {
        if !has_shape(n, ty) {
            return Err(format!("normal form {n} does not have the shape of {ty}"));
        }
    }
    let (e, m) = eval_and_machine(t, fuel);
    let value = match (&e, &m) {
        (EvalOutcome::Val(v), MachineOutcome::Halted { value, residual_stack }) => {
            if !residual_stack.is_empty() {
                return Err(format!("machine halted with {} items on the stack", residual_stack.len()));
            }
            if !alpha_eq(v, value) {
                return Err(format!("call-by-name gives {v} but the machine gives {value}"));
            }
            Some(v.clone())
        }
        (EvalOutcome::FuelExhausted, MachineOutcome::FuelExhausted(_)) => None,
        _ => return Err(format!("call-by-name: {e:?}; machine: {m:?}")),
    };
    let Some(nf) = nf else {
        return Ok(Agreement::Weak(value));
    };
    let Some(v) = value else {
        return Err(format!("normalises to {nf} but call-by-name does not terminate"));
    };
    match normalize(&v, &mut Fuel::new(fuel)) {
        Ok(r) if alpha_eq(&r.term, &nf) => {}
        Ok(r) => return Err(format!("call-by-name value normalises to {} instead of {nf}", r.term)),
        Err(_) => return Err(format!("call-by-name value {v} does not normalise")),
    }
    if let Some(k) = numeral_value(&nf) {
        for opts in [EvalOptions::cbn(), EvalOptions::cbv()] {
            let got = force_numeral_with(t, &opts, &mut Fuel::new(fuel * 10));
            if got != NatOutcome::Nat(k) {
                return Err(format!("{:?} reads back {got:?}, normal form is {k}", opts.strategy));
            }
        }
    }
    Ok(Agreement::Normal(nf))
}

/// The minimiser calculus has no big-step evaluator; its normal forms are
/// checked against weak-head read-back instead.
pub fn cross_check_llcim(t: &Term, ty: &LinType, fuel: u64) -> Result<Agreement, String> {
    let m = MTerm::new(t.clone()).map_err(|e| e.to_string())?;
    let Ok(nf) = mnormalize(&m, &mut Fuel::new(fuel)) else {
        return Ok(Agreement::Weak(None));
    };
    if !has_shape(&nf.term, ty) {
        return Err(format!("normal form {} does not have the shape of {ty}", nf.term));
    }
    if let Some(k) = numeral_value(&nf.term) {
        let got = mforce_numeral(&m, &mut Fuel::new(fuel * 10));
        if got != NatOutcome::Nat(k) {
            return Err(format!("weak-head read-back gives {got:?}, normal form is {k}"));
        }
    }
    Ok(Agreement::Normal(nf.term))
}

/// One row of the PCF table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcfRow {
    pub input: String,
    pub ty: PcfType,
    /// `None` when the evaluator ran out of fuel.
    pub reference: Option<u64>,
    /// `None` when the compiled program ran out of fuel.
    pub compiled: Option<u64>,
    pub compiled_steps: u64,
    pub agree: bool,
}

/// Compiles a closed PCF program and compares it with the PCF evaluator.
/// Higher-type programs are only checked to compile at the translated type.
pub fn pcf_row(input: &str, p: &PcfTerm, cfg: &DiffConfig) -> Result<PcfRow, String> {
    let ty = pcf_check(p, &[]).map_err(|e| format!("ill-typed: {e}"))?;
    let compiled = compile(p, &[]).map_err(|e| e.to_string())?;
    let lin = lrec_core::pcf::type_trans(&ty);
    check(&compiled, &TypeEnv::new(), &lin).map_err(|e| format!("compiled program does not have type {lin}: {e}"))?;
    if ty != PcfType::Nat {
        return Ok(PcfRow { input: input.into(), ty, reference: None, compiled: None, compiled_steps: 0, agree: true });
    }
    let out = pcf_eval(p, &mut Fuel::new(cfg.fuel));
    let reference = match &out {
        PcfOutcome::Val(v) => Some(out.nat().ok_or_else(|| format!("evaluator returned non-numeral {v}"))?),
        PcfOutcome::FuelExhausted => None,
        PcfOutcome::Stuck(s) => return Err(format!("evaluator stuck: {s}")),
    };
    let mut fuel = Fuel::new(cfg.compiled_fuel);
    let compiled_value = match force_numeral_with(&compiled, &EvalOptions::cbn(), &mut fuel) {
        NatOutcome::Nat(k) => Some(k),
        NatOutcome::FuelExhausted => None,
        other => return Err(format!("compiled program: {other:?}")),
    };
    Ok(PcfRow {
        input: input.into(),
        ty,
        reference,
        compiled: compiled_value,
        compiled_steps: fuel.used(),
        agree: reference == compiled_value,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub input: String,
    pub term: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct Summary {
    pub generated: usize,
    pub normal: usize,
    pub weak: usize,
    pub corpus_checked: usize,
    /// Input and reason.
    pub skipped: Vec<(String, String)>,
    pub failures: Vec<Failure>,
    pub pcf: Vec<PcfRow>,
    pub reports: Vec<RunReport>,
}

impl Summary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.pcf.iter().all(|r| r.agree)
    }

    fn record(&mut self, input: String, term: &Term, r: Result<Agreement, String>, timer: &Timer) {
        let (outcome, result) = match &r {
            Ok(Agreement::Normal(nf)) => {
                self.normal += 1;
                ("agree".to_string(), Some(nf.to_string()))
            }
            Ok(Agreement::Weak(_)) => {
                self.weak += 1;
                ("agree-diverges".to_string(), None)
            }
            Err(m) => ("disagree".to_string(), Some(m.clone())),
        };
        let text = term.to_string();
        self.reports.push(RunReport {
            command: "difftest".into(),
            input: input.clone(),
            digest: digest(text.as_bytes()),
            outcome,
            result,
            fuel_used: 0,
            wall_ms: timer.ms(),
        });
        if let Err(message) = r {
            self.failures.push(Failure { input, term: text, message });
        }
    }

    /// Human-readable lines; identical for identical inputs.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!(
            "generated {} terms; corpus {} definitions; {} with normal forms, {} divergent, {} skipped, {} disagreements",
            self.generated,
            self.corpus_checked,
            self.normal,
            self.weak,
            self.skipped.len(),
            self.failures.len()
        )];
        for f in &self.failures {
            out.push(format!("DISAGREE {}: {}\n  term: {}", f.input, f.message, f.term));
        }
        if !self.pcf.is_empty() {
            let show = |v: Option<u64>, ty: &PcfType| match (v, ty) {
                (Some(k), _) => k.to_string(),
                (None, PcfType::Nat) => "diverges".to_string(),
                (None, _) => "-".to_string(),
            };
            let mut rows = vec![["program".to_string(), "type".into(), "pcf".into(), "compiled".into(), "steps".into(), "agree".into()]];
            for r in &self.pcf {
                rows.push([
                    r.input.clone(),
                    r.ty.to_string(),
                    show(r.reference, &r.ty),
                    show(r.compiled, &r.ty),
                    r.compiled_steps.to_string(),
                    (if r.agree { "yes" } else { "NO" }).to_string(),
                ]);
            }
            let mut width = [0usize; 6];
            for row in &rows {
                for (w, cell) in width.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            for row in &rows {
                let cells: Vec<String> = row
                    .iter()
                    .zip(width)
                    .enumerate()
                    .map(|(i, (c, w))| if (2..5).contains(&i) { format!("{c:>w$}") } else { format!("{c:<w$}") })
                    .collect();
                out.push(cells.join("  ").trim_end().to_string());
            }
        }
        out
    }
}

/// Runs `cfg.n` generated terms through [`cross_check`].
pub fn run_generated(cfg: &DiffConfig, summary: &mut Summary) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.n {
        let timer = Timer::start();
        let (t, ty) = gen_closed(&mut rng, &GenConfig::default());
        let input = format!("generated:seed={}#{i}", cfg.seed);
        let r = match check(&t, &TypeEnv::new(), &ty) {
            Ok(_) => cross_check(&t, &ty, cfg.fuel),
            Err(e) => Err(format!("generated term does not have type {ty}: {e}")),
        };
        summary.generated += 1;
        summary.record(input, &t, r, &timer);
    }
}

/// Corpus files under `dir`, sorted by path. A file stands for itself.
pub fn corpus_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    if dir.is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let mut out = Vec::new();
    let mut pending = vec![dir.to_path_buf()];
    while let Some(d) = pending.pop() {
        for entry in std::fs::read_dir(&d)? {
            let p = entry?.path();
            if p.is_dir() {
                pending.push(p);
            } else if Kind::of(&p).is_some() {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Checks one corpus file. Ill-typed or unparsable definitions are skipped.
pub fn run_file(path: &Path, cfg: &DiffConfig, summary: &mut Summary) {
    let label = path.display().to_string();
    let Some(kind) = Kind::of(path) else { return };
    let source = match corpus::read(path).and_then(|t| corpus::split(&t)) {
        Ok(s) => s,
        Err(e) => {
            summary.skipped.push((label, e.to_string()));
            return;
        }
    };
    match kind {
        Kind::Pcf => {
            for (name, r) in corpus::load_pcf(&source) {
                let input = format!("{label}:{name}");
                match r.and_then(|p| pcf_row(&input, &p, cfg)) {
                    Ok(row) => summary.pcf.push(row),
                    Err(e) => summary.skipped.push((input, e)),
                }
            }
        }
        Kind::Lrec | Kind::Llcim => {
            let calculus = if kind == Kind::Lrec { Calculus::Lrec } else { Calculus::Llcim };
            for (name, r) in corpus::load_terms(&source, calculus) {
                let input = format!("{label}:{name}");
                let timer = Timer::start();
                let t = match r {
                    Ok(t) => t,
                    Err(e) => {
                        summary.skipped.push((input, e));
                        continue;
                    }
                };
                let ty = match calculus {
                    Calculus::Lrec => infer(&t, &TypeEnv::new()),
                    Calculus::Llcim => mtype(&MTerm::new(t.clone()).expect("parsed in this calculus"), &TypeEnv::new()),
                };
                let ty = match ty {
                    Ok(ty) => ty,
                    Err(e) => {
                        summary.skipped.push((input, format!("ill-typed: {e}")));
                        continue;
                    }
                };
                let r = match calculus {
                    Calculus::Lrec => cross_check(&t, &ty, cfg.fuel),
                    Calculus::Llcim => cross_check_llcim(&t, &ty, cfg.fuel),
                };
                summary.corpus_checked += 1;
                summary.record(input, &t, r, &timer);
            }
        }
    }
}

/// Generated terms, then every corpus file in path order.
pub fn difftest(corpus_dir: Option<&Path>, cfg: &DiffConfig) -> std::io::Result<Summary> {
    let mut summary = Summary::default();
    run_generated(cfg, &mut summary);
    if let Some(dir) = corpus_dir {
        for f in corpus_files(dir)? {
            run_file(&f, cfg, &mut summary);
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lrec_core::syntax::parse;

    #[test]
    fn agreement_on_simple_terms() {
        let t = parse("(\\x. x) 3").unwrap();
        assert_eq!(cross_check(&t, &LinType::Nat, 1000), Ok(Agreement::Normal(parse("3").unwrap())));
        let dd = lrec_core::stdlib::delta(Calculus::Lrec);
        let omega = Term::app(dd.clone(), dd);
        assert_eq!(cross_check(&omega, &LinType::Meta(0), 1000), Ok(Agreement::Weak(None)));
    }

    #[test]
    fn shape_violation_is_reported() {
        let t = parse("\\x. x").unwrap();
        assert!(cross_check(&t, &LinType::Nat, 100).is_err());
    }

    #[test]
    fn small_generated_run_is_deterministic() {
        let cfg = DiffConfig { n: 20, ..DiffConfig::default() };
        let mut a = Summary::default();
        let mut b = Summary::default();
        run_generated(&cfg, &mut a);
        run_generated(&cfg, &mut b);
        assert!(a.ok(), "{:?}", a.failures);
        assert_eq!(a.lines(), b.lines());
        let strip = |s: &Summary| s.reports.iter().map(|r| RunReport { wall_ms: 0.0, ..r.clone() }).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn pcf_rows() {
        let cfg = DiffConfig::default();
        let p = PcfTerm::apps(lrec_core::pcf::programs::add(), [PcfTerm::Num(2), PcfTerm::Num(3)]);
        let row = pcf_row("add", &p, &cfg).unwrap();
        assert_eq!((row.reference, row.compiled, row.agree), (Some(5), Some(5), true));
        let row = pcf_row("add", &lrec_core::pcf::programs::add(), &cfg).unwrap();
        assert!(row.agree && row.reference.is_none());
    }
}
