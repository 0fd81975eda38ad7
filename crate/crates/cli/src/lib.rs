//! The `lrec` command-line driver.
//!
//! Exit codes: 0 success, 1 error (I/O, parse, linearity, type, failed
//! difftest), 2 fuel exhausted, 3 stuck. Results go to stdout, diagnostics to
//! stderr. `--report FILE` appends one JSON line per run.

pub mod corpus;
pub mod difftest;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lrec_core::eval::{evaluate, force_numeral_with, EvalOptions, EvalOutcome, NatOutcome, Strategy};
use lrec_core::machine::{machine_force_numeral, run, MachineNat, MachineOutcome};
use lrec_core::minext::{mforce_numeral, mtype, MTerm};
use lrec_core::pcf::{compile, pcf_check, pcf_eval, type_trans, PcfOutcome};
use lrec_core::reduction::{normalize_in, reduce_whnf_in, run_steps, step_lo_in, step_random};
use lrec_core::stdlib::{Catalog, ENTRIES};
use lrec_core::syntax::parse_type;
use lrec_core::typing::{check_in, infer_in, show_type, TypeEnv};
use lrec_core::{Calculus, Fuel, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Kind, Source};
use crate::difftest::DiffConfig;
use crate::report::{digest, RunReport, Timer};

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "lrec", version, about = "Linear λ-calculus with recursion: checker, evaluators, machine and PCF compiler")]
pub struct Cli {
    /// Append a JSON-lines run report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CalculusArg {
    Lrec,
    Llcim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Cbn,
    Cbv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReductionArg {
    /// Leftmost-outermost.
    Lo,
    /// A uniformly random redex at each step (see --seed).
    Random,
}

#[derive(Debug, Args)]
pub struct Input {
    /// A `.lrec`, `.llcim` or `.pcf` file.
    pub file: PathBuf,
    /// Which definition to use (default: `main`, else the last one).
    #[arg(long)]
    pub entry: Option<String>,
}

#[derive(Debug, Args)]
pub struct FuelArg {
    /// Step budget. Reduction counts rule applications, the machine counts
    /// transitions.
    #[arg(long, env = "LREC_FUEL", default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, check linearity and print the inferred type.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        calculus: Option<CalculusArg>,
        /// Print unconstrained type variables as Nat.
        #[arg(long)]
        ground: bool,
        /// Check against this type instead of printing the inferred one.
        #[arg(long = "type", value_name = "TYPE")]
        ty: Option<String>,
    },
    /// Big-step evaluation to a weak head normal form.
    Eval {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fuel: FuelArg,
        #[arg(long, value_enum)]
        calculus: Option<CalculusArg>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Cbn)]
        strategy: StrategyArg,
        /// Evaluate under `S` and print the number.
        #[arg(long)]
        force_nat: bool,
        /// Evaluate `let` by building and evaluating `(λx y. u) t1 t2`.
        #[arg(long)]
        literal_let: bool,
    },
    /// Run the stack machine.
    Machine {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fuel: FuelArg,
        /// Print one line per transition.
        #[arg(long, conflicts_with = "force_nat")]
        trace: bool,
        #[arg(long)]
        force_nat: bool,
    },
    /// Reduce to normal form.
    Normalize {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fuel: FuelArg,
        #[arg(long, value_enum)]
        calculus: Option<CalculusArg>,
        #[arg(long, value_enum, default_value_t = ReductionArg::Lo)]
        strategy: ReductionArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print one line per step.
        #[arg(long)]
        trace: bool,
    },
    /// Print a standard encoding, or list them all.
    Stdlib {
        name: Option<String>,
        /// Type index for typed entries such as Y, D, M, cond and erase.
        #[arg(long = "type", value_name = "TYPE")]
        ty: Option<String>,
        #[arg(long, value_enum, default_value_t = CalculusArg::Lrec)]
        calculus: CalculusArg,
    },
    /// PCF front end.
    Pcf {
        #[command(subcommand)]
        command: PcfCommand,
    },
    /// Cross-check normalisation, evaluation and the machine on generated
    /// terms and on a corpus directory.
    Difftest {
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(short, long, default_value_t = 300)]
        n: usize,
        #[command(flatten)]
        fuel: FuelArg,
        /// Budget for running compiled PCF programs.
        #[arg(long, default_value_t = 10_000_000)]
        compiled_fuel: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum PcfCommand {
    /// Print the type of a PCF program.
    Check {
        #[command(flatten)]
        input: Input,
    },
    /// Evaluate a PCF program by name.
    Eval {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fuel: FuelArg,
    },
    /// Compile a closed PCF program to λ-rec.
    Compile {
        #[command(flatten)]
        input: Input,
        /// Run the compiled program and print the number it computes.
        #[arg(long)]
        run: bool,
        #[command(flatten)]
        fuel: FuelArg,
    },
}

/// The end state of a command that did not fail outright.
struct Done {
    code: i32,
    outcome: &'static str,
    result: Option<String>,
    fuel_used: u64,
}

impl Done {
    fn ok(result: String) -> Done {
        Done { code: 0, outcome: "ok", result: Some(result), fuel_used: 0 }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn calculus_for(arg: Option<CalculusArg>, path: &Path) -> Calculus {
    match arg {
        Some(CalculusArg::Lrec) => Calculus::Lrec,
        Some(CalculusArg::Llcim) => Calculus::Llcim,
        None if Kind::of(path) == Some(Kind::Llcim) => Calculus::Llcim,
        None => Calculus::Lrec,
    }
}

fn source(input: &Input) -> Result<Source> {
    let text = corpus::read(&input.file)?;
    corpus::split(&text).with_context(|| input.file.display().to_string())
}

fn load(input: &Input, calculus: Calculus) -> Result<Term> {
    let s = source(input)?;
    let (_, t) = corpus::load_term(&s, calculus, input.entry.as_deref()).with_context(|| input.file.display().to_string())?;
    Ok(t)
}

fn load_pcf(input: &Input) -> Result<lrec_core::pcf::PcfTerm> {
    let s = source(input)?;
    let (_, t) = corpus::load_pcf_term(&s, input.entry.as_deref()).with_context(|| input.file.display().to_string())?;
    Ok(t)
}

fn value_done(outcome: &EvalOutcome, fuel: &Fuel, io: &mut Io) -> Result<Done> {
    Ok(match outcome {
        EvalOutcome::Val(v) => {
            writeln!(io.out, "{v}")?;
            Done { code: 0, outcome: "value", result: Some(v.to_string()), fuel_used: fuel.used() }
        }
        EvalOutcome::FuelExhausted => fuel_done(fuel, io)?,
        EvalOutcome::Stuck { reason, subterm } => {
            writeln!(io.err, "stuck: {reason} in {subterm}")?;
            Done { code: 3, outcome: "stuck", result: Some(reason.to_string()), fuel_used: fuel.used() }
        }
    })
}

fn fuel_done(fuel: &Fuel, io: &mut Io) -> Result<Done> {
    writeln!(io.err, "fuel exhausted after {} steps", fuel.used())?;
    Ok(Done { code: 2, outcome: "fuel-exhausted", result: None, fuel_used: fuel.used() })
}

fn nat_done(n: NatOutcome, fuel: &Fuel, io: &mut Io) -> Result<Done> {
    Ok(match n {
        NatOutcome::Nat(k) => {
            writeln!(io.out, "{k}")?;
            Done { code: 0, outcome: "value", result: Some(k.to_string()), fuel_used: fuel.used() }
        }
        NatOutcome::FuelExhausted => fuel_done(fuel, io)?,
        NatOutcome::NotANat(v) => {
            writeln!(io.err, "stuck: the value {v} is not a number")?;
            Done { code: 3, outcome: "stuck", result: Some(v.to_string()), fuel_used: fuel.used() }
        }
        NatOutcome::Stuck { reason, subterm } => {
            writeln!(io.err, "stuck: {reason} in {subterm}")?;
            Done { code: 3, outcome: "stuck", result: Some(reason.to_string()), fuel_used: fuel.used() }
        }
    })
}

fn cmd_check(input: &Input, calculus: Option<CalculusArg>, ground: bool, ty: Option<&str>, io: &mut Io) -> Result<Done> {
    let c = calculus_for(calculus, &input.file);
    let t = load(input, c)?;
    let env = TypeEnv::new();
    let found = match ty {
        Some(text) => {
            let want = parse_type(text).map_err(|e| anyhow!("in --type: {e}"))?;
            check_in(c, &t, &env, &want)?
        }
        None if c == Calculus::Llcim => mtype(&MTerm::new(t)?, &env)?,
        None => infer_in(c, &t, &env)?,
    };
    let shown = show_type(&found, ground);
    writeln!(io.out, "{shown}")?;
    Ok(Done::ok(shown))
}

fn cmd_eval(input: &Input, fuel: u64, calculus: Option<CalculusArg>, opts: EvalOptions, force_nat: bool, io: &mut Io) -> Result<Done> {
    let c = calculus_for(calculus, &input.file);
    let t = load(input, c)?;
    let mut fuel = Fuel::new(fuel);
    if c == Calculus::Llcim {
        // no big-step rules for the iterator and minimiser: use weak-head reduction
        if opts != EvalOptions::cbn() {
            bail!("the minimiser calculus is evaluated by name only, without --literal-let");
        }
        let m = MTerm::new(t)?;
        if force_nat {
            return nat_done(mforce_numeral(&m, &mut fuel), &fuel, io);
        }
        let outcome = match reduce_whnf_in(c, m.term(), &mut fuel) {
            Ok(r) if r.term.is_whnf() => EvalOutcome::Val(r.term),
            Ok(r) => EvalOutcome::Stuck { reason: lrec_core::eval::StuckReason::Unsupported("open head"), subterm: r.term },
            Err(_) => EvalOutcome::FuelExhausted,
        };
        return value_done(&outcome, &fuel, io);
    }
    if force_nat {
        return nat_done(force_numeral_with(&t, &opts, &mut fuel), &fuel, io);
    }
    let outcome = evaluate(&t, &opts, &mut fuel);
    value_done(&outcome, &fuel, io)
}

fn cmd_machine(input: &Input, fuel: u64, trace: bool, force_nat: bool, io: &mut Io) -> Result<Done> {
    let t = load(input, Calculus::Lrec)?;
    let mut fuel = Fuel::new(fuel);
    if force_nat {
        let n = match machine_force_numeral(&t, &mut fuel) {
            MachineNat::Nat(k) => NatOutcome::Nat(k),
            MachineNat::FuelExhausted => NatOutcome::FuelExhausted,
            MachineNat::NotANat(v) => NatOutcome::NotANat(v),
            MachineNat::Stuck(c) => {
                writeln!(io.err, "stuck: machine cannot step from {} with {} stack items", c.code, c.stack.len())?;
                return Ok(Done { code: 3, outcome: "stuck", result: None, fuel_used: fuel.used() });
            }
        };
        return nat_done(n, &fuel, io);
    }
    let r = run(&t, &mut fuel, trace);
    for line in &r.trace {
        writeln!(io.out, "{line}")?;
    }
    match r.outcome {
        MachineOutcome::Halted { value, .. } => {
            writeln!(io.out, "{value}")?;
            Ok(Done { code: 0, outcome: "value", result: Some(value.to_string()), fuel_used: fuel.used() })
        }
        MachineOutcome::FuelExhausted(_) => fuel_done(&fuel, io),
        MachineOutcome::Stuck(c) => {
            writeln!(io.err, "stuck: machine cannot step from {} with {} stack items", c.code, c.stack.len())?;
            Ok(Done { code: 3, outcome: "stuck", result: Some(c.code.to_string()), fuel_used: fuel.used() })
        }
    }
}

fn cmd_normalize(
    input: &Input,
    fuel: u64,
    calculus: Option<CalculusArg>,
    strategy: ReductionArg,
    seed: u64,
    trace: bool,
    io: &mut Io,
) -> Result<Done> {
    let c = calculus_for(calculus, &input.file);
    let t = load(input, c)?;
    let mut fuel = Fuel::new(fuel);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    let observe = |n: u64, s: &lrec_core::reduction::Step| {
        if trace {
            lines.push(format!("{n}  {}  {}  {}", s.rule, s.path, s.term));
        }
    };
    let r = match strategy {
        ReductionArg::Lo if !trace => normalize_in(c, &t, &mut fuel),
        ReductionArg::Lo => run_steps(&t, &mut fuel, |u| step_lo_in(c, u), observe),
        ReductionArg::Random => run_steps(&t, &mut fuel, |u| step_random(c, u, &mut rng), observe),
    };
    for l in &lines {
        writeln!(io.out, "{l}")?;
    }
    match r {
        Ok(r) => {
            writeln!(io.out, "{}", r.term)?;
            Ok(Done { code: 0, outcome: "normal-form", result: Some(r.term.to_string()), fuel_used: fuel.used() })
        }
        Err(_) => fuel_done(&fuel, io),
    }
}

fn cmd_stdlib(name: Option<&str>, ty: Option<&str>, calculus: CalculusArg, io: &mut Io) -> Result<Done> {
    let c = if calculus == CalculusArg::Llcim { Calculus::Llcim } else { Calculus::Lrec };
    let Some(name) = name else {
        for e in ENTRIES {
            let head = if e.typed { format!("{}[T]", e.name) } else { e.name.to_string() };
            let aliases = if e.aliases.is_empty() { String::new() } else { format!(" (also {})", e.aliases.join(", ")) };
            writeln!(io.out, "{head:<10} {}{aliases}", e.summary)?;
        }
        return Ok(Done::ok(format!("{} entries", ENTRIES.len())));
    };
    let ty = ty.map(|t| parse_type(t).map_err(|e| anyhow!("in --type: {e}"))).transpose()?;
    let t = Catalog::new(c).get(name, ty.as_ref()).map_err(|e| anyhow!(e))?;
    writeln!(io.out, "{t}")?;
    Ok(Done::ok(t.to_string()))
}

fn cmd_pcf(cmd: &PcfCommand, io: &mut Io) -> Result<Done> {
    match cmd {
        PcfCommand::Check { input } => {
            let p = load_pcf(input)?;
            let ty = pcf_check(&p, &[])?;
            writeln!(io.out, "{ty}")?;
            Ok(Done::ok(ty.to_string()))
        }
        PcfCommand::Eval { input, fuel } => {
            let p = load_pcf(input)?;
            pcf_check(&p, &[])?;
            let mut fuel = Fuel::new(fuel.fuel);
            match pcf_eval(&p, &mut fuel) {
                PcfOutcome::Val(v) => {
                    writeln!(io.out, "{v}")?;
                    Ok(Done { code: 0, outcome: "value", result: Some(v.to_string()), fuel_used: fuel.used() })
                }
                PcfOutcome::FuelExhausted => fuel_done(&fuel, io),
                PcfOutcome::Stuck(s) => {
                    writeln!(io.err, "stuck: {s}")?;
                    Ok(Done { code: 3, outcome: "stuck", result: Some(s), fuel_used: fuel.used() })
                }
            }
        }
        PcfCommand::Compile { input, run, fuel } => {
            let p = load_pcf(input)?;
            let ty = pcf_check(&p, &[])?;
            let t = compile(&p, &[])?;
            if !run {
                writeln!(io.out, "{t}")?;
                return Ok(Done::ok(t.to_string()));
            }
            if ty != lrec_core::pcf::PcfType::Nat {
                bail!("--run needs a program of type Nat, this one has {ty} (compiled to {})", type_trans(&ty));
            }
            let mut fuel = Fuel::new(fuel.fuel);
            let n = force_numeral_with(&t, &EvalOptions::cbn(), &mut fuel);
            nat_done(n, &fuel, io)
        }
    }
}

fn cmd_difftest(corpus: Option<&Path>, cfg: &DiffConfig, io: &mut Io, reports: &mut Vec<RunReport>) -> Result<Done> {
    let summary = difftest::difftest(corpus, cfg).context("reading the corpus")?;
    for (input, why) in &summary.skipped {
        writeln!(io.err, "skipped {input}: {why}")?;
    }
    for l in summary.lines() {
        writeln!(io.out, "{l}")?;
    }
    reports.extend(summary.reports.iter().cloned());
    let ok = summary.ok();
    Ok(Done {
        code: if ok { 0 } else { 1 },
        outcome: if ok { "agree" } else { "disagree" },
        result: summary.lines().first().cloned(),
        fuel_used: 0,
    })
}

fn describe_input(cmd: &Command) -> (String, String) {
    let file = |i: &Input| {
        let d = std::fs::read(&i.file).map(|b| digest(&b)).unwrap_or_default();
        (i.file.display().to_string(), d)
    };
    match cmd {
        Command::Check { input, .. }
        | Command::Eval { input, .. }
        | Command::Machine { input, .. }
        | Command::Normalize { input, .. } => file(input),
        Command::Pcf { command: PcfCommand::Check { input } | PcfCommand::Eval { input, .. } | PcfCommand::Compile { input, .. } } => {
            file(input)
        }
        Command::Stdlib { name, ty, .. } => {
            let s = format!("stdlib:{}{}", name.as_deref().unwrap_or(""), ty.as_ref().map(|t| format!("[{t}]")).unwrap_or_default());
            let d = digest(s.as_bytes());
            (s, d)
        }
        Command::Difftest { corpus, seed, n, .. } => {
            let s = format!("difftest:seed={seed},n={n},corpus={}", corpus.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
            let d = digest(s.as_bytes());
            (s, d)
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Check { .. } => "check",
        Command::Eval { .. } => "eval",
        Command::Machine { .. } => "machine",
        Command::Normalize { .. } => "normalize",
        Command::Stdlib { .. } => "stdlib",
        Command::Pcf { command: PcfCommand::Check { .. } } => "pcf check",
        Command::Pcf { command: PcfCommand::Eval { .. } } => "pcf eval",
        Command::Pcf { command: PcfCommand::Compile { .. } } => "pcf compile",
        Command::Difftest { .. } => "difftest",
    }
}

fn dispatch(cmd: &Command, io: &mut Io, reports: &mut Vec<RunReport>) -> Result<Done> {
    match cmd {
        Command::Check { input, calculus, ground, ty } => cmd_check(input, *calculus, *ground, ty.as_deref(), io),
        Command::Eval { input, fuel, calculus, strategy, force_nat, literal_let } => {
            let strategy = if *strategy == StrategyArg::Cbv { Strategy::Cbv } else { Strategy::Cbn };
            cmd_eval(input, fuel.fuel, *calculus, EvalOptions { strategy, literal_let: *literal_let }, *force_nat, io)
        }
        Command::Machine { input, fuel, trace, force_nat } => cmd_machine(input, fuel.fuel, *trace, *force_nat, io),
        Command::Normalize { input, fuel, calculus, strategy, seed, trace } => {
            cmd_normalize(input, fuel.fuel, *calculus, *strategy, *seed, *trace, io)
        }
        Command::Stdlib { name, ty, calculus } => cmd_stdlib(name.as_deref(), ty.as_deref(), *calculus, io),
        Command::Pcf { command } => cmd_pcf(command, io),
        Command::Difftest { corpus, seed, n, fuel, compiled_fuel } => {
            let cfg = DiffConfig { seed: *seed, n: *n, fuel: fuel.fuel, compiled_fuel: *compiled_fuel };
            cmd_difftest(corpus.as_deref(), &cfg, io, reports)
        }
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let timer = Timer::start();
    let mut io = Io { out, err };
    let mut reports = Vec::new();
    let (input, digest) = describe_input(&cli.command);
    let done = dispatch(&cli.command, &mut io, &mut reports);
    let (code, outcome, result, fuel_used) = match done {
        Ok(d) => (d.code, d.outcome, d.result, d.fuel_used),
        Err(e) => {
            let _ = writeln!(io.err, "error: {e:#}");
            (1, "error", Some(format!("{e:#}")), 0)
        }
    };
    reports.push(RunReport {
        command: command_name(&cli.command).into(),
        input,
        digest,
        outcome: outcome.into(),
        result,
        fuel_used,
        wall_ms: timer.ms(),
    });
    if let Some(path) = &cli.report {
        if let Err(e) = report::append(path, &reports) {
            let _ = writeln!(io.err, "error: writing {}: {e}", path.display());
            return 1;
        }
    }
    code
}

/// Parses arguments and runs. Usage errors exit with 1 so that 2 keeps
/// meaning "fuel exhausted".
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, out, err),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            }
        }
    }
}
