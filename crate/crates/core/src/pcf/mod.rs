//! PCF: simply typed λ-calculus over numbers with `succ`, `pred`, `iszero`,
//! typed conditionals `cond[A]` and fixpoints `Y[A]`.
//!
//! `iszero` returns a number: 0 for zero and 1 otherwise, and `cond[A] t u v`
//! chooses `u` when `t` is 0. Binders carry their types.

mod compile;

pub use compile::{close_var, compile, compile_body, env_trans, iszero_pcf, pred_pcf, succ_pcf, type_trans, used_env};

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::fuel::Fuel;
use crate::syntax::parse::{syntax_error, Parser, Tok};
use crate::syntax::{NameSupply, ParseError, Var};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum PcfType {
    Nat,
    Arrow(Box<PcfType>, Box<PcfType>),
}

impl PcfType {
    pub fn arrow(a: PcfType, b: PcfType) -> PcfType {
        PcfType::Arrow(Box::new(a), Box::new(b))
    }

    /// `a1 -> ... -> an -> r`
    pub fn arrows(args: impl IntoIterator<Item = PcfType>, r: PcfType) -> PcfType {
        let args: Vec<PcfType> = args.into_iter().collect();
        args.into_iter().rev().fold(r, |acc, a| PcfType::arrow(a, acc))
    }
}

impl fmt::Display for PcfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcfType::Nat => f.write_str("Nat"),
            PcfType::Arrow(a, b) => {
                if matches!(**a, PcfType::Arrow(..)) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
        }
    }
}

impl fmt::Debug for PcfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum PcfTerm {
    Num(u64),
    Succ,
    Pred,
    IsZero,
    Cond(PcfType),
    Y(PcfType),
    Var(Var),
    Lam(Var, PcfType, Arc<PcfTerm>),
    App(Arc<PcfTerm>, Arc<PcfTerm>),
}

impl PcfTerm {
    pub fn var(x: &str) -> PcfTerm {
        PcfTerm::Var(Var::new(x))
    }

    pub fn lam(x: &str, a: PcfType, body: PcfTerm) -> PcfTerm {
        PcfTerm::Lam(Var::new(x), a, Arc::new(body))
    }

    pub fn app(f: PcfTerm, a: PcfTerm) -> PcfTerm {
        PcfTerm::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: PcfTerm, args: impl IntoIterator<Item = PcfTerm>) -> PcfTerm {
        args.into_iter().fold(f, PcfTerm::app)
    }

    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        fv_go(self, &mut bound, &mut out);
        out
    }

    pub fn has_free(&self, x: &Var) -> bool {
        self.free_vars().contains(x)
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// A number, λ-abstraction, constant or partially applied conditional.
    pub fn is_value(&self) -> bool {
        match self {
            PcfTerm::Num(_)
            | PcfTerm::Succ
            | PcfTerm::Pred
            | PcfTerm::IsZero
            | PcfTerm::Cond(_)
            | PcfTerm::Y(_)
            | PcfTerm::Lam(..) => true,
            PcfTerm::Var(_) => false,
            PcfTerm::App(f, _) => match &**f {
                PcfTerm::Cond(_) => true,
                PcfTerm::App(g, _) => matches!(**g, PcfTerm::Cond(_)),
                _ => false,
            },
        }
    }
}

fn fv_go(t: &PcfTerm, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
    match t {
        PcfTerm::Var(x) => {
            if !bound.contains(x) && !out.contains(x) {
                out.push(x.clone());
            }
        }
        PcfTerm::Lam(x, _, b) => {
            bound.push(x.clone());
            fv_go(b, bound, out);
            bound.pop();
        }
        PcfTerm::App(f, a) => {
            fv_go(f, bound, out);
            fv_go(a, bound, out);
        }
        _ => {}
    }
}

impl fmt::Display for PcfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcfTerm::Lam(x, a, b) => write!(f, "fun {x} : {a}. {b}"),
            PcfTerm::App(..) => {
                let mut spine = Vec::new();
                let mut head = self;
                while let PcfTerm::App(g, a) = head {
                    spine.push(a);
                    head = g;
                }
                if matches!(head, PcfTerm::Lam(..)) {
                    write!(f, "({head})")?;
                } else {
                    write!(f, "{head}")?;
                }
                for a in spine.into_iter().rev() {
                    if matches!(**a, PcfTerm::App(..) | PcfTerm::Lam(..)) {
                        write!(f, " ({a})")?;
                    } else {
                        write!(f, " {a}")?;
                    }
                }
                Ok(())
            }
            PcfTerm::Num(n) => write!(f, "{n}"),
            PcfTerm::Succ => f.write_str("succ"),
            PcfTerm::Pred => f.write_str("pred"),
            PcfTerm::IsZero => f.write_str("iszero"),
            PcfTerm::Cond(a) => write!(f, "cond[{a}]"),
            PcfTerm::Y(a) => write!(f, "Y[{a}]"),
            PcfTerm::Var(x) => write!(f, "{x}"),
        }
    }
}

impl fmt::Debug for PcfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `t[u/x]` for closed `u`.
///
/// # Panics
///
/// If `u` is open.
pub fn pcf_subst(t: &PcfTerm, x: &Var, u: &PcfTerm) -> PcfTerm {
    assert!(u.is_closed(), "PCF substitution payload must be closed");
    subst_go(t, x, u)
}

fn subst_go(t: &PcfTerm, x: &Var, u: &PcfTerm) -> PcfTerm {
    match t {
        PcfTerm::Var(y) if y == x => u.clone(),
        PcfTerm::Lam(y, a, b) if y != x => PcfTerm::Lam(y.clone(), a.clone(), Arc::new(subst_go(b, x, u))),
        PcfTerm::App(f, a) => PcfTerm::App(Arc::new(subst_go(f, x, u)), Arc::new(subst_go(a, x, u))),
        _ => t.clone(),
    }
}

/// Renames binders apart from each other and from free variables.
pub fn pcf_freshen(t: &PcfTerm) -> PcfTerm {
    let mut supply = NameSupply::new();
    for x in t.free_vars() {
        supply.reserve(&x);
    }
    let mut scope = Vec::new();
    freshen_go(t, &mut supply, &mut scope)
}

fn freshen_go(t: &PcfTerm, supply: &mut NameSupply, scope: &mut Vec<(Var, Var)>) -> PcfTerm {
    match t {
        PcfTerm::Var(x) => match scope.iter().rev().find(|(o, _)| o == x) {
            Some((_, n)) => PcfTerm::Var(n.clone()),
            None => t.clone(),
        },
        PcfTerm::Lam(x, a, b) => {
            let n = supply.fresh(x.as_str());
            scope.push((x.clone(), n.clone()));
            let nb = freshen_go(b, supply, scope);
            scope.pop();
            PcfTerm::Lam(n, a.clone(), Arc::new(nb))
        }
        PcfTerm::App(f, a) => {
            PcfTerm::App(Arc::new(freshen_go(f, supply, scope)), Arc::new(freshen_go(a, supply, scope)))
        }
        _ => t.clone(),
    }
}

/// Every binder and variable name in `t`.
pub(crate) fn pcf_names(t: &PcfTerm, out: &mut NameSupply) {
    match t {
        PcfTerm::Var(x) => out.reserve(x),
        PcfTerm::Lam(x, _, b) => {
            out.reserve(x);
            pcf_names(b, out);
        }
        PcfTerm::App(f, a) => {
            pcf_names(f, out);
            pcf_names(a, out);
        }
        _ => {}
    }
}

// ---------------------------------------------------------------------------
// Typing
// ---------------------------------------------------------------------------

/// Ordered typing assumptions.
pub type PcfEnv = Vec<(Var, PcfType)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PcfTypeError {
    #[error("in {term}: expected {expected}, found {found}")]
    Mismatch { term: String, expected: PcfType, found: PcfType },
    #[error("in {term}: {found} is not a function type")]
    NotAFunction { term: String, found: PcfType },
    #[error("unbound variable {0}")]
    Unbound(Var),
}

fn lookup<'e>(env: &'e [(Var, PcfType)], x: &Var) -> Option<&'e PcfType> {
    env.iter().rev().find(|(y, _)| y == x).map(|(_, a)| a)
}

/// Simple type checking with annotated binders.
pub fn pcf_check(t: &PcfTerm, env: &[(Var, PcfType)]) -> Result<PcfType, PcfTypeError> {
    let mut scope: Vec<(Var, PcfType)> = env.to_vec();
    check_go(t, &mut scope)
}

fn check_go(t: &PcfTerm, scope: &mut Vec<(Var, PcfType)>) -> Result<PcfType, PcfTypeError> {
    let nat = || PcfType::Nat;
    Ok(match t {
        PcfTerm::Num(_) => nat(),
        PcfTerm::Succ | PcfTerm::Pred | PcfTerm::IsZero => PcfType::arrow(nat(), nat()),
        PcfTerm::Cond(a) => PcfType::arrows([nat(), a.clone(), a.clone()], a.clone()),
        PcfTerm::Y(a) => PcfType::arrow(PcfType::arrow(a.clone(), a.clone()), a.clone()),
        PcfTerm::Var(x) => lookup(scope, x).cloned().ok_or_else(|| PcfTypeError::Unbound(x.clone()))?,
        PcfTerm::Lam(x, a, b) => {
            scope.push((x.clone(), a.clone()));
            let r = check_go(b, scope);
            scope.pop();
            PcfType::arrow(a.clone(), r?)
        }
        PcfTerm::App(f, a) => {
            let tf = check_go(f, scope)?;
            let ta = check_go(a, scope)?;
            match tf {
                PcfType::Arrow(dom, cod) => {
                    if *dom != ta {
                        return Err(PcfTypeError::Mismatch { term: format!("{t}"), expected: *dom, found: ta });
                    }
                    *cod
                }
                PcfType::Nat => return Err(PcfTypeError::NotAFunction { term: format!("{t}"), found: tf }),
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PcfOutcome {
    Val(PcfTerm),
    FuelExhausted,
    /// Ill-typed input.
    Stuck(String),
}

impl PcfOutcome {
    pub fn nat(&self) -> Option<u64> {
        match self {
            PcfOutcome::Val(PcfTerm::Num(n)) => Some(*n),
            _ => None,
        }
    }
}

enum Halt {
    Fuel,
    Stuck(String),
}

struct PcfEval<'f> {
    fuel: &'f mut Fuel,
}

impl PcfEval<'_> {
    fn number(&mut self, t: &PcfTerm) -> Result<u64, Halt> {
        match self.eval(t)? {
            PcfTerm::Num(n) => Ok(n),
            v => Err(Halt::Stuck(format!("expected a number, got {v}"))),
        }
    }

    fn eval(&mut self, t: &PcfTerm) -> Result<PcfTerm, Halt> {
        let mut t = t.clone();
        loop {
            if !self.fuel.take() {
                return Err(Halt::Fuel);
            }
            if t.is_value() {
                return Ok(t);
            }
            let PcfTerm::App(s, arg) = &t else {
                return Err(Halt::Stuck(format!("free variable in {t}")));
            };
            if !s.is_value() {
                let v = self.eval(s)?;
                t = PcfTerm::App(Arc::new(v), arg.clone());
                continue;
            }
            t = match &**s {
                PcfTerm::Lam(x, _, body) => pcf_subst(body, x, arg),
                PcfTerm::Succ => return Ok(PcfTerm::Num(self.number(arg)? + 1)),
                PcfTerm::Pred => return Ok(PcfTerm::Num(self.number(arg)?.saturating_sub(1))),
                PcfTerm::IsZero => return Ok(PcfTerm::Num(u64::from(self.number(arg)? != 0))),
                PcfTerm::Y(_) => PcfTerm::app((**arg).clone(), t.clone()),
                PcfTerm::App(g, u) => match &**g {
                    PcfTerm::App(c, test) if matches!(**c, PcfTerm::Cond(_)) => {
                        if self.number(test)? == 0 {
                            (**u).clone()
                        } else {
                            (**arg).clone()
                        }
                    }
                    _ => return Err(Halt::Stuck(format!("cannot apply {s}"))),
                },
                other => return Err(Halt::Stuck(format!("cannot apply {other}"))),
            };
        }
    }
}

/// Call-by-name big-step evaluation of a closed PCF term, one fuel unit per
/// rule instance.
///
/// # Panics
///
/// If `t` is open.
pub fn pcf_eval(t: &PcfTerm, fuel: &mut Fuel) -> PcfOutcome {
    assert!(t.is_closed(), "PCF evaluation requires a closed term");
    match (PcfEval { fuel }).eval(t) {
        Ok(v) => PcfOutcome::Val(v),
        Err(Halt::Fuel) => PcfOutcome::FuelExhausted,
        Err(Halt::Stuck(m)) => PcfOutcome::Stuck(m),
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Resolves `@name` references in PCF source.
pub trait PcfResolve {
    fn resolve(&self, name: &str, arg: Option<&str>) -> Result<PcfTerm, String>;
}

impl<F> PcfResolve for F
where
    F: Fn(&str, Option<&str>) -> Result<PcfTerm, String>,
{
    fn resolve(&self, name: &str, arg: Option<&str>) -> Result<PcfTerm, String> {
        self(name, arg)
    }
}

pub struct NoPcfRefs;

impl PcfResolve for NoPcfRefs {
    fn resolve(&self, name: &str, _arg: Option<&str>) -> Result<PcfTerm, String> {
        Err(format!("unknown reference @{name}"))
    }
}

const PCF_KEYWORDS: &[&str] = &["fun", "succ", "pred", "iszero", "cond", "Y"];

struct PcfParser<'a> {
    p: Parser<'a>,
    refs: &'a dyn PcfResolve,
}

impl PcfParser<'_> {
    fn ty(&mut self) -> Result<PcfType, ParseError> {
        let a = match self.p.peek() {
            Tok::Ident(s) if s == "Nat" || s == "nat" => {
                self.p.bump();
                PcfType::Nat
            }
            Tok::LParen => {
                self.p.bump();
                let t = self.ty()?;
                self.p.expect(Tok::RParen)?;
                t
            }
            _ => return self.p.unexpected("a type"),
        };
        if *self.p.peek() == Tok::Arrow {
            self.p.bump();
            return Ok(PcfType::arrow(a, self.ty()?));
        }
        Ok(a)
    }

    fn binder(&mut self) -> Result<Var, ParseError> {
        match self.p.peek() {
            Tok::Ident(s) if !PCF_KEYWORDS.contains(&s.as_str()) => {
                let v = Var::new(s);
                self.p.bump();
                Ok(v)
            }
            _ => self.p.unexpected("a variable name"),
        }
    }

    fn term(&mut self) -> Result<PcfTerm, ParseError> {
        if self.at_lambda() {
            return self.lambda();
        }
        let mut head = self.atom()?;
        loop {
            if self.at_lambda() {
                let last = self.lambda()?;
                return Ok(PcfTerm::app(head, last));
            }
            if !self.starts_atom() {
                return Ok(head);
            }
            let a = self.atom()?;
            head = PcfTerm::app(head, a);
        }
    }

    fn at_lambda(&self) -> bool {
        *self.p.peek() == Tok::Lambda || self.p.at_keyword("fun")
    }

    fn starts_atom(&self) -> bool {
        matches!(self.p.peek(), Tok::Ident(_) | Tok::Num(_) | Tok::LParen | Tok::Ref(..))
    }

    fn lambda(&mut self) -> Result<PcfTerm, ParseError> {
        self.p.bump();
        // fun x : A . t   or   fun (x : A) (y : B) . t
        let mut binders = Vec::new();
        if *self.p.peek() == Tok::LParen {
            while *self.p.peek() == Tok::LParen {
                self.p.bump();
                let x = self.binder()?;
                self.p.expect(Tok::Colon)?;
                let a = self.ty()?;
                self.p.expect(Tok::RParen)?;
                binders.push((x, a));
            }
        } else {
            let x = self.binder()?;
            self.p.expect(Tok::Colon)?;
            let a = self.ty()?;
            binders.push((x, a));
        }
        self.p.expect(Tok::Dot)?;
        let body = self.term()?;
        Ok(binders.into_iter().rev().fold(body, |b, (x, a)| PcfTerm::Lam(x, a, Arc::new(b))))
    }

    fn bracket_type(&mut self) -> Result<PcfType, ParseError> {
        self.p.expect(Tok::LBracket)?;
        let a = self.ty()?;
        self.p.expect(Tok::RBracket)?;
        Ok(a)
    }

    fn atom(&mut self) -> Result<PcfTerm, ParseError> {
        let at = self.p.offset();
        match self.p.peek().clone() {
            Tok::Num(n) => {
                self.p.bump();
                Ok(PcfTerm::Num(n))
            }
            Tok::LParen => {
                self.p.bump();
                let t = self.term()?;
                self.p.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ref(name, arg) => {
                self.p.bump();
                let t = self.refs.resolve(&name, arg.as_deref()).map_err(|m| syntax_error(self.p.text, at, m))?;
                if !t.is_closed() {
                    return Err(syntax_error(self.p.text, at, format!("reference @{name} is not closed")));
                }
                Ok(t)
            }
            Tok::Ident(s) => match s.as_str() {
                "succ" => {
                    self.p.bump();
                    Ok(PcfTerm::Succ)
                }
                "pred" => {
                    self.p.bump();
                    Ok(PcfTerm::Pred)
                }
                "iszero" => {
                    self.p.bump();
                    Ok(PcfTerm::IsZero)
                }
                "cond" => {
                    self.p.bump();
                    Ok(PcfTerm::Cond(self.bracket_type()?))
                }
                "Y" => {
                    self.p.bump();
                    Ok(PcfTerm::Y(self.bracket_type()?))
                }
                _ => Ok(PcfTerm::Var(self.binder()?)),
            },
            _ => self.p.unexpected("a PCF term"),
        }
    }
}

/// Parses PCF source. Binders are renamed apart.
pub fn parse_pcf(text: &str, refs: &dyn PcfResolve) -> Result<PcfTerm, ParseError> {
    let mut pp = PcfParser { p: Parser::new(text)?, refs };
    let t = pp.term()?;
    pp.p.expect_eof()?;
    Ok(pcf_freshen(&t))
}

/// Parses a PCF type: `Nat`, `A -> B` (right-associative), parentheses.
pub fn parse_pcf_type(text: &str) -> Result<PcfType, ParseError> {
    let mut pp = PcfParser { p: Parser::new(text)?, refs: &NoPcfRefs };
    let t = pp.ty()?;
    pp.p.expect_eof()?;
    Ok(t)
}

/// Example programs used by tests and the corpus.
///
/// Call-by-name shares nothing, so the programs only copy cheap counters:
/// multiplication and factorial apply a function repeatedly to an
/// accumulator instead of duplicating a pending product.
pub mod programs {
    use super::*;

    /// `rep i h c` applies `h` to `c`, `i` times.
    pub const REP: &str = "Y[Nat -> (Nat -> Nat) -> Nat -> Nat] (fun r : Nat -> (Nat -> Nat) -> Nat -> Nat. \
        fun i : Nat. fun h : Nat -> Nat. fun c : Nat. cond[Nat] i c (r (pred i) h (h c)))";

    /// Addition by recursion on the first argument.
    pub const ADD: &str = "Y[Nat -> Nat -> Nat] (fun f : Nat -> Nat -> Nat. \
        fun m : Nat. fun n : Nat. cond[Nat] m n (succ (f (pred m) n)))";

    fn parse(src: &str) -> PcfTerm {
        parse_pcf(src, &NoPcfRefs).expect("built-in PCF program")
    }

    pub fn rep() -> PcfTerm {
        parse(REP)
    }

    pub fn add() -> PcfTerm {
        parse(ADD)
    }

    /// `m * n` as `m` additions of `n` to 0.
    pub fn mult() -> PcfTerm {
        parse(&format!("fun m : Nat. fun n : Nat. ({REP}) m (({ADD}) n) 0"))
    }

    /// `fact n`, through `g n c = c + n!` with `g 0 c = c + 1` and
    /// `g n = (g (n - 1))^n`.
    pub fn factorial() -> PcfTerm {
        parse(&format!(
            "fun n : Nat. Y[Nat -> Nat -> Nat] (fun g : Nat -> Nat -> Nat. fun k : Nat. fun c : Nat. \
             cond[Nat] k (succ c) (({REP}) k (g (pred k)) c)) n 0"
        ))
    }

    /// `Y[Nat] (λx. x)`: diverges.
    pub fn omega() -> PcfTerm {
        PcfTerm::app(PcfTerm::Y(PcfType::Nat), PcfTerm::lam("x", PcfType::Nat, PcfTerm::var("x")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> PcfType {
        PcfType::Nat
    }

    fn run(t: &PcfTerm) -> PcfOutcome {
        pcf_eval(t, &mut Fuel::new(100_000))
    }

    #[test]
    fn constant_types() {
        assert_eq!(pcf_check(&PcfTerm::Succ, &[]).unwrap(), PcfType::arrow(nat(), nat()));
        assert_eq!(
            pcf_check(&PcfTerm::Cond(nat()), &[]).unwrap(),
            PcfType::arrows([nat(), nat(), nat()], nat())
        );
        let bad = PcfTerm::app(PcfTerm::Y(nat()), PcfTerm::lam("f", PcfType::arrow(nat(), nat()), PcfTerm::var("f")));
        assert!(pcf_check(&bad, &[]).is_err());
    }

    #[test]
    fn evaluation_rules() {
        assert_eq!(run(&PcfTerm::app(PcfTerm::Pred, PcfTerm::Num(0))).nat(), Some(0));
        assert_eq!(run(&PcfTerm::app(PcfTerm::Pred, PcfTerm::Num(4))).nat(), Some(3));
        assert_eq!(run(&PcfTerm::app(PcfTerm::IsZero, PcfTerm::Num(4))).nat(), Some(1));
        assert_eq!(run(&PcfTerm::app(PcfTerm::IsZero, PcfTerm::Num(0))).nat(), Some(0));
        let c = PcfTerm::apps(PcfTerm::Cond(nat()), [PcfTerm::Num(0), PcfTerm::Num(7), programs::omega()]);
        assert_eq!(run(&c).nat(), Some(7));
        assert_eq!(pcf_eval(&programs::omega(), &mut Fuel::new(1000)), PcfOutcome::FuelExhausted);
        let partial = PcfTerm::apps(PcfTerm::Cond(nat()), [PcfTerm::Num(0), PcfTerm::Num(7)]);
        assert_eq!(run(&partial), PcfOutcome::Val(partial.clone()));
    }

    #[test]
    fn recursive_programs() {
        let add = PcfTerm::apps(programs::add(), [PcfTerm::Num(3), PcfTerm::Num(4)]);
        assert_eq!(run(&add).nat(), Some(7));
        let mult = PcfTerm::apps(programs::mult(), [PcfTerm::Num(3), PcfTerm::Num(4)]);
        assert_eq!(run(&mult).nat(), Some(12));
        let fact = PcfTerm::app(programs::factorial(), PcfTerm::Num(5));
        assert_eq!(pcf_check(&fact, &[]).unwrap(), nat());
        assert_eq!(run(&fact).nat(), Some(120));
    }

    #[test]
    fn parsing() {
        let t = parse_pcf("(fun x : Nat. succ x) 4", &NoPcfRefs).unwrap();
        assert_eq!(run(&t).nat(), Some(5));
        let y = parse_pcf("Y[Nat -> Nat] (fun f : Nat -> Nat. fun n : Nat. cond[Nat] n 0 (f (pred n))) 3", &NoPcfRefs).unwrap();
        assert_eq!(pcf_check(&y, &[]).unwrap(), nat());
        assert_eq!(run(&y).nat(), Some(0));
        let multi = parse_pcf("fun (x : Nat) (y : Nat -> Nat). y x", &NoPcfRefs).unwrap();
        assert_eq!(
            pcf_check(&multi, &[]).unwrap(),
            PcfType::arrows([nat(), PcfType::arrow(nat(), nat())], nat())
        );
        assert_eq!(alloc::format!("{}", parse_pcf_type("(Nat -> Nat) -> Nat").unwrap()), "(Nat -> Nat) -> Nat");
        assert!(parse_pcf("fun x. x", &NoPcfRefs).is_err());
    }

    #[test]
    fn display_round_trip() {
        let f = programs::factorial();
        let back = parse_pcf(&alloc::format!("{f}"), &NoPcfRefs).unwrap();
        assert_eq!(pcf_freshen(&back), pcf_freshen(&f));
    }
}
