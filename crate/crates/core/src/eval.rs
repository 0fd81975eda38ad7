//! Big-step evaluation of closed λ-rec terms to weak head normal form.
//!
//! Values are `0`, `S t`, `λx.t` and `<s, t>`; nothing below them is
//! evaluated. Fuel is shared by the whole derivation and one unit is spent
//! per rule instance, including the axiom for values.

use alloc::string::String;
use core::fmt;

use crate::fuel::Fuel;
use crate::syntax::{subst, Term, TermKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Cbn,
    Cbv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub strategy: Strategy,
    /// Evaluate `let <x,y> = s in u` by building `(λx y. u) t1 t2` from the
    /// pair `<t1, t2>` and evaluating that, instead of substituting directly.
    pub literal_let: bool,
}

impl EvalOptions {
    pub fn cbn() -> EvalOptions {
        EvalOptions::default()
    }

    pub fn cbv() -> EvalOptions {
        EvalOptions { strategy: Strategy::Cbv, literal_let: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StuckReason {
    /// The head of an application evaluated to something other than a λ.
    NotAFunction,
    /// A `let` or `rec` scrutinee evaluated to something other than a pair.
    NotAPair,
    /// The first component of a `rec` scrutinee is not a number.
    NotANumber,
    /// The big-step rules do not cover this construct.
    Unsupported(&'static str),
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckReason::NotAFunction => f.write_str("applied value is not a function"),
            StuckReason::NotAPair => f.write_str("scrutinee is not a pair"),
            StuckReason::NotANumber => f.write_str("recursion argument is not a number"),
            StuckReason::Unsupported(c) => write!(f, "no evaluation rule for '{c}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    Val(Term),
    FuelExhausted,
    Stuck { reason: StuckReason, subterm: Term },
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Term> {
        match self {
            EvalOutcome::Val(v) => Some(v),
            _ => None,
        }
    }
}

/// Result of reading back a number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NatOutcome {
    Nat(u64),
    FuelExhausted,
    /// Evaluation reached a value that is neither `0` nor `S _`.
    NotANat(Term),
    Stuck { reason: StuckReason, subterm: Term },
}

impl NatOutcome {
    pub fn nat(&self) -> Option<u64> {
        match self {
            NatOutcome::Nat(n) => Some(*n),
            _ => None,
        }
    }
}

enum Halt {
    Fuel,
    Stuck(StuckReason, Term),
}

struct Evaluator<'f> {
    opts: EvalOptions,
    fuel: &'f mut Fuel,
}

impl Evaluator<'_> {
    fn tick(&mut self) -> Result<(), Halt> {
        if self.fuel.take() {
            Ok(())
        } else {
            Err(Halt::Fuel)
        }
    }

    fn eval(&mut self, t: &Term) -> Result<Term, Halt> {
        let cbv = self.opts.strategy == Strategy::Cbv;
        let mut t = t.clone();
        loop {
            self.tick()?;
            let next = match t.kind() {
                TermKind::Zero | TermKind::Suc(_) | TermKind::Lam(..) | TermKind::Pair(..) => return Ok(t),
                TermKind::App(s, a) => {
                    let f = self.eval(s)?;
                    let TermKind::Lam(x, body) = f.kind() else {
                        return Err(Halt::Stuck(StuckReason::NotAFunction, f));
                    };
                    let arg = if cbv { self.eval(a)? } else { a.clone() };
                    subst(body, x, &arg)
                }
                TermKind::LetPair(s, x, y, body) => {
                    let p = self.eval(s)?;
                    let TermKind::Pair(t1, t2) = p.kind() else {
                        return Err(Halt::Stuck(StuckReason::NotAPair, p));
                    };
                    if self.opts.literal_let {
                        let f = Term::lam(x.clone(), Term::lam(y.clone(), body.clone()));
                        Term::app(Term::app(f, t1.clone()), t2.clone())
                    } else if cbv {
                        // the literal rule goes through application, which
                        // evaluates both components first under CBV
                        let v1 = self.eval(t1)?;
                        let v2 = self.eval(t2)?;
                        subst(&subst(body, x, &v1), y, &v2)
                    } else {
                        subst(&subst(body, x, t1), y, t2)
                    }
                }
                TermKind::Rec(s, u, v, w) => {
                    let p = self.eval(s)?;
                    let TermKind::Pair(t1, t2) = p.kind() else {
                        return Err(Halt::Stuck(StuckReason::NotAPair, p));
                    };
                    let n = self.eval(t1)?;
                    match n.kind() {
                        TermKind::Zero => u.clone(),
                        TermKind::Suc(m) => {
                            let next = Term::app(w.clone(), Term::pair(m.clone(), t2.clone()));
                            Term::app(v.clone(), Term::rec(next, u.clone(), v.clone(), w.clone()))
                        }
                        _ => return Err(Halt::Stuck(StuckReason::NotANumber, n)),
                    }
                }
                TermKind::Iter(..) => return Err(Halt::Stuck(StuckReason::Unsupported("iter"), t)),
                TermKind::Min(..) => return Err(Halt::Stuck(StuckReason::Unsupported("min"), t)),
                TermKind::Var(x) => panic!("free variable {x} reached during evaluation"),
            };
            t = next;
        }
    }
}

fn assert_closed(t: &Term) {
    assert!(t.is_closed(), "evaluation requires a closed term, got free variables {:?}", t.free_vars());
}

/// Evaluates a closed term.
///
/// # Panics
///
/// If `t` has free variables.
pub fn evaluate(t: &Term, opts: &EvalOptions, fuel: &mut Fuel) -> EvalOutcome {
    assert_closed(t);
    match (Evaluator { opts: *opts, fuel }).eval(t) {
        Ok(v) => EvalOutcome::Val(v),
        Err(Halt::Fuel) => EvalOutcome::FuelExhausted,
        Err(Halt::Stuck(reason, subterm)) => EvalOutcome::Stuck { reason, subterm },
    }
}

pub fn eval_cbn(t: &Term, fuel: &mut Fuel) -> EvalOutcome {
    evaluate(t, &EvalOptions::cbn(), fuel)
}

pub fn eval_cbv(t: &Term, fuel: &mut Fuel) -> EvalOutcome {
    evaluate(t, &EvalOptions::cbv(), fuel)
}

/// Evaluates to a value and, while it is `S t'`, continues with `t'`.
pub fn force_numeral_with(t: &Term, opts: &EvalOptions, fuel: &mut Fuel) -> NatOutcome {
    assert_closed(t);
    let mut ev = Evaluator { opts: *opts, fuel };
    let mut n = 0u64;
    let mut cur = t.clone();
    loop {
        match ev.eval(&cur) {
            Ok(v) => match v.kind() {
                TermKind::Zero => return NatOutcome::Nat(n),
                TermKind::Suc(m) => {
                    n += 1;
                    cur = m.clone();
                }
                _ => return NatOutcome::NotANat(v),
            },
            Err(Halt::Fuel) => return NatOutcome::FuelExhausted,
            Err(Halt::Stuck(reason, subterm)) => return NatOutcome::Stuck { reason, subterm },
        }
    }
}

/// Call-by-name read-back of a number.
pub fn force_numeral(t: &Term, fuel: &mut Fuel) -> NatOutcome {
    force_numeral_with(t, &EvalOptions::cbn(), fuel)
}

/// `(λx. λy. rec(<0,0>, I, ε(x, Nat), I) y) (Y_Nat I)`: the function only
/// ever discards its argument, and that argument diverges. Call-by-name
/// returns the `λy` abstraction; call-by-value evaluates the argument first
/// and never finishes.
pub fn cbn_cbv_separator() -> Term {
    use crate::stdlib::{erase_term, fix};
    use crate::syntax::freshen;
    use crate::typing::LinType;
    let guard = Term::rec(
        Term::pair(Term::zero(), Term::zero()),
        Term::identity(),
        erase_term(Term::var("x"), &LinType::Nat),
        Term::identity(),
    );
    let f = Term::lam("x", Term::lam("y", Term::app(guard, Term::var("y"))));
    freshen(&Term::app(f, Term::app(fix(&LinType::Nat), Term::identity())))
}

/// Short description of an outcome, for reports.
pub fn describe(o: &EvalOutcome) -> String {
    use alloc::format;
    match o {
        EvalOutcome::Val(v) => format!("value {v}"),
        EvalOutcome::FuelExhausted => "fuel exhausted".into(),
        EvalOutcome::Stuck { reason, subterm } => format!("stuck: {reason} ({subterm})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{numeral, parse};

    fn id() -> Term {
        Term::identity()
    }

    #[test]
    fn identity_application() {
        let t = Term::app(id(), Term::zero());
        assert_eq!(eval_cbn(&t, &mut Fuel::new(10)), EvalOutcome::Val(Term::zero()));
        assert_eq!(eval_cbv(&t, &mut Fuel::new(10)), EvalOutcome::Val(Term::zero()));
    }

    #[test]
    fn separator_converges_only_by_name() {
        let t = cbn_cbv_separator();
        assert!(crate::syntax::check_linear(&t).is_ok());
        crate::typing::infer(&t, &crate::typing::TypeEnv::new()).unwrap();
        let v = eval_cbn(&t, &mut Fuel::new(1000));
        assert!(matches!(v.value().map(Term::kind), Some(TermKind::Lam(..))), "{v:?}");
        assert_eq!(eval_cbv(&t, &mut Fuel::new(100_000)), EvalOutcome::FuelExhausted);
    }

    #[test]
    fn values_are_not_forced() {
        let t = Term::suc(Term::app(id(), Term::zero()));
        assert_eq!(eval_cbv(&t, &mut Fuel::new(10)), EvalOutcome::Val(t.clone()));
        assert_eq!(eval_cbn(&t, &mut Fuel::new(10)), EvalOutcome::Val(t));
    }

    #[test]
    fn fuel_counts_rule_instances() {
        // App(Val for \x.x, Val for 0) = 3 instances
        let t = Term::app(id(), Term::zero());
        let mut f = Fuel::new(100);
        eval_cbn(&t, &mut f);
        assert_eq!(f.used(), 3);
        assert_eq!(eval_cbn(&t, &mut Fuel::new(2)), EvalOutcome::FuelExhausted);
        // CBV also evaluates the argument
        let mut f = Fuel::new(100);
        eval_cbv(&t, &mut f);
        assert_eq!(f.used(), 4);
    }

    #[test]
    fn stuck_on_ill_typed_input() {
        let t = Term::app(Term::zero(), Term::zero());
        assert!(matches!(
            eval_cbn(&t, &mut Fuel::new(10)),
            EvalOutcome::Stuck { reason: StuckReason::NotAFunction, .. }
        ));
        let r = Term::rec(Term::zero(), Term::zero(), id(), id());
        assert!(matches!(
            eval_cbn(&r, &mut Fuel::new(10)),
            EvalOutcome::Stuck { reason: StuckReason::NotAPair, .. }
        ));
    }

    #[test]
    #[should_panic(expected = "closed term")]
    fn open_input_faults() {
        eval_cbn(&Term::var("x"), &mut Fuel::new(10));
    }

    #[test]
    fn numerals() {
        assert_eq!(force_numeral(&numeral(7), &mut Fuel::new(100)), NatOutcome::Nat(7));
        let add = parse("(\\m n. rec(<m, 0>, n, \\x. S x, \\x. x)) 2 3").unwrap();
        assert_eq!(force_numeral(&add, &mut Fuel::new(1000)), NatOutcome::Nat(5));
        assert!(matches!(force_numeral(&id(), &mut Fuel::new(10)), NatOutcome::NotANat(_)));
    }

    #[test]
    fn literal_let_agrees() {
        let t = parse("let <a, b> = <2, 3> in rec(<a, 0>, b, \\x. S x, \\x. x)").unwrap();
        for strategy in [Strategy::Cbn, Strategy::Cbv] {
            for literal_let in [false, true] {
                let opts = EvalOptions { strategy, literal_let };
                assert_eq!(force_numeral_with(&t, &opts, &mut Fuel::new(1000)), NatOutcome::Nat(5));
            }
        }
    }
}
