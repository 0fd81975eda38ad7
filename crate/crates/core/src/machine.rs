//! A stack machine for closed λ-rec terms.
//!
//! A configuration is a term and a stack of extended terms. Because only
//! closed terms are ever substituted there is no environment. The stack is
//! stored with its top at the end of the vector.

use alloc::vec::Vec;
use core::fmt;

use crate::fuel::Fuel;
use crate::syntax::{subst, Term, TermKind, Var};

/// A stack entry: a pending argument or a continuation marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtTerm {
    Plain(Term),
    /// `LET(x, y, body)`: waiting for a pair to split.
    LetK(Var, Var, Term),
    /// `REC(base, step, update)`: waiting for the scrutinee pair.
    RecK(Term, Term, Term),
    /// `REC'(second, base, step, update)`: waiting for the counter.
    RecK2(Term, Term, Term, Term),
}

impl ExtTerm {
    /// Closed, except that a `LetK` body may mention its two binders.
    pub fn is_closed(&self) -> bool {
        match self {
            ExtTerm::Plain(t) => t.is_closed(),
            ExtTerm::LetK(x, y, b) => b.free_vars().iter().all(|v| v == x || v == y),
            ExtTerm::RecK(u, v, w) => u.is_closed() && v.is_closed() && w.is_closed(),
            ExtTerm::RecK2(t, u, v, w) => t.is_closed() && u.is_closed() && v.is_closed() && w.is_closed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineConfig {
    pub code: Term,
    /// Top of stack is the last element.
    pub stack: Vec<ExtTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineRule {
    App,
    Abs,
    Let,
    Pair1,
    Rec,
    Pair2,
    Zero,
    Succ,
}

impl fmt::Display for MachineRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MachineRule::App => "app",
            MachineRule::Abs => "abs",
            MachineRule::Let => "let",
            MachineRule::Pair1 => "pair1",
            MachineRule::Rec => "rec",
            MachineRule::Pair2 => "pair2",
            MachineRule::Zero => "zero",
            MachineRule::Succ => "succ",
        };
        f.write_str(s)
    }
}

impl MachineConfig {
    pub fn initial(t: Term) -> MachineConfig {
        MachineConfig { code: t, stack: Vec::new() }
    }

    pub fn is_closed(&self) -> bool {
        self.code.is_closed() && self.stack.iter().all(ExtTerm::is_closed)
    }

    /// Performs one transition in place.
    pub fn step(&mut self) -> Option<MachineRule> {
        let code = self.code.clone();
        match code.kind() {
            TermKind::App(m, n) => {
                self.stack.push(ExtTerm::Plain(n.clone()));
                self.code = m.clone();
                Some(MachineRule::App)
            }
            TermKind::LetPair(t, x, y, m) => {
                self.stack.push(ExtTerm::LetK(x.clone(), y.clone(), m.clone()));
                self.code = t.clone();
                Some(MachineRule::Let)
            }
            TermKind::Rec(t, u, v, w) => {
                self.stack.push(ExtTerm::RecK(u.clone(), v.clone(), w.clone()));
                self.code = t.clone();
                Some(MachineRule::Rec)
            }
            TermKind::Lam(x, m) => match self.stack.last() {
                Some(ExtTerm::Plain(n)) => {
                    self.code = subst(m, x, n);
                    self.stack.pop();
                    Some(MachineRule::Abs)
                }
                _ => None,
            },
            TermKind::Pair(n1, n2) => match self.stack.last_mut() {
                Some(ExtTerm::LetK(x, y, m)) => {
                    self.code = subst(&subst(m, x, n1), y, n2);
                    self.stack.pop();
                    Some(MachineRule::Pair1)
                }
                Some(top @ ExtTerm::RecK(..)) => {
                    let ExtTerm::RecK(u, v, w) = top.clone() else { unreachable!() };
                    *top = ExtTerm::RecK2(n2.clone(), u, v, w);
                    self.code = n1.clone();
                    Some(MachineRule::Pair2)
                }
                _ => None,
            },
            TermKind::Zero => match self.stack.last() {
                Some(ExtTerm::RecK2(_, u, _, _)) => {
                    self.code = u.clone();
                    self.stack.pop();
                    Some(MachineRule::Zero)
                }
                _ => None,
            },
            TermKind::Suc(n) => match self.stack.last_mut() {
                Some(top @ ExtTerm::RecK2(..)) => {
                    let ExtTerm::RecK2(t, u, v, w) = top.clone() else { unreachable!() };
                    let again = Term::rec(Term::app(w.clone(), Term::pair(n.clone(), t)), u, v.clone(), w);
                    *top = ExtTerm::Plain(again);
                    self.code = v;
                    Some(MachineRule::Succ)
                }
                _ => None,
            },
            TermKind::Var(_) | TermKind::Iter(..) | TermKind::Min(..) => None,
        }
    }
}

/// Pure single transition.
pub fn machine_step(c: &MachineConfig) -> Option<(MachineConfig, MachineRule)> {
    let mut next = c.clone();
    let rule = next.step()?;
    Some((next, rule))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineOutcome {
    /// No rule applies and the stack is empty.
    Halted { value: Term, residual_stack: Vec<ExtTerm> },
    FuelExhausted(MachineConfig),
    /// No rule applies but the stack is not empty, or the code is not a value.
    Stuck(MachineConfig),
}

impl MachineOutcome {
    pub fn value(&self) -> Option<&Term> {
        match self {
            MachineOutcome::Halted { value, residual_stack } if residual_stack.is_empty() => Some(value),
            _ => None,
        }
    }
}

/// One line of a machine trace.
#[derive(Debug, Clone)]
pub struct TraceLine {
    pub step: u64,
    pub rule: MachineRule,
    pub stack_len: usize,
    pub code: Term,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  {}  |stack|={}  {}", self.step, self.rule, self.stack_len, self.code)
    }
}

#[derive(Debug, Clone)]
pub struct Run {
    pub outcome: MachineOutcome,
    pub steps: u64,
    pub trace: Vec<TraceLine>,
}

/// Runs from `(t, [])`, one fuel unit per transition.
///
/// # Panics
///
/// If `t` has free variables.
pub fn run(t: &Term, fuel: &mut Fuel, trace: bool) -> Run {
    assert!(t.is_closed(), "the machine runs closed terms only");
    run_config(MachineConfig::initial(t.clone()), fuel, trace)
}

pub fn run_config(mut c: MachineConfig, fuel: &mut Fuel, trace: bool) -> Run {
    let mut steps = 0u64;
    let mut lines = Vec::new();
    loop {
        if fuel.is_empty() {
            if machine_step(&c).is_none() {
                return finish(c, steps, lines);
            }
            return Run { outcome: MachineOutcome::FuelExhausted(c), steps, trace: lines };
        }
        let Some(rule) = c.step() else {
            return finish(c, steps, lines);
        };
        fuel.take();
        steps += 1;
        if trace {
            lines.push(TraceLine { step: steps, rule, stack_len: c.stack.len(), code: c.code.clone() });
        }
    }
}

fn finish(c: MachineConfig, steps: u64, trace: Vec<TraceLine>) -> Run {
    let outcome = if c.stack.is_empty() && c.code.is_whnf() {
        MachineOutcome::Halted { value: c.code, residual_stack: c.stack }
    } else {
        MachineOutcome::Stuck(c)
    };
    Run { outcome, steps, trace }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineNat {
    Nat(u64),
    FuelExhausted,
    NotANat(Term),
    Stuck(MachineConfig),
}

impl MachineNat {
    pub fn nat(&self) -> Option<u64> {
        match self {
            MachineNat::Nat(n) => Some(*n),
            _ => None,
        }
    }
}

/// Runs the machine and, while the result is `S n`, runs it again on `n`.
pub fn machine_force_numeral(t: &Term, fuel: &mut Fuel) -> MachineNat {
    let mut n = 0u64;
    let mut cur = t.clone();
    loop {
        match run(&cur, fuel, false).outcome {
            MachineOutcome::Halted { value, .. } => match value.kind() {
                TermKind::Zero => return MachineNat::Nat(n),
                TermKind::Suc(m) => {
                    n += 1;
                    cur = m.clone();
                }
                _ => return MachineNat::NotANat(value),
            },
            MachineOutcome::FuelExhausted(_) => return MachineNat::FuelExhausted,
            MachineOutcome::Stuck(c) => return MachineNat::Stuck(c),
        }
    }
}
