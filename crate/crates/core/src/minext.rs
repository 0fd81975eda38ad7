//! The minimiser calculus: the linear λ-calculus with bounded iteration
//! `iter(n, u, v)` and a minimiser `min(t, u, f)` in place of the recursor.
//!
//! ```text
//! iter 0 u v      → u                    if v closed
//! iter (S t) u v  → v (iter t u v)       if v closed
//! min(0, u, f)    → u                    if f closed
//! min(S t, u, f)  → min(f (S u), S u, f) if f, t, u closed
//! ```
//!
//! Terms share the representation of [`Term`]; [`MTerm`] guarantees the
//! recursor does not occur.

use core::fmt;

use crate::eval::NatOutcome;
use crate::fuel::Fuel;
use crate::reduction::{self, Exhausted, Reduced, RuleName, Step};
use crate::syntax::{check_linear, Calculus, Term, TermKind, Violation};
use crate::typing::{self, LinType, TypeEnv, TypeError};

/// A linear term without `rec`.
#[derive(Clone, PartialEq, Eq)]
pub struct MTerm(Term);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MTermError {
    #[error("the recursor is not part of the minimiser calculus")]
    ContainsRec,
    #[error("linearity violation: {0:?}")]
    Linearity(alloc::vec::Vec<Violation>),
}

impl MTerm {
    pub fn new(t: Term) -> Result<MTerm, MTermError> {
        if Calculus::Llcim.foreign_construct(&t).is_some() {
            return Err(MTermError::ContainsRec);
        }
        check_linear(&t).map_err(MTermError::Linearity)?;
        Ok(MTerm(t))
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }
}

impl fmt::Debug for MTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for MTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A root step: Beta, Let, the two iterator rules or the two minimiser rules.
pub fn mstep_root(t: &MTerm) -> Option<(MTerm, RuleName)> {
    reduction::step_root_in(Calculus::Llcim, &t.0).map(|(u, r)| (MTerm(u), r))
}

pub fn mstep_lo(t: &MTerm) -> Option<Step> {
    reduction::step_lo_in(Calculus::Llcim, &t.0)
}

pub fn mnormalize(t: &MTerm, fuel: &mut Fuel) -> Result<Reduced, Exhausted> {
    reduction::normalize_in(Calculus::Llcim, &t.0, fuel)
}

/// Infers a type using the iterator and minimiser rules.
pub fn mtype(t: &MTerm, env: &TypeEnv) -> Result<LinType, TypeError> {
    typing::infer_in(Calculus::Llcim, &t.0, env)
}

/// `min(f 0, 0, f)`: the least `k` with `f k = 0`.
///
/// # Panics
///
/// If `fbar` is open.
pub fn mu_enc(fbar: &MTerm) -> MTerm {
    assert!(fbar.0.is_closed(), "the minimised function must be closed");
    let f = fbar.0.clone();
    MTerm(Term::min(Term::app(f.clone(), Term::zero()), Term::zero(), f))
}

/// Reads back a number by weak-head reduction, descending under each `S`.
pub fn mforce_numeral(t: &MTerm, fuel: &mut Fuel) -> NatOutcome {
    let mut n = 0u64;
    let mut cur = t.0.clone();
    loop {
        match reduction::reduce_whnf_in(Calculus::Llcim, &cur, fuel) {
            Ok(r) => match r.term.kind() {
                TermKind::Zero => return NatOutcome::Nat(n),
                TermKind::Suc(m) => {
                    n += 1;
                    cur = m.clone();
                }
                _ => return NatOutcome::NotANat(r.term),
            },
            Err(_) => return NatOutcome::FuelExhausted,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stdlib;
    use crate::syntax::numeral;

    fn m(t: Term) -> MTerm {
        MTerm::new(t).unwrap()
    }

    fn succ() -> Term {
        Term::lam("x", Term::suc(Term::var("x")))
    }

    #[test]
    fn min_rules() {
        let t = m(Term::min(Term::zero(), numeral(5), Term::identity()));
        let (r, rule) = mstep_root(&t).unwrap();
        assert_eq!((r.term(), rule), (&numeral(5), RuleName::MinZero));

        let open = m(Term::min(Term::suc(Term::var("y")), Term::zero(), Term::identity()));
        assert!(mstep_root(&open).is_none());

        let s = m(Term::min(numeral(1), numeral(2), Term::identity()));
        let (r, rule) = mstep_root(&s).unwrap();
        assert_eq!(rule, RuleName::MinSuc);
        let want = Term::min(Term::app(Term::identity(), numeral(3)), numeral(3), Term::identity());
        assert_eq!(r.term(), &want);
    }

    #[test]
    fn iter_rules() {
        let t = m(Term::iter(numeral(1), Term::zero(), succ()));
        let (r, rule) = mstep_root(&t).unwrap();
        assert_eq!(rule, RuleName::IterSuc);
        assert_eq!(r.term(), &Term::app(succ(), Term::iter(Term::zero(), Term::zero(), succ())));
        let nf = mnormalize(&t, &mut Fuel::new(10)).unwrap();
        assert_eq!(nf.term, numeral(1));
    }

    #[test]
    fn typing() {
        let ok = m(Term::min(Term::zero(), Term::zero(), Term::identity()));
        assert_eq!(mtype(&ok, &TypeEnv::new()).unwrap(), LinType::Nat);
        let bad = m(Term::min(
            Term::zero(),
            Term::zero(),
            Term::lam("x", Term::pair(Term::var("x"), Term::zero())),
        ));
        assert!(mtype(&bad, &TypeEnv::new()).is_err());
    }

    #[test]
    fn rec_is_rejected() {
        let r = Term::rec(Term::pair(Term::zero(), Term::zero()), Term::zero(), Term::identity(), Term::identity());
        assert_eq!(MTerm::new(r), Err(MTermError::ContainsRec));
    }

    #[test]
    fn minimisation() {
        // f(x) = max(2 - x, 0)
        let pred = stdlib::pred_enc(Calculus::Llcim);
        let f = m(Term::lam("x", Term::iter(Term::var("x"), numeral(2), pred)));
        assert_eq!(mforce_numeral(&mu_enc(&f), &mut Fuel::new(100_000)), NatOutcome::Nat(2));
        let pos = m(Term::lam("x", Term::suc(Term::iter(Term::var("x"), Term::zero(), Term::identity()))));
        assert_eq!(mforce_numeral(&mu_enc(&pos), &mut Fuel::new(5_000)), NatOutcome::FuelExhausted);
    }
}
