//! Standard encodings: iteration, projections, copying, arithmetic,
//! minimisation, erasure, duplication, fixpoints and conditionals.
//!
//! Most builders take a [`Calculus`]: in λ-rec bounded iteration is the
//! recursor with the identity as update function, in the minimiser calculus
//! it is the primitive `iter`. The fixpoint and minimisation encodings need
//! the full recursor and exist for λ-rec only.
//!
//! Builders may splice one closed term into several positions. Linearity
//! constrains variables only, so this is legal.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::syntax::{freshen, numeral, parse_type, Calculus, Resolve, Term};
use crate::typing::LinType;

fn v(x: &str) -> Term {
    Term::var(x)
}

fn id() -> Term {
    Term::identity()
}

/// Bounded iteration `iter t u v` in the given calculus, with no checks.
pub fn iter_in(calculus: Calculus, t: Term, u: Term, step: Term) -> Term {
    match calculus {
        Calculus::Lrec => Term::rec(Term::pair(t, Term::zero()), u, step, id()),
        Calculus::Llcim => Term::iter(t, u, step),
    }
}

/// `rec(<t, 0>, u, v, I)`.
///
/// # Panics
///
/// If two of the arguments share a free variable.
pub fn iter_enc(t: Term, u: Term, step: Term) -> Term {
    let parts = [&t, &u, &step];
    for i in 0..3 {
        for j in i + 1..3 {
            let shared: Vec<_> = parts[i].free_vars().intersection(&parts[j].free_vars()).cloned().collect();
            assert!(shared.is_empty(), "iterator arguments share free variables {shared:?}");
        }
    }
    iter_in(Calculus::Lrec, t, u, step)
}

fn fst_raw(c: Calculus) -> Term {
    Term::lam("x", Term::let_pair(v("x"), "a", "b", iter_in(c, v("b"), v("a"), id())))
}

fn snd_raw(c: Calculus) -> Term {
    Term::lam("x", Term::let_pair(v("x"), "a", "b", iter_in(c, v("a"), v("b"), id())))
}

fn copy_raw(c: Calculus) -> Term {
    let step = Term::lam(
        "p",
        Term::let_pair(v("p"), "a", "b", Term::pair(Term::suc(v("a")), Term::suc(v("b")))),
    );
    Term::lam("x", iter_in(c, v("x"), Term::pair(Term::zero(), Term::zero()), step))
}

fn add_raw(c: Calculus) -> Term {
    Term::lams(["m", "n"], iter_in(c, v("m"), v("n"), Term::lam("x", Term::suc(v("x")))))
}

fn mult_raw(c: Calculus) -> Term {
    Term::lams(["m", "n"], iter_in(c, v("m"), Term::zero(), Term::app(add_raw(c), v("n"))))
}

fn pred_raw(c: Calculus) -> Term {
    let step = Term::lam(
        "x",
        Term::let_pair(
            Term::app(copy_raw(c), Term::app(snd_raw(c), v("x"))),
            "t",
            "u",
            Term::pair(v("t"), Term::suc(v("u"))),
        ),
    );
    let body = iter_in(c, v("n"), Term::pair(Term::zero(), Term::zero()), step);
    Term::lam("n", Term::app(fst_raw(c), body))
}

fn iszero_raw(c: Calculus) -> Term {
    let step = Term::lam("x", Term::app(copy_raw(c), Term::app(snd_raw(c), v("x"))));
    let body = iter_in(c, v("n"), Term::pair(Term::zero(), numeral(1)), step);
    Term::lam("n", Term::app(fst_raw(c), body))
}

/// `λx. x`
pub fn identity() -> Term {
    id()
}

/// First projection on pairs of numbers; the second component is consumed
/// by iterating the identity over it.
pub fn fst_enc(c: Calculus) -> Term {
    freshen(&fst_raw(c))
}

pub fn snd_enc(c: Calculus) -> Term {
    freshen(&snd_raw(c))
}

/// `C : Nat ⊸ Nat ⊗ Nat`, copying a number by counting it up twice.
pub fn copy_nat(c: Calculus) -> Term {
    freshen(&copy_raw(c))
}

pub fn add_enc(c: Calculus) -> Term {
    freshen(&add_raw(c))
}

pub fn mult_enc(c: Calculus) -> Term {
    freshen(&mult_raw(c))
}

/// Predecessor with `pred 0 = 0`.
pub fn pred_enc(c: Calculus) -> Term {
    freshen(&pred_raw(c))
}

/// `iszero 0 = 0` and `iszero (n+1) = 1`.
pub fn iszero_enc(c: Calculus) -> Term {
    freshen(&iszero_raw(c))
}

/// The least `k` with `f k = 0`, found by unbounded recursion whose counter
/// is refreshed with `f` applied to the next candidate.
///
/// # Panics
///
/// If `fbar` is open.
pub fn min_enc(fbar: &Term) -> Term {
    assert!(fbar.is_closed(), "the minimised function must be closed");
    let c = Calculus::Lrec;
    let update = Term::lam(
        "x",
        Term::let_pair(
            Term::app(copy_raw(c), Term::app(snd_raw(c), v("x"))),
            "y",
            "z",
            Term::pair(Term::app(fbar.clone(), Term::suc(v("y"))), Term::suc(v("z"))),
        ),
    );
    let t = Term::rec(
        Term::pair(Term::app(fbar.clone(), Term::zero()), Term::zero()),
        Term::zero(),
        Term::lam("x", Term::suc(v("x"))),
        update,
    );
    freshen(&t)
}

fn assert_ground(a: &LinType) {
    assert!(a.is_ground(), "type-indexed encodings need a type without unknowns, got {a}");
}

fn erase_raw(c: Calculus, t: Term, a: &LinType) -> Term {
    match a {
        LinType::Nat => iter_in(c, t, id(), id()),
        LinType::Tensor(l, r) => Term::let_pair(
            t,
            "p",
            "q",
            Term::app(erase_raw(c, v("p"), l), erase_raw(c, v("q"), r)),
        ),
        LinType::Lolli(l, r) => erase_raw(c, Term::app(t, maker_raw(c, l)), r),
        LinType::Meta(_) => unreachable!(),
    }
}

fn maker_raw(c: Calculus, a: &LinType) -> Term {
    match a {
        LinType::Nat => Term::zero(),
        LinType::Tensor(l, r) => Term::pair(maker_raw(c, l), maker_raw(c, r)),
        LinType::Lolli(l, r) => Term::lam("x", Term::app(erase_raw(c, v("x"), l), maker_raw(c, r))),
        LinType::Meta(_) => unreachable!(),
    }
}

/// `ε(t, A)`: consumes a term of type `A`, leaving a term that reduces to
/// the identity when `t` is normalising.
///
/// # Panics
///
/// If `a` contains unification variables.
pub fn erase_term(t: Term, a: &LinType) -> Term {
    erase_in(Calculus::Lrec, t, a)
}

pub fn erase_in(c: Calculus, t: Term, a: &LinType) -> Term {
    assert_ground(a);
    erase_raw(c, t, a)
}

/// `M(A)`: a closed canonical inhabitant of `A`.
pub fn maker(a: &LinType) -> Term {
    maker_in(Calculus::Lrec, a)
}

pub fn maker_in(c: Calculus, a: &LinType) -> Term {
    assert_ground(a);
    freshen(&maker_raw(c, a))
}

fn dup_raw(c: Calculus, a: &LinType) -> Term {
    let m = maker_raw(c, a);
    let step = Term::lam(
        "y",
        Term::let_pair(
            v("y"),
            "z",
            "w",
            Term::app(erase_raw(c, v("z"), a), Term::pair(v("w"), v("x"))),
        ),
    );
    Term::lam("x", iter_in(c, numeral(2), Term::pair(m.clone(), m), step))
}

/// `D^A : A ⊸ A ⊗ A`. Iterates twice: each round erases one component of
/// the accumulator and shifts the argument in.
pub fn dup(a: &LinType) -> Term {
    dup_in(Calculus::Lrec, a)
}

pub fn dup_in(c: Calculus, a: &LinType) -> Term {
    assert_ground(a);
    freshen(&dup_raw(c, a))
}

fn fix_raw(a: &LinType) -> Term {
    let w = Term::lam("x", Term::let_pair(v("x"), "y", "z", Term::pair(Term::suc(v("y")), v("z"))));
    Term::lam("f", Term::rec(Term::pair(numeral(1), Term::zero()), maker_raw(Calculus::Lrec, a), v("f"), w))
}

/// `Y_A : (A ⊸ A) ⊸ A`: a recursor whose update function keeps the counter
/// from ever reaching zero.
pub fn fix(a: &LinType) -> Term {
    assert_ground(a);
    freshen(&fix_raw(a))
}

fn factorial_raw(c: Calculus) -> Term {
    let inner = Term::let_pair(
        Term::app(dup_raw(c, &LinType::Nat), v("t")),
        "t1",
        "t2",
        Term::pair(Term::suc(v("t1")), Term::apps(mult_raw(c), [v("u"), v("t2")])),
    );
    let step = Term::lam("x", Term::let_pair(v("x"), "t", "u", inner));
    let body = iter_in(c, v("n"), Term::pair(numeral(1), numeral(1)), step);
    Term::lam("n", Term::app(snd_raw(c), body))
}

/// Factorial by iterating `<k, (k-1)!> ↦ <k+1, k!>`.
pub fn factorial_enc(c: Calculus) -> Term {
    freshen(&factorial_raw(c))
}

fn cond_raw(c: Calculus, a: &LinType) -> Term {
    // the inner iteration on 0 discards the recursive result without
    // evaluating it and returns the identity
    let discard = iter_in(c, Term::zero(), id(), erase_raw(c, v("x"), a));
    let step = Term::lam("x", Term::app(discard, v("v")));
    Term::lams(["t", "u", "v"], iter_in(c, v("t"), v("u"), step))
}

/// `cond_A : Nat ⊸ A ⊸ A ⊸ A`, choosing `u` on zero and `v` otherwise.
pub fn cond_enc(a: &LinType) -> Term {
    cond_in(Calculus::Lrec, a)
}

pub fn cond_in(c: Calculus, a: &LinType) -> Term {
    assert_ground(a);
    freshen(&cond_raw(c, a))
}

/// `λx. iter 2 (λx y. x y) (λy. y x)`: applied to itself it reduces back to
/// itself.
pub fn delta(c: Calculus) -> Term {
    let apply = Term::lams(["a", "b"], Term::app(v("a"), v("b")));
    let step = Term::lam("y", Term::app(v("y"), v("x")));
    freshen(&Term::lam("x", iter_in(c, numeral(2), apply, step)))
}

/// `λx. ε(x, A)`
pub fn eraser(c: Calculus, a: &LinType) -> Term {
    assert_ground(a);
    freshen(&Term::lam("e", erase_raw(c, v("e"), a)))
}

/// A named catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    /// Whether the entry is indexed by a type, written `name[T]`.
    pub typed: bool,
    /// Available in the minimiser calculus.
    pub in_llcim: bool,
    pub summary: &'static str,
}

pub const ENTRIES: &[Entry] = &[
    Entry { name: "I", aliases: &["id"], typed: false, in_llcim: true, summary: "identity" },
    Entry { name: "fst", aliases: &[], typed: false, in_llcim: true, summary: "first projection, Nat * Nat -o Nat" },
    Entry { name: "snd", aliases: &[], typed: false, in_llcim: true, summary: "second projection, Nat * Nat -o Nat" },
    Entry { name: "copy", aliases: &["C"], typed: false, in_llcim: true, summary: "copy a number, Nat -o Nat * Nat" },
    Entry { name: "add", aliases: &[], typed: false, in_llcim: true, summary: "addition" },
    Entry { name: "mult", aliases: &[], typed: false, in_llcim: true, summary: "multiplication" },
    Entry { name: "pred", aliases: &[], typed: false, in_llcim: true, summary: "predecessor, pred 0 = 0" },
    Entry { name: "iszero", aliases: &[], typed: false, in_llcim: true, summary: "0 on zero, 1 otherwise" },
    Entry { name: "fact", aliases: &["factorial"], typed: false, in_llcim: true, summary: "factorial" },
    Entry { name: "delta", aliases: &[], typed: false, in_llcim: true, summary: "self-reproducing when applied to itself" },
    Entry { name: "Y", aliases: &["fix"], typed: true, in_llcim: false, summary: "fixpoint, (T -o T) -o T" },
    Entry { name: "D", aliases: &["dup"], typed: true, in_llcim: true, summary: "duplicator, T -o T * T" },
    Entry { name: "M", aliases: &["maker"], typed: true, in_llcim: true, summary: "canonical closed inhabitant of T" },
    Entry { name: "cond", aliases: &[], typed: true, in_llcim: true, summary: "conditional, Nat -o T -o T -o T" },
    Entry { name: "erase", aliases: &[], typed: true, in_llcim: true, summary: "eraser, T -o A -o A" },
];

/// Resolves catalog names for one calculus.
#[derive(Debug, Clone, Copy, Default)]
pub struct Catalog {
    pub calculus: Calculus,
}

impl Catalog {
    pub fn new(calculus: Calculus) -> Catalog {
        Catalog { calculus }
    }

    pub fn lookup_entry(name: &str) -> Option<&'static Entry> {
        ENTRIES.iter().find(|e| e.name == name || e.aliases.contains(&name))
    }

    /// Builds an entry. Typed entries need `ty`.
    pub fn get(&self, name: &str, ty: Option<&LinType>) -> Result<Term, String> {
        let entry = Catalog::lookup_entry(name).ok_or_else(|| format!("unknown stdlib entry '{name}'"))?;
        let c = self.calculus;
        if c == Calculus::Llcim && !entry.in_llcim {
            return Err(format!("'{}' needs the recursor and is not available in {}", entry.name, c.name()));
        }
        let ty = match (entry.typed, ty) {
            (true, Some(t)) if !t.is_ground() => return Err(format!("type {t} has unknowns")),
            (true, Some(t)) => Some(t),
            (true, None) => return Err(format!("'{}' needs a type, as in {}[Nat]", entry.name, entry.name)),
            (false, Some(_)) => return Err(format!("'{}' takes no type", entry.name)),
            (false, None) => None,
        };
        Ok(match entry.name {
            "I" => identity(),
            "fst" => fst_enc(c),
            "snd" => snd_enc(c),
            "copy" => copy_nat(c),
            "add" => add_enc(c),
            "mult" => mult_enc(c),
            "pred" => pred_enc(c),
            "iszero" => iszero_enc(c),
            "fact" => factorial_enc(c),
            "delta" => delta(c),
            "Y" => fix(ty.unwrap()),
            "D" => dup_in(c, ty.unwrap()),
            "M" => maker_in(c, ty.unwrap()),
            "cond" => cond_in(c, ty.unwrap()),
            "erase" => eraser(c, ty.unwrap()),
            _ => unreachable!(),
        })
    }

    /// The type an entry is meant to have, with `?a` for a free choice.
    /// `None` for entries that are not typable.
    pub fn stated_type(name: &str, ty: Option<&LinType>) -> Option<LinType> {
        let entry = Catalog::lookup_entry(name)?;
        let nat = || LinType::Nat;
        let t = || ty.cloned().unwrap_or(LinType::Nat);
        Some(match entry.name {
            "I" => LinType::lolli(LinType::Meta(0), LinType::Meta(0)),
            "fst" | "snd" => LinType::lolli(LinType::nat_pair(), nat()),
            "copy" => LinType::lolli(nat(), LinType::nat_pair()),
            "add" | "mult" => LinType::arrows([nat(), nat()], nat()),
            "pred" | "iszero" | "fact" => LinType::lolli(nat(), nat()),
            "delta" => return None,
            "Y" => LinType::lolli(LinType::lolli(t(), t()), t()),
            "D" => LinType::lolli(t(), LinType::tensor(t(), t())),
            "M" => t(),
            "cond" => LinType::arrows([nat(), t(), t()], t()),
            "erase" => LinType::lolli(t(), LinType::lolli(LinType::Meta(0), LinType::Meta(0))),
            _ => unreachable!(),
        })
    }
}

impl Resolve for Catalog {
    fn resolve(&self, name: &str, arg: Option<&str>) -> Result<Term, String> {
        let ty = match arg {
            Some(text) => Some(parse_type(text).map_err(|e| format!("in type of @{name}: {e}"))?),
            None => None,
        };
        self.get(name, ty.as_ref())
    }
}

/// Names of all entries, for listings.
pub fn entry_names() -> Vec<String> {
    ENTRIES.iter().map(|e| e.name.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{force_numeral, NatOutcome};
    use crate::fuel::Fuel;
    use crate::reduction::normalize;
    use crate::syntax::{alpha_eq, check_linear, numeral};
    use crate::typing::{check, infer, TypeEnv};

    fn nat(t: &Term) -> Option<u64> {
        force_numeral(t, &mut Fuel::new(100_000)).nat()
    }

    fn app(f: Term, args: impl IntoIterator<Item = u64>) -> Term {
        Term::apps(f, args.into_iter().map(numeral))
    }

    #[test]
    fn catalog_entries_are_linear_and_typed() {
        let types = [LinType::Nat, LinType::nat_pair(), LinType::lolli(LinType::Nat, LinType::Nat)];
        for c in [Calculus::Lrec, Calculus::Llcim] {
            let cat = Catalog::new(c);
            for e in ENTRIES {
                if c == Calculus::Llcim && !e.in_llcim {
                    assert!(cat.get(e.name, Some(&LinType::Nat)).is_err());
                    continue;
                }
                let tys: Vec<Option<&LinType>> =
                    if e.typed { types.iter().map(Some).collect() } else { alloc::vec![None] };
                for ty in tys {
                    let t = cat.get(e.name, ty).unwrap();
                    assert!(t.is_closed());
                    assert!(check_linear(&t).is_ok(), "{} {t}", e.name);
                    if let Some(want) = Catalog::stated_type(e.name, ty) {
                        let got = crate::typing::check_in(c, &t, &TypeEnv::new(), &want);
                        assert!(got.is_ok(), "{} at {want}: {got:?}", e.name);
                    }
                }
            }
        }
    }

    #[test]
    fn iterator_examples() {
        let succ = Term::lam("x", Term::suc(Term::var("x")));
        assert_eq!(nat(&iter_enc(numeral(3), Term::zero(), succ.clone())), Some(3));
        assert_eq!(nat(&iter_enc(Term::zero(), numeral(4), succ)), Some(4));
    }

    #[test]
    #[should_panic(expected = "share free variables")]
    fn iterator_rejects_shared_variables() {
        iter_enc(Term::var("x"), Term::var("x"), Term::identity());
    }

    #[test]
    fn projections_and_copy() {
        let p = Term::pair(numeral(2), numeral(5));
        assert_eq!(nat(&Term::app(fst_enc(Calculus::Lrec), p.clone())), Some(2));
        assert_eq!(nat(&Term::app(snd_enc(Calculus::Lrec), p)), Some(5));
        let c = normalize(&Term::app(copy_nat(Calculus::Lrec), numeral(2)), &mut Fuel::new(1000)).unwrap();
        assert_eq!(c.term, Term::pair(numeral(2), numeral(2)));
        let c0 = normalize(&Term::app(copy_nat(Calculus::Lrec), numeral(0)), &mut Fuel::new(1000)).unwrap();
        assert_eq!(c0.term, Term::pair(numeral(0), numeral(0)));
    }

    #[test]
    fn arithmetic_small_cases() {
        for c in [Calculus::Lrec, Calculus::Llcim] {
            let run = |t: Term| -> Option<u64> {
                match c {
                    Calculus::Lrec => nat(&t),
                    Calculus::Llcim => {
                        let r = crate::reduction::normalize_in(c, &t, &mut Fuel::new(100_000)).ok()?;
                        crate::syntax::numeral_value(&r.term)
                    }
                }
            };
            assert_eq!(run(app(add_enc(c), [2, 3])), Some(5));
            assert_eq!(run(app(mult_enc(c), [2, 3])), Some(6));
            assert_eq!(run(app(pred_enc(c), [0])), Some(0));
            assert_eq!(run(app(pred_enc(c), [4])), Some(3));
            assert_eq!(run(app(iszero_enc(c), [0])), Some(0));
            assert_eq!(run(app(iszero_enc(c), [3])), Some(1));
            assert_eq!(run(app(factorial_enc(c), [0])), Some(1));
            assert_eq!(run(app(factorial_enc(c), [4])), Some(24));
        }
    }

    #[test]
    fn minimisation() {
        // f(x) = max(2 - x, 0)
        let f = Term::lam("x", iter_enc(Term::var("x"), numeral(2), pred_enc(Calculus::Lrec)));
        assert_eq!(nat(&min_enc(&f)), Some(2));
        // constant zero
        let z = Term::lam("x", iter_enc(Term::var("x"), Term::zero(), Term::identity()));
        assert_eq!(nat(&min_enc(&z)), Some(0));
        // never zero
        let pos = Term::lam("x", Term::suc(iter_enc(Term::var("x"), Term::zero(), Term::identity())));
        assert_eq!(force_numeral(&min_enc(&pos), &mut Fuel::new(10_000)), NatOutcome::FuelExhausted);
    }

    #[test]
    fn erasure_of_zero() {
        let e = erase_term(Term::zero(), &LinType::Nat);
        let r = normalize(&e, &mut Fuel::new(10)).unwrap();
        assert!(alpha_eq(&r.term, &Term::identity()));
    }

    #[test]
    fn makers_erase_to_identity() {
        for a in LinType::all_up_to_depth(3) {
            let m = maker(&a);
            assert!(m.is_closed());
            check(&m, &TypeEnv::new(), &a).unwrap();
            let r = normalize(&erase_term(m, &a), &mut Fuel::new(10_000)).unwrap();
            assert!(alpha_eq(&r.term, &Term::identity()), "{a}: {}", r.term);
        }
    }

    #[test]
    fn duplication() {
        let r = normalize(&Term::app(dup(&LinType::Nat), numeral(2)), &mut Fuel::new(10_000)).unwrap();
        assert_eq!(r.term, Term::pair(numeral(2), numeral(2)));
        let p = Term::pair(Term::zero(), numeral(1));
        let r = normalize(&Term::app(dup(&LinType::nat_pair()), p.clone()), &mut Fuel::new(10_000)).unwrap();
        assert_eq!(r.term, Term::pair(p.clone(), p));
    }

    #[test]
    fn fixpoint_types_and_divergence() {
        let y = fix(&LinType::Nat);
        assert_eq!(
            infer(&y, &TypeEnv::new()).unwrap(),
            LinType::lolli(LinType::lolli(LinType::Nat, LinType::Nat), LinType::Nat)
        );
        assert!(normalize(&Term::app(y, Term::identity()), &mut Fuel::new(200)).is_err());
    }

    #[test]
    fn conditional() {
        let c = cond_enc(&LinType::Nat);
        let y = Term::app(fix(&LinType::Nat), Term::identity());
        assert_eq!(nat(&Term::apps(c.clone(), [numeral(0), numeral(7), y.clone()])), Some(7));
        assert_eq!(nat(&Term::apps(c, [numeral(3), y, numeral(9)])), Some(9));
    }

    #[test]
    fn catalog_resolves_typed_names() {
        let cat = Catalog::new(Calculus::Lrec);
        let t = cat.resolve("Y", Some("Nat")).unwrap();
        assert!(alpha_eq(&t, &fix(&LinType::Nat)));
        assert!(cat.resolve("Y", None).is_err());
        assert!(cat.resolve("add", Some("Nat")).is_err());
        assert!(cat.resolve("nothing", None).is_err());
        assert!(Catalog::new(Calculus::Llcim).resolve("Y", Some("Nat")).is_err());
    }
}
