//! Compiling PCF into λ-rec.
//!
//! `compile_body` translates term by term and may use variables several
//! times or not at all. `close_var` then restores linearity for one variable
//! by threading copies made with `D^A`. A λ whose variable is unused gets a
//! recursor on zero whose step function would erase it.

use alloc::vec::Vec;

use super::{pcf_check, pcf_names, PcfTerm, PcfType, PcfTypeError};
use crate::stdlib::{cond_enc, dup, erase_term, fix, identity, snd_enc};
use crate::syntax::{freshen, numeral, rename, NameSupply, Term, TermKind, Var};
use crate::typing::{LinType, TypeEnv};

/// `⟦Nat⟧ = Nat`, `⟦A → B⟧ = ⟦A⟧ ⊸ ⟦B⟧`.
pub fn type_trans(a: &PcfType) -> LinType {
    match a {
        PcfType::Nat => LinType::Nat,
        PcfType::Arrow(l, r) => LinType::lolli(type_trans(l), type_trans(r)),
    }
}

/// Pointwise [`type_trans`], keeping order.
///
/// # Panics
///
/// If a variable is repeated.
pub fn env_trans(env: &[(Var, PcfType)]) -> TypeEnv {
    TypeEnv::from_pairs(env.iter().map(|(x, a)| (x.clone(), type_trans(a)))).expect("PCF environment has a repeated variable")
}

fn v(x: &str) -> Term {
    Term::var(x)
}

fn count(n: Term) -> Term {
    Term::pair(n, Term::zero())
}

/// `λn. rec(<n,0>, S 0, λx. S x, I)`. Not `λx. S x`: the argument has to
/// be evaluated, so that `succ` applied to a divergent term diverges.
pub fn succ_pcf() -> Term {
    let step = Term::lam("x", Term::suc(v("x")));
    freshen(&Term::lam("n", Term::rec(count(v("n")), numeral(1), step, identity())))
}

/// `λn. fst(rec(<n,0>, <0,0>, λx. let <t,u> = D(snd x) in <t, S u>, I))`
pub fn pred_pcf() -> Term {
    let step = Term::lam(
        "x",
        Term::let_pair(
            Term::app(dup(&LinType::Nat), Term::app(snd_enc(crate::syntax::Calculus::Lrec), v("x"))),
            "t",
            "u",
            Term::pair(v("t"), Term::suc(v("u"))),
        ),
    );
    let r = Term::rec(count(v("n")), Term::pair(Term::zero(), Term::zero()), step, identity());
    freshen(&Term::lam("n", Term::app(crate::stdlib::fst_enc(crate::syntax::Calculus::Lrec), r)))
}

/// `λn. fst(rec(<n,0>, <0, S 0>, λx. D(snd x), I))`
pub fn iszero_pcf() -> Term {
    let c = crate::syntax::Calculus::Lrec;
    let step = Term::lam("x", Term::app(dup(&LinType::Nat), Term::app(snd_enc(c), v("x"))));
    let r = Term::rec(count(v("n")), Term::pair(Term::zero(), numeral(1)), step, identity());
    freshen(&Term::lam("n", Term::app(crate::stdlib::fst_enc(c), r)))
}

fn constant(t: &PcfTerm) -> Option<Term> {
    Some(match t {
        PcfTerm::Num(n) => numeral(*n),
        PcfTerm::Succ => succ_pcf(),
        PcfTerm::Pred => pred_pcf(),
        PcfTerm::IsZero => iszero_pcf(),
        PcfTerm::Y(a) => fix(&type_trans(a)),
        PcfTerm::Cond(a) => cond_enc(&type_trans(a)),
        _ => return None,
    })
}

struct Compiler {
    names: NameSupply,
}

impl Compiler {
    fn body(&mut self, t: &PcfTerm, scope: &mut Vec<(Var, PcfType)>) -> Term {
        if let Some(c) = constant(t) {
            self.names.avoid(&c);
            return c;
        }
        match t {
            PcfTerm::Var(x) => Term::var(x.clone()),
            PcfTerm::App(f, a) => {
                let f = self.body(f, scope);
                let a = self.body(a, scope);
                Term::app(f, a)
            }
            PcfTerm::Lam(x, a, b) => {
                scope.push((x.clone(), a.clone()));
                let bt = pcf_check(b, scope).expect("subterm of a well-typed term");
                let body = self.body(b, scope);
                scope.pop();
                let la = type_trans(a);
                if b.has_free(x) {
                    let closed = self.close(x, &la, &body);
                    return Term::lam(x.clone(), closed);
                }
                // λx. (rec(<0,0>, I, λy. ε(ε(y, ⟦B⟧⊸⟦B⟧) x, ⟦A⟧), I)) ⟦t⟧
                let lb = type_trans(&bt);
                let y = self.names.fresh("y");
                let inner = Term::app(erase_term(Term::var(y.clone()), &LinType::lolli(lb.clone(), lb)), Term::var(x.clone()));
                let step = Term::lam(y, erase_term(inner, &la));
                let discard = Term::rec(count(Term::zero()), identity(), step, identity());
                self.names.avoid(&discard);
                Term::lam(x.clone(), Term::app(discard, body))
            }
            _ => unreachable!("constants handled above"),
        }
    }

    fn close(&mut self, x: &Var, a: &LinType, t: &Term) -> Term {
        match t.kind() {
            TermKind::Var(y) if y == x => t.clone(),
            TermKind::Suc(u) => Term::suc(self.close(x, a, u)),
            TermKind::Lam(y, u) => Term::lam(y.clone(), self.close(x, a, u)),
            TermKind::App(s, u) => match (s.has_free(x), u.has_free(x)) {
                (true, true) => {
                    let s = self.close(x, a, s);
                    let u = self.close(x, a, u);
                    let d = dup(a);
                    self.names.avoid(&s);
                    self.names.avoid(&u);
                    self.names.avoid(&d);
                    let x1 = self.names.fresh(x.as_str());
                    let x2 = self.names.fresh(x.as_str());
                    let body = Term::app(rename(&s, x, &x1), rename(&u, x, &x2));
                    Term::let_pair(Term::app(d, Term::var(x.clone())), x1, x2, body)
                }
                (true, false) => Term::app(self.close(x, a, s), u.clone()),
                (false, true) => Term::app(s.clone(), self.close(x, a, u)),
                (false, false) => panic!("bracket abstraction: {x} is not free in {t}"),
            },
            // Earlier abstractions leave lets and recursors behind; the
            // variable can only sit in one of their children.
            TermKind::LetPair(..) | TermKind::Pair(..) | TermKind::Rec(..) => {
                let holders: Vec<usize> = t.children().enumerate().filter(|(_, c)| c.has_free(x)).map(|(i, _)| i).collect();
                match holders.as_slice() {
                    [i] => {
                        let child = t.child(*i).expect("child index");
                        let closed = self.close(x, a, child);
                        t.with_child(*i, closed)
                    }
                    _ => panic!("bracket abstraction: {x} shared outside an application in {t}"),
                }
            }
            _ => panic!("bracket abstraction: {x} is not free in {t}"),
        }
    }
}

fn compiler_for(t: &PcfTerm, env: &[(Var, PcfType)]) -> Compiler {
    let mut names = NameSupply::new();
    pcf_names(t, &mut names);
    for (x, _) in env {
        names.reserve(x);
    }
    Compiler { names }
}

/// `⟦t⟧`: the direct translation, linear except in the free variables of `t`.
pub fn compile_body(t: &PcfTerm, env: &[(Var, PcfType)]) -> Result<Term, PcfTypeError> {
    pcf_check(t, env)?;
    let mut c = compiler_for(t, env);
    let mut scope = env.to_vec();
    Ok(c.body(t, &mut scope))
}

/// `[x^A] t`: makes `x` occur linearly in `t`.
///
/// # Panics
///
/// If `x` is not free in `t`, or it is shared between children of a node
/// other than an application.
pub fn close_var(x: &Var, a: &LinType, t: &Term) -> Term {
    let mut c = Compiler { names: NameSupply::avoiding(t) };
    c.names.reserve(x);
    c.close(x, a, t)
}

/// `[x1]…[xn]⟦t⟧` over the free variables of `t`, taken in environment
/// order with `x1` outermost. The result is linear.
pub fn compile(t: &PcfTerm, env: &[(Var, PcfType)]) -> Result<Term, PcfTypeError> {
    pcf_check(t, env)?;
    let mut c = compiler_for(t, env);
    let mut scope = env.to_vec();
    let mut out = c.body(t, &mut scope);
    for (x, a) in env.iter().rev() {
        if out.has_free(x) {
            c.names.avoid(&out);
            out = c.close(x, &type_trans(a), &out);
        }
    }
    Ok(freshen(&out))
}

/// The part of `env` that mentions free variables of `t`, for checking
/// compiled output.
pub fn used_env(t: &PcfTerm, env: &[(Var, PcfType)]) -> Vec<(Var, PcfType)> {
    let fv = t.free_vars();
    env.iter().filter(|(x, _)| fv.contains(x)).cloned().collect()
}
