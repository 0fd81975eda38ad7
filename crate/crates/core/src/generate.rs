//! Type-directed random generation of closed, linear, well-typed λ-rec terms.
//!
//! A type is drawn first and a term is built at it, threading a linear
//! context so that every bound variable is used exactly once. When the size
//! budget runs out, leftover variables are consumed with erasers and the
//! goal is met with a maker. Recursors always use the identity update, so
//! generated terms terminate.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::stdlib::{erase_term, maker};
use crate::syntax::{freshen, numeral, Term, Var};
use crate::typing::LinType;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    /// Rough number of constructors per term.
    pub size: usize,
    /// Depth bound for the goal type and for auxiliary types.
    pub type_depth: usize,
    /// Largest literal numeral.
    pub max_numeral: u64,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig { size: 24, type_depth: 3, max_numeral: 3 }
    }
}

/// A random ground type of depth at most `depth` (`Nat` has depth 1).
pub fn random_type<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> LinType {
    if depth <= 1 || rng.gen_bool(0.4) {
        return LinType::Nat;
    }
    let l = random_type(rng, depth - 1);
    let r = random_type(rng, depth - 1);
    if rng.gen_bool(0.6) {
        LinType::lolli(l, r)
    } else {
        LinType::tensor(l, r)
    }
}

struct Gen<'r, R: Rng + ?Sized> {
    rng: &'r mut R,
    cfg: GenConfig,
    budget: usize,
    next: usize,
}

type Ctx = Vec<(Var, LinType)>;

impl<R: Rng + ?Sized> Gen<'_, R> {
    fn fresh(&mut self) -> Var {
        self.next += 1;
        Var::new(&format!("v{}", self.next))
    }

    fn spend(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    fn split(&mut self, ctx: Ctx) -> (Ctx, Ctx) {
        let (mut l, mut r) = (Vec::new(), Vec::new());
        for b in ctx {
            if self.rng.gen_bool(0.5) {
                l.push(b);
            } else {
                r.push(b);
            }
        }
        (l, r)
    }

    fn aux_type(&mut self) -> LinType {
        let d = self.cfg.type_depth.min(2);
        random_type(self.rng, d)
    }

    /// Consumes everything in `ctx` and produces a canonical term at `ty`.
    fn finish(&mut self, ctx: Ctx, ty: &LinType) -> Term {
        let mut t = if ty == &LinType::Nat { numeral(self.rng.gen_range(0..=self.cfg.max_numeral)) } else { maker(ty) };
        for (x, a) in ctx {
            t = Term::app(erase_term(Term::var(x), &a), t);
        }
        t
    }

    fn term(&mut self, ctx: Ctx, ty: &LinType) -> Term {
        if !self.spend() {
            return self.finish(ctx, ty);
        }
        // a variable of exactly the right type, when it is the last one
        if let [(x, a)] = ctx.as_slice() {
            if a == ty && self.rng.gen_bool(0.6) {
                return Term::var(x.clone());
            }
        }
        // eliminate a pair or function from the context
        if !ctx.is_empty() && self.rng.gen_bool(0.35) {
            let i = self.rng.gen_range(0..ctx.len());
            let mut rest = ctx.clone();
            let (x, a) = rest.remove(i);
            match &a {
                LinType::Tensor(l, r) => {
                    let (p, q) = (self.fresh(), self.fresh());
                    rest.push((p.clone(), (**l).clone()));
                    rest.push((q.clone(), (**r).clone()));
                    let body = self.term(rest, ty);
                    return Term::let_pair(Term::var(x), p, q, body);
                }
                LinType::Lolli(l, r) if **r == *ty => {
                    let arg = self.term(rest, l);
                    return Term::app(Term::var(x), arg);
                }
                LinType::Lolli(l, r) => {
                    let (c1, c2) = self.split(rest);
                    let arg = self.term(c1, l);
                    let y = self.fresh();
                    let mut c2 = c2;
                    c2.push((y.clone(), (**r).clone()));
                    let body = self.term(c2, ty);
                    return Term::app(Term::lam(y, body), Term::app(Term::var(x), arg));
                }
                LinType::Nat => {
                    // iterate a closed step on the variable
                    let base = self.term(rest, ty);
                    let step = self.term(Vec::new(), &LinType::lolli(ty.clone(), ty.clone()));
                    return Term::rec(Term::pair(Term::var(x), Term::zero()), base, step, Term::identity());
                }
                LinType::Meta(_) => unreachable!("generated types are ground"),
            }
        }
        match self.rng.gen_range(0..6) {
            // a β-redex
            0 => {
                let a = self.aux_type();
                let (c1, c2) = self.split(ctx);
                let x = self.fresh();
                let mut inner = c1;
                inner.push((x.clone(), a.clone()));
                let body = self.term(inner, ty);
                let arg = self.term(c2, &a);
                Term::app(Term::lam(x, body), arg)
            }
            // a let over a freshly built pair
            1 => {
                let (l, r) = (self.aux_type(), self.aux_type());
                let (c1, c2) = self.split(ctx);
                let s = self.term(c1, &LinType::tensor(l.clone(), r.clone()));
                let (p, q) = (self.fresh(), self.fresh());
                let mut c2 = c2;
                c2.push((p.clone(), l));
                c2.push((q.clone(), r));
                let body = self.term(c2, ty);
                Term::let_pair(s, p, q, body)
            }
            // a recursor on a small number
            2 => {
                let (c1, c2) = self.split(ctx);
                let n = self.term(c1, &LinType::Nat);
                let base = self.term(c2, ty);
                let step = self.term(Vec::new(), &LinType::lolli(ty.clone(), ty.clone()));
                Term::rec(Term::pair(n, Term::zero()), base, step, Term::identity())
            }
            // application of a generated function
            3 => {
                let a = self.aux_type();
                let (c1, c2) = self.split(ctx);
                let f = self.term(c1, &LinType::lolli(a.clone(), ty.clone()));
                let arg = self.term(c2, &a);
                Term::app(f, arg)
            }
            // introduction form for the goal
            _ => self.intro(ctx, ty),
        }
    }

    fn intro(&mut self, ctx: Ctx, ty: &LinType) -> Term {
        match ty {
            LinType::Nat => {
                if ctx.is_empty() && self.rng.gen_bool(0.5) {
                    numeral(self.rng.gen_range(0..=self.cfg.max_numeral))
                } else {
                    Term::suc(self.term(ctx, ty))
                }
            }
            LinType::Lolli(a, b) => {
                let x = self.fresh();
                let mut inner = ctx;
                inner.push((x.clone(), (**a).clone()));
                Term::lam(x, self.term(inner, b))
            }
            LinType::Tensor(a, b) => {
                let (c1, c2) = self.split(ctx);
                let l = self.term(c1, a);
                let r = self.term(c2, b);
                Term::pair(l, r)
            }
            LinType::Meta(_) => unreachable!("generated types are ground"),
        }
    }
}

/// A closed term of type `ty`.
///
/// # Panics
///
/// If `ty` contains unification variables.
pub fn gen_term<R: Rng + ?Sized>(rng: &mut R, ty: &LinType, cfg: &GenConfig) -> Term {
    assert!(ty.is_ground(), "generation needs a ground type");
    let mut g = Gen { rng, cfg: *cfg, budget: cfg.size, next: 0 };
    freshen(&g.term(Vec::new(), ty))
}

/// A random type and a closed term of that type.
pub fn gen_closed<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> (Term, LinType) {
    let ty = random_type(rng, cfg.type_depth);
    let t = gen_term(rng, &ty, cfg);
    (t, ty)
}
