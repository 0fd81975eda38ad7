//! Small-step closed reduction.
//!
//! A redex only fires when the subterms its rule copies or moves under
//! binders are closed. A redex whose side condition fails is simply not a
//! redex: searches skip past it.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::fuel::Fuel;
use crate::syntax::{subst, Calculus, Path, Term, TermKind};

/// Which root rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleName {
    Beta,
    Let,
    RecZero,
    RecSuc,
    IterZero,
    IterSuc,
    MinZero,
    MinSuc,
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleName::Beta => "Beta",
            RuleName::Let => "Let",
            RuleName::RecZero => "RecZero",
            RuleName::RecSuc => "RecSuc",
            RuleName::IterZero => "IterZero",
            RuleName::IterSuc => "IterSuc",
            RuleName::MinZero => "MinZero",
            RuleName::MinSuc => "MinSuc",
        };
        f.write_str(s)
    }
}

/// One reduction step somewhere inside a term.
#[derive(Debug, Clone)]
pub struct Step {
    pub term: Term,
    pub rule: RuleName,
    pub path: Path,
}

/// A root step of λ-rec: Beta, Let, RecZero or RecSuc.
pub fn step_root(t: &Term) -> Option<(Term, RuleName)> {
    step_root_in(Calculus::Lrec, t)
}

/// A root step of the given calculus. Both share Beta and Let; λ-rec adds the
/// recursor rules and the minimiser calculus the iterator and minimiser rules.
pub fn step_root_in(calculus: Calculus, t: &Term) -> Option<(Term, RuleName)> {
    match (calculus, t.kind()) {
        (_, TermKind::App(f, v)) => match f.kind() {
            TermKind::Lam(x, body) if v.is_closed() => Some((subst(body, x, v), RuleName::Beta)),
            _ => None,
        },
        (_, TermKind::LetPair(s, x, y, body)) => match s.kind() {
            TermKind::Pair(a, b) if a.is_closed() && b.is_closed() => {
                Some((subst(&subst(body, x, a), y, b), RuleName::Let))
            }
            _ => None,
        },
        (Calculus::Lrec, TermKind::Rec(s, u, v, w)) => {
            let TermKind::Pair(n, t2) = s.kind() else { return None };
            match n.kind() {
                TermKind::Zero if t2.is_closed() && v.is_closed() && w.is_closed() => {
                    Some((u.clone(), RuleName::RecZero))
                }
                TermKind::Suc(m) if v.is_closed() && w.is_closed() => {
                    let next = Term::app(w.clone(), Term::pair(m.clone(), t2.clone()));
                    let inner = Term::rec(next, u.clone(), v.clone(), w.clone());
                    Some((Term::app(v.clone(), inner), RuleName::RecSuc))
                }
                _ => None,
            }
        }
        (Calculus::Llcim, TermKind::Iter(n, u, v)) => match n.kind() {
            TermKind::Zero if v.is_closed() => Some((u.clone(), RuleName::IterZero)),
            TermKind::Suc(m) if v.is_closed() => {
                Some((Term::app(v.clone(), Term::iter(m.clone(), u.clone(), v.clone())), RuleName::IterSuc))
            }
            _ => None,
        },
        (Calculus::Llcim, TermKind::Min(n, u, f)) => match n.kind() {
            TermKind::Zero if f.is_closed() => Some((u.clone(), RuleName::MinZero)),
            TermKind::Suc(m) if f.is_closed() && m.is_closed() && u.is_closed() => {
                let su = Term::suc(u.clone());
                Some((Term::min(Term::app(f.clone(), su.clone()), su, f.clone()), RuleName::MinSuc))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Pre-order walk: calls `visit` on every subterm with its path, root first,
/// children left to right. Stops early when `visit` returns `true`.
fn walk_preorder<'t>(t: &'t Term, mut visit: impl FnMut(&'t Term, &[usize]) -> bool) {
    let mut path: Vec<usize> = Vec::new();
    // (term, depth, child index within parent)
    let mut stack: Vec<(&Term, usize, usize)> = vec![(t, 0, 0)];
    while let Some((t, depth, idx)) = stack.pop() {
        if depth > 0 {
            path.truncate(depth - 1);
            path.push(idx);
        } else {
            path.clear();
        }
        if visit(t, &path) {
            return;
        }
        let children: Vec<&Term> = t.children().collect();
        for (i, c) in children.into_iter().enumerate().rev() {
            stack.push((c, depth + 1, i));
        }
    }
}

/// Applies the root rule at `path`, if one fires there.
pub fn step_at(calculus: Calculus, t: &Term, path: &Path) -> Option<Step> {
    let sub = t.at(path)?;
    let (new, rule) = step_root_in(calculus, sub)?;
    Some(Step { term: t.replace_at(&path.0, new), rule, path: path.clone() })
}

/// Leftmost-outermost step of λ-rec, reducing under λ as closed reduction
/// permits.
pub fn step_lo(t: &Term) -> Option<Step> {
    step_lo_in(Calculus::Lrec, t)
}

pub fn step_lo_in(calculus: Calculus, t: &Term) -> Option<Step> {
    let mut found: Option<(Path, Term, RuleName)> = None;
    walk_preorder(t, |sub, path| match step_root_in(calculus, sub) {
        Some((new, rule)) => {
            found = Some((Path(path.to_vec()), new, rule));
            true
        }
        None => false,
    });
    found.map(|(path, new, rule)| Step { term: t.replace_at(&path.0, new), rule, path })
}

/// Every position at which a root rule fires, in pre-order.
pub fn redexes(calculus: Calculus, t: &Term) -> Vec<Path> {
    let mut out = Vec::new();
    walk_preorder(t, |sub, path| {
        if step_root_in(calculus, sub).is_some() {
            out.push(Path(path.to_vec()));
        }
        false
    });
    out
}

/// A step at a redex chosen uniformly among all enabled ones.
pub fn step_random<R: Rng + ?Sized>(calculus: Calculus, t: &Term, rng: &mut R) -> Option<Step> {
    let rs = redexes(calculus, t);
    if rs.is_empty() {
        return None;
    }
    let i = rng.gen_range(0..rs.len());
    step_at(calculus, t, &rs[i])
}

/// A successful reduction sequence.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub term: Term,
    pub steps: u64,
}

/// Fuel ran out; `last` is the term reached.
#[derive(Debug, Clone)]
pub struct Exhausted {
    pub last: Term,
    pub steps: u64,
}

/// Iterates `next` until it yields nothing or fuel runs out. `observe` sees
/// every step taken.
pub fn run_steps(
    t: &Term,
    fuel: &mut Fuel,
    mut next: impl FnMut(&Term) -> Option<Step>,
    mut observe: impl FnMut(u64, &Step),
) -> Result<Reduced, Exhausted> {
    let mut cur = t.clone();
    let mut steps = 0u64;
    loop {
        let Some(step) = next(&cur) else {
            return Ok(Reduced { term: cur, steps });
        };
        if !fuel.take() {
            return Err(Exhausted { last: cur, steps });
        }
        steps += 1;
        observe(steps, &step);
        cur = step.term;
    }
}

/// Leftmost-outermost normalisation of a λ-rec term.
pub fn normalize(t: &Term, fuel: &mut Fuel) -> Result<Reduced, Exhausted> {
    normalize_in(Calculus::Lrec, t, fuel)
}

/// Takes exactly the steps of iterating [`step_lo_in`], without re-walking
/// the term from the root after each one.
///
/// The search is a pre-order walk with a zipper. A root rule inspects at
/// most two levels below its node, and closed reduction of a linear term
/// keeps the free variables of the contracted subterm, so after a
/// contraction only the parent and grandparent can have become redexes; the
/// walk backs up two levels and continues. Subtrees left of the focus were
/// already found to be normal and stay that way.
pub fn normalize_in(calculus: Calculus, t: &Term, fuel: &mut Fuel) -> Result<Reduced, Exhausted> {
    fn rebuild(frames: &mut Vec<(Term, usize)>, mut focus: Term) -> Term {
        while let Some((p, i)) = frames.pop() {
            focus = p.with_child(i, focus);
        }
        focus
    }
    let mut frames: Vec<(Term, usize)> = Vec::new();
    // child indices leading back down to the last contraction
    let mut redo: Vec<usize> = Vec::new();
    let mut focus = t.clone();
    let mut steps = 0u64;
    loop {
        if let Some((new, _)) = step_root_in(calculus, &focus) {
            if !fuel.take() {
                return Err(Exhausted { last: rebuild(&mut frames, focus), steps });
            }
            steps += 1;
            redo.clear();
            let kept_fv = new.free_var_count() == focus.free_var_count();
            focus = new;
            if !kept_fv {
                // only possible for non-linear input: anything above may have changed
                focus = rebuild(&mut frames, focus);
                continue;
            }
            for _ in 0..2 {
                let Some((p, i)) = frames.pop() else { break };
                redo.push(i);
                focus = p.with_child(i, focus);
            }
            continue;
        }
        let next = redo.pop().unwrap_or(0);
        if let Some(c) = focus.child(next) {
            let c = c.clone();
            frames.push((focus, next));
            focus = c;
            continue;
        }
        // subtree done: move to the next sibling, climbing as needed
        loop {
            let Some((p, i)) = frames.pop() else {
                return Ok(Reduced { term: focus, steps });
            };
            let p = p.with_child(i, focus);
            if let Some(c) = p.child(i + 1) {
                let c = c.clone();
                frames.push((p, i + 1));
                focus = c;
                break;
            }
            focus = p;
        }
    }
}

/// Normalisation by uniformly random redex choice.
pub fn normalize_random<R: Rng + ?Sized>(
    calculus: Calculus,
    t: &Term,
    fuel: &mut Fuel,
    rng: &mut R,
) -> Result<Reduced, Exhausted> {
    run_steps(t, fuel, |u| step_random(calculus, u, rng), |_, _| {})
}

/// The position of the head redex candidate: the place weak-head reduction
/// must act on next. `None` if `t` is already a weak head normal form or its
/// head is a variable.
pub fn head_position(calculus: Calculus, t: &Term) -> Option<Path> {
    let mut path = Vec::new();
    let mut t = t;
    loop {
        match t.kind() {
            TermKind::Zero | TermKind::Suc(_) | TermKind::Lam(..) | TermKind::Pair(..) | TermKind::Var(_) => {
                return if path.is_empty() { None } else { Some(Path(path)) }
            }
            TermKind::App(f, _) => {
                if matches!(f.kind(), TermKind::Lam(..)) {
                    return Some(Path(path));
                }
                path.push(0);
                t = f;
            }
            TermKind::LetPair(s, ..) => {
                if matches!(s.kind(), TermKind::Pair(..)) {
                    return Some(Path(path));
                }
                path.push(0);
                t = s;
            }
            TermKind::Rec(s, ..) => {
                if calculus != Calculus::Lrec {
                    return None;
                }
                match s.kind() {
                    TermKind::Pair(n, _) => {
                        if matches!(n.kind(), TermKind::Zero | TermKind::Suc(_)) {
                            return Some(Path(path));
                        }
                        path.push(0);
                        path.push(0);
                        t = n;
                    }
                    _ => {
                        path.push(0);
                        t = s;
                    }
                }
            }
            TermKind::Iter(n, ..) | TermKind::Min(n, ..) => {
                if calculus != Calculus::Llcim {
                    return None;
                }
                if matches!(n.kind(), TermKind::Zero | TermKind::Suc(_)) {
                    return Some(Path(path));
                }
                path.push(0);
                t = n;
            }
        }
    }
}

/// Reduces head redexes until the root is `0`, `S _`, `λ` or a pair, or no
/// head step applies. Nothing under an `S`, `λ` or pair is touched.
pub fn reduce_whnf(t: &Term, fuel: &mut Fuel) -> Result<Reduced, Exhausted> {
    reduce_whnf_in(Calculus::Lrec, t, fuel)
}

pub fn reduce_whnf_in(calculus: Calculus, t: &Term, fuel: &mut Fuel) -> Result<Reduced, Exhausted> {
    run_steps(
        t,
        fuel,
        |u| {
            if u.is_whnf() {
                return None;
            }
            let p = head_position(calculus, u)?;
            step_at(calculus, u, &p)
        },
        |_, _| {},
    )
}
