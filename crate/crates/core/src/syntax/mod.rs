//! Term representation and the purely syntactic operations on it.
//!
//! Variables are named. Every node caches its free-variable set, so the
//! closedness tests performed by closed reduction are constant time.
//! Substitution is deliberately partial: the payload must be closed or a
//! single variable, which is all the reduction rules ever need and rules out
//! variable capture.

pub(crate) mod parse;
mod pretty;

pub use parse::{parse, parse_term, parse_type, ParseError, ParseOptions, Resolve, NoRefs};
pub use pretty::pretty;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::mem;

/// A variable name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Var {
        debug_assert!(!name.is_empty(), "variable names are nonempty");
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Var {
        Var::new(s)
    }
}

/// Which calculus a term belongs to.
///
/// `Lrec` has the four-argument recursor; `Llcim` replaces it with a bounded
/// iterator and a minimiser. Both share the λ/pair/number fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Calculus {
    #[default]
    Lrec,
    Llcim,
}

impl Calculus {
    pub fn name(self) -> &'static str {
        match self {
            Calculus::Lrec => "lrec",
            Calculus::Llcim => "llcim",
        }
    }

    /// Returns the name of the first constructor in `t` that is not part of
    /// this calculus.
    pub fn foreign_construct(self, t: &Term) -> Option<&'static str> {
        let bad = |k: &TermKind| match (self, k) {
            (Calculus::Lrec, TermKind::Iter(..)) => Some("iter"),
            (Calculus::Lrec, TermKind::Min(..)) => Some("min"),
            (Calculus::Llcim, TermKind::Rec(..)) => Some("rec"),
            _ => None,
        };
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            if let Some(name) = bad(t.kind()) {
                return Some(name);
            }
            stack.extend(t.children());
        }
        None
    }
}

#[derive(Clone, Default)]
struct FreeVars(Option<Arc<BTreeSet<Var>>>);

impl FreeVars {
    fn single(x: &Var) -> FreeVars {
        let mut s = BTreeSet::new();
        s.insert(x.clone());
        FreeVars(Some(Arc::new(s)))
    }

    fn set(&self) -> Option<&BTreeSet<Var>> {
        self.0.as_deref()
    }

    fn contains(&self, x: &Var) -> bool {
        self.set().is_some_and(|s| s.contains(x))
    }

    fn union<'a>(parts: impl IntoIterator<Item = &'a FreeVars>) -> FreeVars {
        let mut acc: Option<&Arc<BTreeSet<Var>>> = None;
        let mut merged: Option<BTreeSet<Var>> = None;
        for p in parts {
            let Some(s) = &p.0 else { continue };
            match (&mut merged, acc) {
                (Some(m), _) => m.extend(s.iter().cloned()),
                (None, None) => acc = Some(s),
                (None, Some(first)) => {
                    let mut m = (**first).clone();
                    m.extend(s.iter().cloned());
                    merged = Some(m);
                }
            }
        }
        match (merged, acc) {
            (Some(m), _) => FreeVars(Some(Arc::new(m))),
            (None, Some(a)) => FreeVars(Some(a.clone())),
            (None, None) => FreeVars(None),
        }
    }

    fn without(&self, xs: &[&Var]) -> FreeVars {
        let Some(s) = &self.0 else { return FreeVars(None) };
        if !xs.iter().any(|x| s.contains(*x)) {
            return self.clone();
        }
        let mut m = (**s).clone();
        for x in xs {
            m.remove(*x);
        }
        if m.is_empty() {
            FreeVars(None)
        } else {
            FreeVars(Some(Arc::new(m)))
        }
    }
}

/// An immutable, cheaply clonable term.
#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    kind: TermKind,
    fv: FreeVars,
}

/// The constructors of the calculus.
///
/// `Rec` belongs to `Lrec`; `Iter` and `Min` belong to `Llcim` (see
/// [`Calculus`]). Child order is the textual order used by paths and by
/// leftmost-outermost reduction.
#[derive(Clone, PartialEq, Eq)]
pub enum TermKind {
    Zero,
    Suc(Term),
    /// `rec(scrutinee, base, step, update)`
    Rec(Term, Term, Term, Term),
    Var(Var),
    App(Term, Term),
    Lam(Var, Term),
    Pair(Term, Term),
    /// `let <x, y> = scrutinee in body`
    LetPair(Term, Var, Var, Term),
    /// `iter(count, base, step)`
    Iter(Term, Term, Term),
    /// `min(scrutinee, counter, fn)`
    Min(Term, Term, Term),
}

impl Drop for Node {
    // Long chains (numerals, nested applications) would otherwise overflow
    // the stack through recursive Arc drops.
    fn drop(&mut self) {
        let mut pending: Vec<Term> = Vec::new();
        take_children(&mut self.kind, &mut pending);
        while let Some(t) = pending.pop() {
            if let Some(mut node) = Arc::into_inner(t.0) {
                take_children(&mut node.kind, &mut pending);
            }
        }
    }
}

fn take_children(kind: &mut TermKind, out: &mut Vec<Term>) {
    match mem::replace(kind, TermKind::Zero) {
        TermKind::Zero | TermKind::Var(_) => {}
        TermKind::Suc(a) | TermKind::Lam(_, a) => out.push(a),
        TermKind::App(a, b) | TermKind::Pair(a, b) | TermKind::LetPair(a, _, _, b) => {
            out.push(a);
            out.push(b);
        }
        TermKind::Rec(a, b, c, d) => out.extend([a, b, c, d]),
        TermKind::Iter(a, b, c) | TermKind::Min(a, b, c) => out.extend([a, b, c]),
    }
}

impl Term {
    fn from_kind(kind: TermKind) -> Term {
        let fv = match &kind {
            TermKind::Zero => FreeVars(None),
            TermKind::Var(x) => FreeVars::single(x),
            TermKind::Suc(t) => t.0.fv.clone(),
            TermKind::Lam(x, t) => t.0.fv.without(&[x]),
            TermKind::App(a, b) | TermKind::Pair(a, b) => FreeVars::union([&a.0.fv, &b.0.fv]),
            TermKind::LetPair(s, x, y, b) => {
                FreeVars::union([&s.0.fv, &b.0.fv.without(&[x, y])])
            }
            TermKind::Rec(a, b, c, d) => FreeVars::union([&a.0.fv, &b.0.fv, &c.0.fv, &d.0.fv]),
            TermKind::Iter(a, b, c) | TermKind::Min(a, b, c) => {
                FreeVars::union([&a.0.fv, &b.0.fv, &c.0.fv])
            }
        };
        Term(Arc::new(Node { kind, fv }))
    }

    pub fn zero() -> Term {
        Term::from_kind(TermKind::Zero)
    }

    pub fn suc(t: Term) -> Term {
        Term::from_kind(TermKind::Suc(t))
    }

    pub fn var(x: impl Into<Var>) -> Term {
        Term::from_kind(TermKind::Var(x.into()))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::from_kind(TermKind::App(f, a))
    }

    /// Left-nested application `f a1 a2 ...`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn lam(x: impl Into<Var>, body: Term) -> Term {
        Term::from_kind(TermKind::Lam(x.into(), body))
    }

    /// `\x1 x2 ... . body`
    pub fn lams<V: Into<Var>>(xs: impl IntoIterator<Item = V>, body: Term) -> Term {
        let xs: Vec<Var> = xs.into_iter().map(Into::into).collect();
        xs.into_iter().rev().fold(body, |b, x| Term::lam(x, b))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::from_kind(TermKind::Pair(a, b))
    }

    pub fn let_pair(scrutinee: Term, x: impl Into<Var>, y: impl Into<Var>, body: Term) -> Term {
        Term::from_kind(TermKind::LetPair(scrutinee, x.into(), y.into(), body))
    }

    pub fn rec(scrutinee: Term, base: Term, step: Term, update: Term) -> Term {
        Term::from_kind(TermKind::Rec(scrutinee, base, step, update))
    }

    pub fn iter(count: Term, base: Term, step: Term) -> Term {
        Term::from_kind(TermKind::Iter(count, base, step))
    }

    pub fn min(scrutinee: Term, counter: Term, f: Term) -> Term {
        Term::from_kind(TermKind::Min(scrutinee, counter, f))
    }

    /// The identity `\x. x`.
    pub fn identity() -> Term {
        Term::lam("x", Term::var("x"))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn ptr_eq(a: &Term, b: &Term) -> bool {
        Arc::ptr_eq(&a.0, &b.0)
    }

    pub fn is_closed(&self) -> bool {
        self.0.fv.0.is_none()
    }

    pub fn has_free(&self, x: &Var) -> bool {
        self.0.fv.contains(x)
    }

    /// Free variables, in name order.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.0.fv.set().cloned().unwrap_or_default()
    }

    pub fn free_var_count(&self) -> usize {
        self.0.fv.set().map_or(0, BTreeSet::len)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self.kind() {
            TermKind::Var(x) => Some(x),
            _ => None,
        }
    }

    /// Weak head normal form: `0`, `S t`, `\x.t` or `<s, t>`.
    pub fn is_whnf(&self) -> bool {
        matches!(
            self.kind(),
            TermKind::Zero | TermKind::Suc(_) | TermKind::Lam(..) | TermKind::Pair(..)
        )
    }

    /// Immediate subterms in textual order.
    pub fn children(&self) -> impl Iterator<Item = &Term> + '_ {
        let v: [Option<&Term>; 4] = match self.kind() {
            TermKind::Zero | TermKind::Var(_) => [None, None, None, None],
            TermKind::Suc(a) | TermKind::Lam(_, a) => [Some(a), None, None, None],
            TermKind::App(a, b) | TermKind::Pair(a, b) | TermKind::LetPair(a, _, _, b) => {
                [Some(a), Some(b), None, None]
            }
            TermKind::Rec(a, b, c, d) => [Some(a), Some(b), Some(c), Some(d)],
            TermKind::Iter(a, b, c) | TermKind::Min(a, b, c) => [Some(a), Some(b), Some(c), None],
        };
        v.into_iter().flatten()
    }

    pub fn child(&self, i: usize) -> Option<&Term> {
        self.children().nth(i)
    }

    /// Rebuilds this node with child `i` replaced.
    ///
    /// Panics if `i` is out of range.
    pub fn with_child(&self, i: usize, new: Term) -> Term {
        use TermKind::*;
        let k = match (self.kind(), i) {
            (Suc(_), 0) => Suc(new),
            (Lam(x, _), 0) => Lam(x.clone(), new),
            (App(_, b), 0) => App(new, b.clone()),
            (App(a, _), 1) => App(a.clone(), new),
            (Pair(_, b), 0) => Pair(new, b.clone()),
            (Pair(a, _), 1) => Pair(a.clone(), new),
            (LetPair(_, x, y, b), 0) => LetPair(new, x.clone(), y.clone(), b.clone()),
            (LetPair(s, x, y, _), 1) => LetPair(s.clone(), x.clone(), y.clone(), new),
            (Rec(_, b, c, d), 0) => Rec(new, b.clone(), c.clone(), d.clone()),
            (Rec(a, _, c, d), 1) => Rec(a.clone(), new, c.clone(), d.clone()),
            (Rec(a, b, _, d), 2) => Rec(a.clone(), b.clone(), new, d.clone()),
            (Rec(a, b, c, _), 3) => Rec(a.clone(), b.clone(), c.clone(), new),
            (Iter(_, b, c), 0) => Iter(new, b.clone(), c.clone()),
            (Iter(a, _, c), 1) => Iter(a.clone(), new, c.clone()),
            (Iter(a, b, _), 2) => Iter(a.clone(), b.clone(), new),
            (Min(_, b, c), 0) => Min(new, b.clone(), c.clone()),
            (Min(a, _, c), 1) => Min(a.clone(), new, c.clone()),
            (Min(a, b, _), 2) => Min(a.clone(), b.clone(), new),
            _ => panic!("child index {i} out of range"),
        };
        Term::from_kind(k)
    }

    /// The subterm at `path`, if it exists.
    pub fn at(&self, path: &Path) -> Option<&Term> {
        let mut t = self;
        for &i in &path.0 {
            t = t.child(i)?;
        }
        Some(t)
    }

    /// Replaces the subterm at `path`.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Term {
        let mut ancestors = Vec::with_capacity(path.len());
        let mut t = self;
        for &i in path {
            ancestors.push((t, i));
            t = t.child(i).expect("path leads outside the term");
        }
        ancestors.into_iter().rev().fold(new, |acc, (p, i)| p.with_child(i, acc))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            n += 1;
            stack.extend(t.children());
        }
        n
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Term::ptr_eq(self, other) || self.kind() == other.kind()
    }
}

impl Eq for Term {}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

/// A position in a term: the sequence of child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Path {
    /// Dot-separated child indices; the root is written `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

pub fn free_vars(t: &Term) -> BTreeSet<Var> {
    t.free_vars()
}

// ---------------------------------------------------------------------------
// Linearity
// ---------------------------------------------------------------------------

/// Which syntactic linearity constraint a subterm breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `\x.t` with `x` not free in `t`.
    UnusedBinder,
    /// The two sides of an application share free variables.
    SharedInApp,
    /// The two components of a pair share free variables.
    SharedInPair,
    /// Two of the arguments `i < j` of a recursor, iterator or minimiser
    /// share free variables.
    SharedInArgs(usize, usize),
    /// `let <x,y> = s in t` with `x` or `y` not free in `t`.
    UnusedLetBinder,
    /// `let <x,x> = s in t`.
    DuplicateLetBinder,
    /// The scrutinee of a `let` shares free variables with its body.
    SharedInLet,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::UnusedBinder => f.write_str("abstracted variable does not occur in the body"),
            Constraint::SharedInApp => f.write_str("function and argument share free variables"),
            Constraint::SharedInPair => f.write_str("pair components share free variables"),
            Constraint::SharedInArgs(i, j) => write!(f, "arguments {i} and {j} share free variables"),
            Constraint::UnusedLetBinder => f.write_str("let-bound variable does not occur in the body"),
            Constraint::DuplicateLetBinder => f.write_str("let binds the same variable twice"),
            Constraint::SharedInLet => f.write_str("let scrutinee and body share free variables"),
        }
    }
}

/// A linearity violation at a subterm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: Path,
    pub constraint: Constraint,
    /// The offending variables.
    pub vars: Vec<Var>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", self.path, self.constraint)?;
        if !self.vars.is_empty() {
            f.write_str(" (")?;
            for (n, v) in self.vars.iter().enumerate() {
                if n > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn shared(a: &Term, b: &Term) -> Vec<Var> {
    match (a.0.fv.set(), b.0.fv.set()) {
        (Some(x), Some(y)) => x.intersection(y).cloned().collect(),
        _ => Vec::new(),
    }
}

/// Checks every variable constraint of the term grammar at every subterm.
pub fn check_linear(t: &Term) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    linear_walk(t, &mut path, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn linear_walk(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    if let TermKind::Suc(_) = t.kind() {
        let depth = path.len();
        let mut inner = t;
        while let TermKind::Suc(b) = inner.kind() {
            path.push(0);
            inner = b;
        }
        linear_walk(inner, path, out);
        path.truncate(depth);
        return;
    }
    let mut report = |c: Constraint, vars: Vec<Var>| {
        out.push(Violation { path: Path(path.clone()), constraint: c, vars })
    };
    match t.kind() {
        TermKind::Zero | TermKind::Var(_) | TermKind::Suc(_) => {}
        TermKind::Lam(x, b) => {
            if !b.has_free(x) {
                report(Constraint::UnusedBinder, vec![x.clone()]);
            }
        }
        TermKind::App(a, b) => {
            let s = shared(a, b);
            if !s.is_empty() {
                report(Constraint::SharedInApp, s);
            }
        }
        TermKind::Pair(a, b) => {
            let s = shared(a, b);
            if !s.is_empty() {
                report(Constraint::SharedInPair, s);
            }
        }
        TermKind::LetPair(s, x, y, b) => {
            if x == y {
                report(Constraint::DuplicateLetBinder, vec![x.clone()]);
            }
            let unused: Vec<Var> = [x, y].into_iter().filter(|v| !b.has_free(v)).cloned().collect();
            if !unused.is_empty() {
                report(Constraint::UnusedLetBinder, unused);
            }
            let body_free = b.0.fv.without(&[x, y]);
            let sh: Vec<Var> = match (s.0.fv.set(), body_free.set()) {
                (Some(p), Some(q)) => p.intersection(q).cloned().collect(),
                _ => Vec::new(),
            };
            if !sh.is_empty() {
                report(Constraint::SharedInLet, sh);
            }
        }
        TermKind::Rec(..) | TermKind::Iter(..) | TermKind::Min(..) => {
            let args: Vec<&Term> = t.children().collect();
            for i in 0..args.len() {
                for j in i + 1..args.len() {
                    let s = shared(args[i], args[j]);
                    if !s.is_empty() {
                        report(Constraint::SharedInArgs(i, j), s);
                    }
                }
            }
        }
    }
    for (i, c) in t.children().enumerate() {
        path.push(i);
        linear_walk(c, path, out);
        path.pop();
    }
}

// ---------------------------------------------------------------------------
// Substitution and renaming
// ---------------------------------------------------------------------------

/// `t[s/x]`: replaces the free occurrences of `x` in `t` by `s`.
///
/// `s` must be closed or a variable. With a closed payload no capture is
/// possible; with a variable payload `y`, panics if `y` would be captured by
/// a binder on the way to an occurrence of `x`.
///
/// # Panics
///
/// If `s` is open and not a variable.
pub fn subst(t: &Term, x: &Var, s: &Term) -> Term {
    let payload_var = s.as_var();
    assert!(
        s.is_closed() || payload_var.is_some(),
        "substitution payload must be closed or a variable, got {s}"
    );
    if !t.has_free(x) {
        return t.clone();
    }
    subst_go(t, x, s, payload_var)
}

fn subst_go(t: &Term, x: &Var, s: &Term, capture: Option<&Var>) -> Term {
    if !t.has_free(x) {
        return t.clone();
    }
    let guard = |binder: &Var| {
        if capture == Some(binder) {
            panic!("renaming {x} to {binder} would be captured");
        }
    };
    let go = |c: &Term| subst_go(c, x, s, capture);
    match t.kind() {
        TermKind::Var(_) => s.clone(),
        TermKind::Zero => t.clone(),
        TermKind::Suc(a) => Term::suc(go(a)),
        TermKind::Lam(y, b) => {
            guard(y);
            Term::lam(y.clone(), go(b))
        }
        TermKind::App(a, b) => Term::app(go(a), go(b)),
        TermKind::Pair(a, b) => Term::pair(go(a), go(b)),
        TermKind::LetPair(sc, y, z, b) => {
            let body = if b.has_free(x) && y != x && z != x {
                guard(y);
                guard(z);
                go(b)
            } else {
                b.clone()
            };
            Term::let_pair(go(sc), y.clone(), z.clone(), body)
        }
        TermKind::Rec(a, b, c, d) => Term::rec(go(a), go(b), go(c), go(d)),
        TermKind::Iter(a, b, c) => Term::iter(go(a), go(b), go(c)),
        TermKind::Min(a, b, c) => Term::min(go(a), go(b), go(c)),
    }
}

/// Every name occurring in `t`, free or bound.
pub fn names(t: &Term) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match t.kind() {
            TermKind::Var(x) | TermKind::Lam(x, _) => {
                out.insert(x.clone());
            }
            TermKind::LetPair(_, x, y, _) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            _ => {}
        }
        stack.extend(t.children());
    }
    out
}

/// `t[y/x]` for a name `y` that does not occur in `t`.
///
/// # Panics
///
/// If `y` occurs in `t`.
pub fn rename(t: &Term, x: &Var, y: &Var) -> Term {
    assert!(!names(t).contains(y), "rename target {y} occurs in the term");
    subst(t, x, &Term::var(y.clone()))
}

/// A source of names distinct from a given set.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    taken: BTreeSet<Var>,
    /// Next suffix to try per stem; every smaller suffix is taken.
    next: BTreeMap<String, usize>,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply::default()
    }

    /// A supply avoiding every name of `t`.
    pub fn avoiding(t: &Term) -> NameSupply {
        NameSupply { taken: names(t), next: BTreeMap::new() }
    }

    pub fn avoid(&mut self, t: &Term) {
        self.taken.extend(names(t));
    }

    pub fn reserve(&mut self, x: &Var) {
        self.taken.insert(x.clone());
    }

    /// `base` if unused, else `base1`, `base2`, ...
    pub fn fresh(&mut self, base: &str) -> Var {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { "x" } else { stem };
        let mut candidate = Var::new(base);
        if self.taken.contains(&candidate) {
            let n = self.next.entry(String::from(stem)).or_insert(1);
            loop {
                candidate = Var::new(&alloc::format!("{stem}{n}"));
                *n += 1;
                if !self.taken.contains(&candidate) {
                    break;
                }
            }
        }
        self.taken.insert(candidate.clone());
        candidate
    }
}

/// Renames binders so that all of them are pairwise distinct and distinct
/// from the free variables (Barendregt's convention). Free variables are
/// left unchanged; the result is α-equivalent to `t`.
pub fn freshen(t: &Term) -> Term {
    let mut supply = NameSupply::new();
    for x in t.free_vars() {
        supply.reserve(&x);
    }
    let mut scope = Vec::new();
    freshen_go(t, &mut supply, &mut scope)
}

fn freshen_go(t: &Term, supply: &mut NameSupply, scope: &mut Vec<(Var, Var)>) -> Term {
    match t.kind() {
        TermKind::Var(x) => match scope.iter().rev().find(|(old, _)| old == x) {
            Some((_, new)) => Term::var(new.clone()),
            None => t.clone(),
        },
        TermKind::Zero => t.clone(),
        TermKind::Suc(_) => {
            let mut n = 0usize;
            let mut inner = t;
            while let TermKind::Suc(b) = inner.kind() {
                n += 1;
                inner = b;
            }
            let fresh_inner = freshen_go(inner, supply, scope);
            if fresh_inner == *inner {
                return t.clone();
            }
            (0..n).fold(fresh_inner, |acc, _| Term::suc(acc))
        }
        TermKind::Lam(x, b) => {
            let nx = supply.fresh(x.as_str());
            scope.push((x.clone(), nx.clone()));
            let nb = freshen_go(b, supply, scope);
            scope.pop();
            Term::lam(nx, nb)
        }
        TermKind::LetPair(s, x, y, b) => {
            let ns = freshen_go(s, supply, scope);
            let nx = supply.fresh(x.as_str());
            let ny = supply.fresh(y.as_str());
            scope.push((x.clone(), nx.clone()));
            scope.push((y.clone(), ny.clone()));
            let nb = freshen_go(b, supply, scope);
            scope.pop();
            scope.pop();
            Term::let_pair(ns, nx, ny, nb)
        }
        _ => {
            let mut out = t.clone();
            for (i, c) in t.children().enumerate() {
                let nc = freshen_go(c, supply, scope);
                if nc != *c {
                    out = out.with_child(i, nc);
                }
            }
            out
        }
    }
}

// ---------------------------------------------------------------------------
// α-equivalence
// ---------------------------------------------------------------------------

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    let mut env = Vec::new();
    alpha_go(t, u, &mut env)
}

fn alpha_go(t: &Term, u: &Term, env: &mut Vec<(Var, Var)>) -> bool {
    if env.is_empty() && Term::ptr_eq(t, u) {
        return true;
    }
    use TermKind::*;
    match (t.kind(), u.kind()) {
        (Zero, Zero) => true,
        (Var(x), Var(y)) => match env.iter().rev().find(|(a, b)| a == x || b == y) {
            Some((a, b)) => a == x && b == y,
            None => x == y,
        },
        (Suc(_), Suc(_)) => {
            let (mut a, mut b) = (t, u);
            while let (Suc(x), Suc(y)) = (a.kind(), b.kind()) {
                a = x;
                b = y;
            }
            alpha_go(a, b, env)
        }
        (Lam(x, a), Lam(y, b)) => {
            env.push((x.clone(), y.clone()));
            let r = alpha_go(a, b, env);
            env.pop();
            r
        }
        (LetPair(s1, x1, y1, b1), LetPair(s2, x2, y2, b2)) => {
            if !alpha_go(s1, s2, env) {
                return false;
            }
            env.push((x1.clone(), x2.clone()));
            env.push((y1.clone(), y2.clone()));
            let r = alpha_go(b1, b2, env);
            env.pop();
            env.pop();
            r
        }
        (App(..), App(..))
        | (Pair(..), Pair(..))
        | (Rec(..), Rec(..))
        | (Iter(..), Iter(..))
        | (Min(..), Min(..)) => t.children().zip(u.children()).all(|(a, b)| alpha_go(a, b, env)),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Numerals and tuples
// ---------------------------------------------------------------------------

/// `S^n 0`.
pub fn numeral(n: u64) -> Term {
    let mut t = Term::zero();
    for _ in 0..n {
        t = Term::suc(t);
    }
    t
}

/// Inverse of [`numeral`]; `None` if `t` is not of the form `S^n 0`.
pub fn numeral_value(t: &Term) -> Option<u64> {
    let mut n = 0u64;
    let mut t = t;
    loop {
        match t.kind() {
            TermKind::Zero => return Some(n),
            TermKind::Suc(a) => {
                n += 1;
                t = a;
            }
            _ => return None,
        }
    }
}

/// `<t1, <t2, ... tn>>`.
///
/// # Panics
///
/// If fewer than two components are given.
pub fn mk_tuple(ts: Vec<Term>) -> Term {
    assert!(ts.len() >= 2, "tuples have at least two components");
    let mut it = ts.into_iter().rev();
    let last = it.next().unwrap();
    it.fold(last, |acc, t| Term::pair(t, acc))
}

/// `let <x1, ..., xn> = scrutinee in body`, as nested pair lets through
/// fresh intermediate names.
///
/// # Panics
///
/// If fewer than two variables are given.
pub fn let_tuple(scrutinee: Term, vs: Vec<Var>, body: Term) -> Term {
    assert!(vs.len() >= 2, "tuple patterns bind at least two variables");
    let mut supply = NameSupply::avoiding(&scrutinee);
    supply.avoid(&body);
    for v in &vs {
        supply.reserve(v);
    }
    let n = vs.len();
    // intermediate names y1..y(n-2)
    let mids: Vec<Var> = (0..n - 2).map(|_| supply.fresh("y")).collect();
    let mut t = Term::let_pair(
        if n == 2 { scrutinee.clone() } else { Term::var(mids[n - 3].clone()) },
        vs[n - 2].clone(),
        vs[n - 1].clone(),
        body,
    );
    for i in (0..n - 2).rev() {
        let scrut = if i == 0 { scrutinee.clone() } else { Term::var(mids[i - 1].clone()) };
        t = Term::let_pair(scrut, vs[i].clone(), mids[i].clone(), t);
    }
    t
}

/// Convenience used by the builders: a fresh-name-free `String` of a term.
pub fn show(t: &Term) -> String {
    pretty(t)
}
