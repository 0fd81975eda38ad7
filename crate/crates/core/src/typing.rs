//! Linear types and type inference.
//!
//! Inference is syntax-directed with first-order unification over
//! `Nat`, `⊸` and `⊗`. Context splitting never needs to be searched for:
//! linearity fixes which part of the environment each subterm sees, so the
//! engine just looks variables up and the linearity checker guarantees the
//! split is respected.
//!
//! [`check_nonlinear`] is the relaxed judgement in which a designated set of
//! variables may be weakened and contracted. It validates compiler
//! intermediates before bracket abstraction restores linearity.

use alloc::sync::Arc;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{check_linear, Calculus, Constraint, Path, Term, TermKind, Var, Violation};

/// `Nat | A ⊸ B | A ⊗ B`, plus unification variables during inference.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinType {
    Nat,
    Lolli(Arc<LinType>, Arc<LinType>),
    Tensor(Arc<LinType>, Arc<LinType>),
    Meta(u32),
}

impl LinType {
    pub fn lolli(a: LinType, b: LinType) -> LinType {
        LinType::Lolli(Arc::new(a), Arc::new(b))
    }

    pub fn tensor(a: LinType, b: LinType) -> LinType {
        LinType::Tensor(Arc::new(a), Arc::new(b))
    }

    /// `Nat ⊗ Nat`, the type of recursor scrutinees.
    pub fn nat_pair() -> LinType {
        LinType::tensor(LinType::Nat, LinType::Nat)
    }

    /// `a1 ⊸ a2 ⊸ ... ⊸ result`
    pub fn arrows(args: impl IntoIterator<Item = LinType>, result: LinType) -> LinType {
        let args: Vec<LinType> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |acc, a| LinType::lolli(a, acc))
    }

    /// No unification variables.
    pub fn is_ground(&self) -> bool {
        match self {
            LinType::Nat => true,
            LinType::Meta(_) => false,
            LinType::Lolli(a, b) | LinType::Tensor(a, b) => a.is_ground() && b.is_ground(),
        }
    }

    /// Built from `Nat` and `⊗` only.
    pub fn is_data(&self) -> bool {
        match self {
            LinType::Nat => true,
            LinType::Tensor(a, b) => a.is_data() && b.is_data(),
            _ => false,
        }
    }

    /// `Nat` has depth 1; a connective adds one to the deeper side.
    pub fn depth(&self) -> usize {
        match self {
            LinType::Nat | LinType::Meta(_) => 1,
            LinType::Lolli(a, b) | LinType::Tensor(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Every ground type of depth at most `d`, in a fixed order.
    pub fn all_up_to_depth(d: usize) -> Vec<LinType> {
        if d == 0 {
            return Vec::new();
        }
        let smaller = LinType::all_up_to_depth(d - 1);
        let mut out = vec![LinType::Nat];
        for a in &smaller {
            for b in &smaller {
                out.push(LinType::lolli(a.clone(), b.clone()));
            }
        }
        for a in &smaller {
            for b in &smaller {
                out.push(LinType::tensor(a.clone(), b.clone()));
            }
        }
        out
    }

    /// Replaces every unification variable by `Nat`.
    pub fn ground(&self) -> LinType {
        match self {
            LinType::Nat | LinType::Meta(_) => LinType::Nat,
            LinType::Lolli(a, b) => LinType::lolli(a.ground(), b.ground()),
            LinType::Tensor(a, b) => LinType::tensor(a.ground(), b.ground()),
        }
    }

    fn metas(&self, out: &mut Vec<u32>) {
        match self {
            LinType::Nat => {}
            LinType::Meta(m) => {
                if !out.contains(m) {
                    out.push(*m);
                }
            }
            LinType::Lolli(a, b) | LinType::Tensor(a, b) => {
                a.metas(out);
                b.metas(out);
            }
        }
    }

    fn rename_metas(&self, map: &BTreeMap<u32, u32>) -> LinType {
        match self {
            LinType::Nat => LinType::Nat,
            LinType::Meta(m) => LinType::Meta(map[m]),
            LinType::Lolli(a, b) => LinType::lolli(a.rename_metas(map), b.rename_metas(map)),
            LinType::Tensor(a, b) => LinType::tensor(a.rename_metas(map), b.rename_metas(map)),
        }
    }

    /// Renumbers unification variables `0, 1, ...` in order of first
    /// occurrence, so that equal-up-to-renaming types compare equal.
    pub fn canonical(&self) -> LinType {
        let mut ms = Vec::new();
        self.metas(&mut ms);
        let map: BTreeMap<u32, u32> = ms.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
        self.rename_metas(&map)
    }
}

fn meta_name(m: u32, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let letter = (b'a' + (m % 26) as u8) as char;
    if m < 26 {
        write!(f, "?{letter}")
    } else {
        write!(f, "?{letter}{}", m / 26)
    }
}

impl fmt::Display for LinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinType::Nat => f.write_str("Nat"),
            LinType::Meta(m) => meta_name(*m, f),
            LinType::Lolli(a, b) => {
                if matches!(**a, LinType::Lolli(..)) {
                    write!(f, "({a}) -o {b}")
                } else {
                    write!(f, "{a} -o {b}")
                }
            }
            LinType::Tensor(a, b) => {
                if matches!(**a, LinType::Lolli(..) | LinType::Tensor(..)) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str(" * ")?;
                if matches!(**b, LinType::Lolli(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

impl fmt::Debug for LinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An ordered list of typing assumptions with distinct variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv(Vec<(Var, LinType)>);

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, LinType)>) -> Result<TypeEnv, TypeError> {
        let mut env = TypeEnv::new();
        for (x, a) in pairs {
            env.push(x, a)?;
        }
        Ok(env)
    }

    pub fn push(&mut self, x: Var, a: LinType) -> Result<(), TypeError> {
        if self.get(&x).is_some() {
            return Err(TypeError::DuplicateAssumption(x));
        }
        self.0.push((x, a));
        Ok(())
    }

    pub fn get(&self, x: &Var) -> Option<&LinType> {
        self.0.iter().find(|(y, _)| y == x).map(|(_, a)| a)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> + '_ {
        self.0.iter().map(|(x, _)| x)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Var, LinType)> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Typing rule names, for error reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Var,
    Abs,
    App,
    Pair,
    Let,
    Zero,
    Succ,
    Rec,
    Iter,
    Min,
    Check,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Var => "Var",
            Rule::Abs => "Abs",
            Rule::App => "App",
            Rule::Pair => "Pair",
            Rule::Let => "Let",
            Rule::Zero => "Zero",
            Rule::Succ => "Succ",
            Rule::Rec => "Rec",
            Rule::Iter => "Iter",
            Rule::Min => "Min",
            Rule::Check => "Check",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("rule {rule} at {path}: cannot match {expected} with {found}")]
    Mismatch { rule: Rule, path: Path, expected: LinType, found: LinType },
    #[error("rule {rule} at {path}: infinite type {meta} = {ty}")]
    Occurs { rule: Rule, path: Path, meta: LinType, ty: LinType },
    #[error("environment domain differs from the free variables: missing {missing:?}, unused {unused:?}")]
    EnvDomain { missing: Vec<Var>, unused: Vec<Var> },
    #[error("linearity violation: {0:?}")]
    Linearity(Vec<Violation>),
    #[error("at {path}: variable {var} used non-linearly ({constraint})")]
    NonLinear { var: Var, path: Path, constraint: Constraint },
    #[error("'{construct}' is not part of {calculus}")]
    Foreign { construct: &'static str, calculus: &'static str },
    #[error("variable {0} assumed twice")]
    DuplicateAssumption(Var),
}

/// The result of inference together with the constraints it solved.
#[derive(Debug, Clone)]
pub struct Inference {
    /// The inferred type with the solution applied (not renumbered).
    pub ty: LinType,
    /// Every equation handed to the unifier, before solving.
    pub constraints: Vec<(LinType, LinType)>,
    solution: Vec<Option<LinType>>,
}

impl Inference {
    /// Applies the final substitution.
    pub fn apply(&self, t: &LinType) -> LinType {
        zonk(&self.solution, t)
    }
}

fn zonk(sol: &[Option<LinType>], t: &LinType) -> LinType {
    match t {
        LinType::Nat => LinType::Nat,
        LinType::Meta(m) => match sol.get(*m as usize).and_then(Option::as_ref) {
            Some(u) => zonk(sol, u),
            None => t.clone(),
        },
        LinType::Lolli(a, b) => LinType::lolli(zonk(sol, a), zonk(sol, b)),
        LinType::Tensor(a, b) => LinType::tensor(zonk(sol, a), zonk(sol, b)),
    }
}

struct Engine<'e> {
    sol: Vec<Option<LinType>>,
    constraints: Vec<(LinType, LinType)>,
    scope: Vec<(Var, LinType)>,
    env: &'e TypeEnv,
    path: Vec<usize>,
    /// Keep every equation for [`Inference::constraints`].
    record: bool,
}

impl<'e> Engine<'e> {
    fn new(env: &'e TypeEnv) -> Engine<'e> {
        let mut e = Engine { sol: Vec::new(), constraints: Vec::new(), scope: Vec::new(), env, path: Vec::new(), record: false };
        // environment types may mention metas chosen by the caller
        let mut ms = Vec::new();
        for (_, a) in env.iter() {
            a.metas(&mut ms);
        }
        if let Some(&max) = ms.iter().max() {
            e.sol.resize(max as usize + 1, None);
        }
        e
    }

    fn fresh(&mut self) -> LinType {
        self.sol.push(None);
        LinType::Meta((self.sol.len() - 1) as u32)
    }

    fn shallow(&self, t: &LinType) -> LinType {
        let mut t = t.clone();
        while let LinType::Meta(m) = t {
            match &self.sol[m as usize] {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn occurs(&self, m: u32, t: &LinType) -> bool {
        match self.shallow(t) {
            LinType::Nat => false,
            LinType::Meta(n) => n == m,
            LinType::Lolli(a, b) | LinType::Tensor(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
        }
    }

    fn unify(&mut self, expected: &LinType, found: &LinType, rule: Rule) -> Result<(), TypeError> {
        if self.record {
            self.constraints.push((expected.clone(), found.clone()));
        }
        self.unify_go(expected, found, rule, expected, found)
    }

    fn unify_go(
        &mut self,
        a: &LinType,
        b: &LinType,
        rule: Rule,
        top_a: &LinType,
        top_b: &LinType,
    ) -> Result<(), TypeError> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (LinType::Nat, LinType::Nat) => Ok(()),
            (LinType::Meta(m), LinType::Meta(n)) if m == n => Ok(()),
            (LinType::Meta(m), t) | (t, LinType::Meta(m)) => {
                if self.occurs(*m, t) {
                    return Err(TypeError::Occurs {
                        rule,
                        path: Path(self.path.clone()),
                        meta: LinType::Meta(*m),
                        ty: zonk(&self.sol, t),
                    });
                }
                self.sol[*m as usize] = Some(t.clone());
                Ok(())
            }
            (LinType::Lolli(a1, a2), LinType::Lolli(b1, b2)) | (LinType::Tensor(a1, a2), LinType::Tensor(b1, b2)) => {
                self.unify_go(a1, b1, rule, top_a, top_b)?;
                self.unify_go(a2, b2, rule, top_a, top_b)
            }
            _ => Err(TypeError::Mismatch {
                rule,
                path: Path(self.path.clone()),
                expected: zonk(&self.sol, top_a),
                found: zonk(&self.sol, top_b),
            }),
        }
    }

    fn lookup(&self, x: &Var) -> Option<LinType> {
        self.scope.iter().rev().find(|(y, _)| y == x).map(|(_, a)| a.clone()).or_else(|| self.env.get(x).cloned())
    }

    fn child(&mut self, i: usize, t: &Term) -> Result<LinType, TypeError> {
        self.path.push(i);
        let r = self.infer(t);
        self.path.pop();
        r
    }

    fn child_at(&mut self, i: usize, t: &Term, want: &LinType, rule: Rule) -> Result<(), TypeError> {
        self.path.push(i);
        let r = self.infer(t).and_then(|a| self.unify(want, &a, rule));
        self.path.pop();
        r
    }

    fn infer(&mut self, t: &Term) -> Result<LinType, TypeError> {
        match t.kind() {
            TermKind::Zero => Ok(LinType::Nat),
            TermKind::Suc(_) => {
                // iterate down S-chains so long numerals need no deep recursion
                let mut inner = t;
                let depth0 = self.path.len();
                while let TermKind::Suc(b) = inner.kind() {
                    self.path.push(0);
                    inner = b;
                }
                let r = self.infer(inner).and_then(|a| self.unify(&LinType::Nat, &a, Rule::Succ));
                self.path.truncate(depth0);
                r.map(|_| LinType::Nat)
            }
            TermKind::Var(x) => match self.lookup(x) {
                Some(a) => Ok(a),
                None => Err(TypeError::EnvDomain { missing: vec![x.clone()], unused: Vec::new() }),
            },
            TermKind::Lam(x, b) => {
                let a = self.fresh();
                self.scope.push((x.clone(), a.clone()));
                let r = self.child(0, b);
                self.scope.pop();
                Ok(LinType::lolli(a, r?))
            }
            TermKind::App(f, a) => {
                let tf = self.child(0, f)?;
                let ta = self.child(1, a)?;
                let r = self.fresh();
                self.unify(&LinType::lolli(ta, r.clone()), &tf, Rule::App)?;
                Ok(r)
            }
            TermKind::Pair(a, b) => {
                let ta = self.child(0, a)?;
                let tb = self.child(1, b)?;
                Ok(LinType::tensor(ta, tb))
            }
            TermKind::LetPair(s, x, y, b) => {
                let ts = self.child(0, s)?;
                let (ax, ay) = (self.fresh(), self.fresh());
                self.unify(&LinType::tensor(ax.clone(), ay.clone()), &ts, Rule::Let)?;
                self.scope.push((x.clone(), ax));
                self.scope.push((y.clone(), ay));
                let r = self.child(1, b);
                self.scope.pop();
                self.scope.pop();
                r
            }
            TermKind::Rec(s, u, v, w) => {
                self.child_at(0, s, &LinType::nat_pair(), Rule::Rec)?;
                let a = self.child(1, u)?;
                self.child_at(2, v, &LinType::lolli(a.clone(), a.clone()), Rule::Rec)?;
                self.child_at(3, w, &LinType::lolli(LinType::nat_pair(), LinType::nat_pair()), Rule::Rec)?;
                Ok(a)
            }
            TermKind::Iter(n, u, v) => {
                self.child_at(0, n, &LinType::Nat, Rule::Iter)?;
                let a = self.child(1, u)?;
                self.child_at(2, v, &LinType::lolli(a.clone(), a.clone()), Rule::Iter)?;
                Ok(a)
            }
            TermKind::Min(s, u, f) => {
                self.child_at(0, s, &LinType::Nat, Rule::Min)?;
                self.child_at(1, u, &LinType::Nat, Rule::Min)?;
                self.child_at(2, f, &LinType::lolli(LinType::Nat, LinType::Nat), Rule::Min)?;
                Ok(LinType::Nat)
            }
        }
    }

    fn finish(self, ty: LinType) -> Inference {
        let ty = zonk(&self.sol, &ty);
        Inference { ty, constraints: self.constraints, solution: self.sol }
    }
}

fn domain_check(t: &Term, env: &TypeEnv, weakenable: &BTreeSet<Var>) -> Result<(), TypeError> {
    let fv = t.free_vars();
    let missing: Vec<Var> = fv.iter().filter(|x| env.get(x).is_none()).cloned().collect();
    let unused: Vec<Var> = env.vars().filter(|x| !fv.contains(*x) && !weakenable.contains(*x)).cloned().collect();
    if missing.is_empty() && unused.is_empty() {
        Ok(())
    } else {
        Err(TypeError::EnvDomain { missing, unused })
    }
}

fn calculus_check(calculus: Calculus, t: &Term) -> Result<(), TypeError> {
    match calculus.foreign_construct(t) {
        Some(construct) => Err(TypeError::Foreign { construct, calculus: calculus.name() }),
        None => Ok(()),
    }
}

/// Full inference result, exposing the generated constraints.
pub fn infer_detailed(calculus: Calculus, t: &Term, env: &TypeEnv) -> Result<Inference, TypeError> {
    infer_with(calculus, t, env, true)
}

fn infer_with(calculus: Calculus, t: &Term, env: &TypeEnv, record: bool) -> Result<Inference, TypeError> {
    calculus_check(calculus, t)?;
    check_linear(t).map_err(TypeError::Linearity)?;
    domain_check(t, env, &BTreeSet::new())?;
    let mut e = Engine::new(env);
    e.record = record;
    let ty = e.infer(t)?;
    Ok(e.finish(ty))
}

/// Infers the type of a λ-rec term. Unconstrained parts of the result are
/// unification variables, numbered from 0 in order of occurrence.
pub fn infer(t: &Term, env: &TypeEnv) -> Result<LinType, TypeError> {
    infer_in(Calculus::Lrec, t, env)
}

pub fn infer_in(calculus: Calculus, t: &Term, env: &TypeEnv) -> Result<LinType, TypeError> {
    infer_with(calculus, t, env, false).map(|i| i.ty.canonical())
}

/// Checks a λ-rec term against `expected`, returning the instantiated type.
pub fn check(t: &Term, env: &TypeEnv, expected: &LinType) -> Result<LinType, TypeError> {
    check_in(Calculus::Lrec, t, env, expected)
}

pub fn check_in(calculus: Calculus, t: &Term, env: &TypeEnv, expected: &LinType) -> Result<LinType, TypeError> {
    calculus_check(calculus, t)?;
    check_linear(t).map_err(TypeError::Linearity)?;
    domain_check(t, env, &BTreeSet::new())?;
    let mut e = Engine::new(env);
    let ty = e.infer(t)?;
    let found = e.finish(ty).ty;
    // unification variables in `expected` are rigid: the principal type
    // must specialise to it
    let mut rigid = Vec::new();
    for (_, a) in env.iter() {
        a.metas(&mut rigid);
    }
    let mut binding = BTreeMap::new();
    if instance_of(&found, expected, &rigid, &mut binding) {
        Ok(expected.canonical())
    } else {
        Err(TypeError::Mismatch { rule: Rule::Check, path: Path::root(), expected: expected.clone(), found: found.canonical() })
    }
}

fn instance_of(general: &LinType, specific: &LinType, rigid: &[u32], binding: &mut BTreeMap<u32, LinType>) -> bool {
    match (general, specific) {
        (LinType::Meta(m), _) if !rigid.contains(m) => match binding.get(m) {
            Some(b) => b == specific,
            None => {
                binding.insert(*m, specific.clone());
                true
            }
        },
        (LinType::Nat, LinType::Nat) => true,
        (LinType::Meta(a), LinType::Meta(b)) => a == b,
        (LinType::Lolli(a, b), LinType::Lolli(c, d)) | (LinType::Tensor(a, b), LinType::Tensor(c, d)) => {
            instance_of(a, c, rigid, binding) && instance_of(b, d, rigid, binding)
        }
        _ => false,
    }
}

/// The relaxed judgement: variables in `x_set` may be dropped or used more
/// than once; everything else is linear.
pub fn check_nonlinear(t: &Term, env: &TypeEnv, x_set: &BTreeSet<Var>) -> Result<LinType, TypeError> {
    calculus_check(Calculus::Lrec, t)?;
    domain_check(t, env, x_set)?;
    if let Err(vs) = check_linear(t) {
        for v in vs {
            let excused = matches!(
                v.constraint,
                Constraint::SharedInApp | Constraint::SharedInPair | Constraint::SharedInArgs(..) | Constraint::SharedInLet
            ) && v.vars.iter().all(|x| x_set.contains(x) && env.get(x).is_some());
            if !excused {
                let var = v.vars.iter().find(|x| !x_set.contains(*x)).or(v.vars.first()).cloned();
                return Err(match var {
                    Some(var) => TypeError::NonLinear { var, path: v.path, constraint: v.constraint },
                    None => TypeError::Linearity(vec![v]),
                });
            }
        }
    }
    let mut e = Engine::new(env);
    let ty = e.infer(t)?;
    Ok(e.finish(ty).ty.canonical())
}

/// Renders a type with unification variables, or with them replaced by `Nat`.
pub fn show_type(t: &LinType, ground: bool) -> String {
    use alloc::string::ToString;
    if ground {
        t.ground().to_string()
    } else {
        t.canonical().to_string()
    }
}
