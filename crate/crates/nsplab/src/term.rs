//! Typed terms shared by every language variant.
//!
//! Terms are immutable and reference counted. Each node caches its type and
//! its sorted set of free variables, so substitution only rebuilds the paths
//! that actually contain the substituted variable.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::types::Type;

/// A variable; its type is part of its identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Arc<str>,
    pub ty: Type,
}

impl Var {
    pub fn new(name: &str, ty: Type) -> Var {
        Var { name: Arc::from(name), ty }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.ty)
    }
}

/// Arithmetic and sequence-coding constants with native reduction rules.
/// Each also has a definition as a genuine program (see `library`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum LibFn {
    Plus,
    Monus,
    Times,
    /// `neq a b` is 0 when `a ≠ b` and 1 otherwise (0 plays the role of true).
    Neq,
    /// `lt a b` is 0 when `a < b` and 1 otherwise.
    Lt,
    /// `add s z` is the code of `s` extended by `z`.
    Add,
    Len,
    /// `basic s j i` is the `i`-th entry of `s`, or `j` past its end.
    Basic,
}

impl LibFn {
    pub const ALL: [LibFn; 8] = [
        LibFn::Plus,
        LibFn::Monus,
        LibFn::Times,
        LibFn::Neq,
        LibFn::Lt,
        LibFn::Add,
        LibFn::Len,
        LibFn::Basic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LibFn::Plus => "plus",
            LibFn::Monus => "monus",
            LibFn::Times => "times",
            LibFn::Neq => "neq",
            LibFn::Lt => "lt",
            LibFn::Add => "add",
            LibFn::Len => "len",
            LibFn::Basic => "basic",
        }
    }

    pub fn from_name(s: &str) -> Option<LibFn> {
        LibFn::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            LibFn::Len => 1,
            LibFn::Basic => 3,
            _ => 2,
        }
    }

    pub fn ty(self) -> Type {
        Type::arrows(vec![Type::Nat; self.arity()], Type::Nat)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Const {
    Suc,
    Pre,
    /// `ifzero_σ : nat → σ → σ → σ`; the plain `ifzero` is `ifzero_nat`.
    Ifzero(Type),
    Y(Type),
    While(Type),
    Rec(Type),
    Min,
    /// `byval^{σ⃗}_τ : (σ⃗ → nat → τ) → σ⃗ → nat → τ`.
    Byval(Vec<Type>, Type),
    RecStr(Type),
    WhileStr(Type),
    Lib(LibFn),
}

impl Const {
    pub fn ifzero() -> Const {
        Const::Ifzero(Type::Nat)
    }

    /// `byval^ε_nat`.
    pub fn byval_nat() -> Const {
        Const::Byval(Vec::new(), Type::Nat)
    }

    pub fn ty(&self) -> Type {
        let nat = || Type::Nat;
        match self {
            Const::Suc | Const::Pre => Type::arrow(nat(), nat()),
            Const::Ifzero(s) => Type::arrows([nat(), s.clone(), s.clone()], s.clone()),
            Const::Y(s) => Type::arrow(Type::arrow(s.clone(), s.clone()), s.clone()),
            Const::While(s) | Const::WhileStr(s) => Type::arrows(
                [
                    Type::arrow(s.clone(), nat()),
                    s.clone(),
                    Type::arrow(s.clone(), s.clone()),
                ],
                s.clone(),
            ),
            Const::Rec(s) | Const::RecStr(s) => Type::arrows(
                [
                    s.clone(),
                    Type::arrows([s.clone(), nat()], s.clone()),
                    nat(),
                ],
                s.clone(),
            ),
            Const::Min => Type::arrows([Type::arrow(nat(), nat()), nat()], nat()),
            Const::Byval(ss, t) => {
                let mut doms = ss.clone();
                doms.push(nat());
                let f = Type::arrows(doms.clone(), t.clone());
                let mut all = vec![f];
                all.extend(doms);
                Type::arrows(all, t.clone())
            }
            Const::Lib(f) => f.ty(),
        }
    }

    /// Arguments consumed by this constant's reduction rule.
    pub fn rule_arity(&self) -> usize {
        match self {
            Const::Suc | Const::Pre | Const::Ifzero(_) | Const::Y(_) => 1,
            Const::Min => 2,
            Const::While(_) | Const::WhileStr(_) | Const::Rec(_) | Const::RecStr(_) => 3,
            Const::Byval(ss, _) => ss.len() + 2,
            Const::Lib(f) => f.arity(),
        }
    }

    /// Type parameters, used for level caps and product checks.
    pub fn type_params(&self) -> Vec<Type> {
        match self {
            Const::Suc | Const::Pre | Const::Min | Const::Lib(_) => Vec::new(),
            Const::Ifzero(s)
            | Const::Y(s)
            | Const::While(s)
            | Const::Rec(s)
            | Const::RecStr(s)
            | Const::WhileStr(s) => vec![s.clone()],
            Const::Byval(ss, t) => {
                let mut v = ss.clone();
                v.push(t.clone());
                v
            }
        }
    }
}

#[derive(Clone)]
pub enum TermKind {
    Var(Var),
    Lam(Var, Term),
    App(Term, Term),
    Pair(Term, Term),
    Fst(Term),
    Snd(Term),
    Num(BigUint),
    Const(Const),
}

pub struct Node {
    kind: TermKind,
    ty: Type,
    fv: Arc<[Var]>,
}

#[derive(Clone)]
pub struct Term(Arc<Node>);

fn empty_fv() -> Arc<[Var]> {
    static EMPTY: OnceLock<Arc<[Var]>> = OnceLock::new();
    EMPTY.get_or_init(|| Arc::from(Vec::new())).clone()
}

fn union_fv(a: &Arc<[Var]>, b: &Arc<[Var]>) -> Arc<[Var]> {
    if b.is_empty() || Arc::ptr_eq(a, b) {
        return a.clone();
    }
    if a.is_empty() {
        return b.clone();
    }
    let set: BTreeSet<&Var> = a.iter().chain(b.iter()).collect();
    if set.len() == a.len() {
        return a.clone();
    }
    if set.len() == b.len() {
        return b.clone();
    }
    Arc::from(set.into_iter().cloned().collect::<Vec<_>>())
}

fn take_children(kind: &mut TermKind, out: &mut Vec<Term>) {
    let has_children = matches!(
        kind,
        TermKind::Lam(..) | TermKind::App(..) | TermKind::Pair(..) | TermKind::Fst(_) | TermKind::Snd(_)
    );
    if !has_children {
        return;
    }
    match std::mem::replace(kind, TermKind::Num(BigUint::zero())) {
        TermKind::Lam(_, b) | TermKind::Fst(b) | TermKind::Snd(b) => out.push(b),
        TermKind::App(a, b) | TermKind::Pair(a, b) => {
            out.push(a);
            out.push(b);
        }
        _ => {}
    }
}

// Evaluation can build very deep terms (long chains of pending `suc`), so
// dropping must not recurse.
impl Drop for Node {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        take_children(&mut self.kind, &mut stack);
        while let Some(t) = stack.pop() {
            if let Ok(mut node) = Arc::try_unwrap(t.0) {
                take_children(&mut node.kind, &mut stack);
            }
        }
    }
}

fn type_err(msg: String, t: &Term) -> Error {
    Error::Type { msg, subterm: t.to_string() }
}

impl Term {
    fn mk(kind: TermKind, ty: Type, fv: Arc<[Var]>) -> Term {
        Term(Arc::new(Node { kind, ty, fv }))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    pub fn free_vars(&self) -> &[Var] {
        &self.0.fv
    }

    pub fn is_closed(&self) -> bool {
        self.0.fv.is_empty()
    }

    pub fn has_free(&self, v: &Var) -> bool {
        self.0.fv.binary_search(v).is_ok()
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn var(v: Var) -> Term {
        let ty = v.ty.clone();
        let fv: Arc<[Var]> = Arc::from(vec![v.clone()]);
        Term::mk(TermKind::Var(v), ty, fv)
    }

    pub fn lam(v: Var, body: Term) -> Term {
        let ty = Type::arrow(v.ty.clone(), body.ty().clone());
        let fv = if body.has_free(&v) {
            Arc::from(body.free_vars().iter().filter(|w| **w != v).cloned().collect::<Vec<_>>())
        } else {
            body.0.fv.clone()
        };
        Term::mk(TermKind::Lam(v, body), ty, fv)
    }

    pub fn lams(vs: &[Var], body: Term) -> Term {
        vs.iter().rev().fold(body, |b, v| Term::lam(v.clone(), b))
    }

    pub fn app(f: Term, a: Term) -> Result<Term> {
        let ty = match f.ty().as_arrow() {
            Some((dom, cod)) if dom == a.ty() => cod.clone(),
            Some((dom, _)) => {
                return Err(type_err(
                    format!("argument has type {} but function expects {}", a.ty(), dom),
                    &Term::mk(TermKind::App(f.clone(), a.clone()), Type::Nat, empty_fv()),
                ))
            }
            None => {
                return Err(type_err(format!("applying a term of non-function type {}", f.ty()), &f))
            }
        };
        let fv = union_fv(&f.0.fv, &a.0.fv);
        Ok(Term::mk(TermKind::App(f, a), ty, fv))
    }

    /// Application without a type check, for callers that already know the
    /// result is well typed (reduction contexts, translations).
    pub(crate) fn app_unchecked(f: Term, a: Term) -> Term {
        let ty = f.ty().as_arrow().map(|(_, c)| c.clone()).expect("function type");
        let fv = union_fv(&f.0.fv, &a.0.fv);
        Term::mk(TermKind::App(f, a), ty, fv)
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Result<Term> {
        args.into_iter().try_fold(f, Term::app)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        let ty = Type::product(a.ty().clone(), b.ty().clone());
        let fv = union_fv(&a.0.fv, &b.0.fv);
        Term::mk(TermKind::Pair(a, b), ty, fv)
    }

    pub fn fst(p: Term) -> Result<Term> {
        match p.ty().as_product() {
            Some((l, _)) => {
                let (ty, fv) = (l.clone(), p.0.fv.clone());
                Ok(Term::mk(TermKind::Fst(p), ty, fv))
            }
            None => Err(type_err(format!("fst of non-product type {}", p.ty()), &p)),
        }
    }

    pub fn snd(p: Term) -> Result<Term> {
        match p.ty().as_product() {
            Some((_, r)) => {
                let (ty, fv) = (r.clone(), p.0.fv.clone());
                Ok(Term::mk(TermKind::Snd(p), ty, fv))
            }
            None => Err(type_err(format!("snd of non-product type {}", p.ty()), &p)),
        }
    }

    pub fn num(n: impl Into<BigUint>) -> Term {
        Term::mk(TermKind::Num(n.into()), Type::Nat, empty_fv())
    }

    pub fn constant(c: Const) -> Term {
        let ty = c.ty();
        Term::mk(TermKind::Const(c), ty, empty_fv())
    }

    pub fn as_num(&self) -> Option<&BigUint> {
        match self.kind() {
            TermKind::Num(n) => Some(n),
            _ => None,
        }
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let TermKind::App(f, a) = t.kind() {
            args.push(a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// Every subterm has a product-free type and no constant mentions a product.
    pub fn is_product_free(&self) -> bool {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if !t.ty().is_product_free() {
                return false;
            }
            match t.kind() {
                TermKind::Var(v) => {
                    if !v.ty.is_product_free() {
                        return false;
                    }
                }
                TermKind::Lam(v, b) => {
                    if !v.ty.is_product_free() {
                        return false;
                    }
                    stack.push(b);
                }
                TermKind::App(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                TermKind::Pair(..) | TermKind::Fst(_) | TermKind::Snd(_) => return false,
                TermKind::Num(_) => {}
                TermKind::Const(c) => {
                    if !c.type_params().iter().all(Type::is_product_free) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            n += 1;
            match t.kind() {
                TermKind::Lam(_, b) | TermKind::Fst(b) | TermKind::Snd(b) => stack.push(b),
                TermKind::App(a, b) | TermKind::Pair(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                _ => {}
            }
        }
        n
    }

    /// Visits every subterm (pre-order, iterative).
    pub fn for_each_subterm(&self, mut f: impl FnMut(&Term)) {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            f(t);
            match t.kind() {
                TermKind::Lam(_, b) | TermKind::Fst(b) | TermKind::Snd(b) => stack.push(b),
                TermKind::App(a, b) | TermKind::Pair(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                _ => {}
            }
        }
    }

    /// Replaces constants by closed terms of the same type.
    pub fn map_consts(&self, f: &dyn Fn(&Const) -> Option<Term>) -> Term {
        match self.kind() {
            TermKind::Const(k) => match f(k) {
                Some(r) => {
                    debug_assert_eq!(r.ty(), self.ty());
                    r
                }
                None => self.clone(),
            },
            TermKind::Var(_) | TermKind::Num(_) => self.clone(),
            TermKind::Lam(x, b) => Term::lam(x.clone(), b.map_consts(f)),
            TermKind::App(a, b) => ap(&a.map_consts(f), &b.map_consts(f)),
            TermKind::Pair(a, b) => Term::pair(a.map_consts(f), b.map_consts(f)),
            TermKind::Fst(p) => Term::fst(p.map_consts(f)).expect("typed"),
            TermKind::Snd(p) => Term::snd(p.map_consts(f)).expect("typed"),
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

/// Builds `f a` for statically known well-typed programs.
///
/// Panics on a type error; only used for fixed program templates.
pub fn ap(f: &Term, a: &Term) -> Term {
    Term::app(f.clone(), a.clone()).unwrap_or_else(|e| panic!("ill-typed template: {e}"))
}

/// `f a₁ … aₙ`, see [`ap`].
pub fn aps(f: &Term, args: &[Term]) -> Term {
    args.iter().fold(f.clone(), |acc, a| ap(&acc, a))
}

pub fn var(name: &str, ty: Type) -> Var {
    Var::new(name, ty)
}

pub fn v(x: &Var) -> Term {
    Term::var(x.clone())
}

pub fn c(k: Const) -> Term {
    Term::constant(k)
}

pub fn n(k: u64) -> Term {
    Term::num(k)
}

fn alpha<'a>(a: &'a Term, b: &'a Term, ea: &mut Vec<&'a Var>, eb: &mut Vec<&'a Var>) -> bool {
    if a.ptr_eq(b) && ea.is_empty() && eb.is_empty() {
        return true;
    }
    match (a.kind(), b.kind()) {
        (TermKind::Var(x), TermKind::Var(y)) => {
            let ix = ea.iter().rposition(|w| *w == x);
            let iy = eb.iter().rposition(|w| *w == y);
            match (ix, iy) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (TermKind::Lam(x, m), TermKind::Lam(y, n)) => {
            if x.ty != y.ty {
                return false;
            }
            ea.push(x);
            eb.push(y);
            let r = alpha(m, n, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (TermKind::App(f, x), TermKind::App(g, y)) | (TermKind::Pair(f, x), TermKind::Pair(g, y)) => {
            alpha(f, g, ea, eb) && alpha(x, y, ea, eb)
        }
        (TermKind::Fst(x), TermKind::Fst(y)) | (TermKind::Snd(x), TermKind::Snd(y)) => alpha(x, y, ea, eb),
        (TermKind::Num(x), TermKind::Num(y)) => x == y,
        (TermKind::Const(x), TermKind::Const(y)) => x == y,
        _ => false,
    }
}

/// A name based on `base` that is not in `avoid`: `y`, `y'`, `y''`, …
pub fn fresh_name(base: &str, avoid: &dyn Fn(&str) -> bool) -> Arc<str> {
    let mut s = base.to_string();
    while avoid(&s) {
        s.push('\'');
    }
    Arc::from(s)
}

/// Capture-avoiding `body[x ↦ n]`.
pub fn substitute(body: &Term, x: &Var, n: &Term) -> Result<Term> {
    if n.ty() != &x.ty {
        return Err(type_err(
            format!("substituting a term of type {} for {:?}", n.ty(), x),
            n,
        ));
    }
    Ok(subst(body, x, n))
}

pub(crate) fn subst(t: &Term, x: &Var, n: &Term) -> Term {
    if !t.has_free(x) {
        return t.clone();
    }
    match t.kind() {
        TermKind::Var(_) => n.clone(),
        TermKind::Lam(y, b) => {
            let clash = n.free_vars().iter().any(|w| w.name == y.name);
            if clash {
                let name = fresh_name(&y.name, &|s| {
                    n.free_vars().iter().any(|w| &*w.name == s)
                        || b.free_vars().iter().any(|w| &*w.name == s)
                        || &*x.name == s
                });
                let y2 = Var { name, ty: y.ty.clone() };
                let b2 = subst(b, y, &Term::var(y2.clone()));
                Term::lam(y2, subst(&b2, x, n))
            } else {
                Term::lam(y.clone(), subst(b, x, n))
            }
        }
        TermKind::App(f, a) => {
            let f2 = subst(f, x, n);
            let a2 = subst(a, x, n);
            let fv = union_fv(&f2.0.fv, &a2.0.fv);
            Term::mk(TermKind::App(f2, a2), t.ty().clone(), fv)
        }
        TermKind::Pair(a, b) => Term::pair(subst(a, x, n), subst(b, x, n)),
        TermKind::Fst(p) => {
            let p2 = subst(p, x, n);
            let fv = p2.0.fv.clone();
            Term::mk(TermKind::Fst(p2), t.ty().clone(), fv)
        }
        TermKind::Snd(p) => {
            let p2 = subst(p, x, n);
            let fv = p2.0.fv.clone();
            Term::mk(TermKind::Snd(p2), t.ty().clone(), fv)
        }
        TermKind::Num(_) | TermKind::Const(_) => t.clone(),
    }
}

/// Simultaneous substitution of closed terms; used by translations of open terms.
pub fn substitute_closed(t: &Term, map: &[(Var, Term)]) -> Term {
    map.iter().fold(t.clone(), |acc, (x, n)| subst(&acc, x, n))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// β-normal, fully η-expanded form of a product-free term.
pub fn long_beta_eta_normal_form(m: &Term) -> Result<Term> {
    if !m.is_product_free() {
        return Err(Error::ProductType(m.to_string()));
    }
    let nf = beta_normal(m);
    Ok(eta_long(&nf, &mut Vec::new()))
}

fn beta_normal(t: &Term) -> Term {
    // Normal order; simply typed terms are strongly normalizing for β.
    let mut cur = t.clone();
    loop {
        match beta_step(&cur) {
            Some(next) => cur = next,
            None => return cur,
        }
    }
}

fn beta_step(t: &Term) -> Option<Term> {
    match t.kind() {
        TermKind::App(f, a) => {
            if let TermKind::Lam(x, b) = f.kind() {
                return Some(subst(b, x, a));
            }
            if let Some(f2) = beta_step(f) {
                return Some(ap(&f2, a));
            }
            beta_step(a).map(|a2| ap(f, &a2))
        }
        TermKind::Lam(x, b) => beta_step(b).map(|b2| Term::lam(x.clone(), b2)),
        _ => None,
    }
}

fn eta_long(t: &Term, scope: &mut Vec<Arc<str>>) -> Term {
    match t.kind() {
        TermKind::Lam(x, b) => {
            scope.push(x.name.clone());
            let r = Term::lam(x.clone(), eta_long(b, scope));
            scope.pop();
            r
        }
        _ => {
            let (head, args) = t.spine();
            let args: Vec<Term> = args.into_iter().map(|a| eta_long(a, scope)).collect();
            let (extra, _) = t.ty().uncurry();
            let mut fresh = Vec::new();
            for (i, ty) in extra.iter().enumerate() {
                let taken = |s: &str| {
                    scope.iter().any(|w| &**w == s)
                        || t.free_vars().iter().any(|w| &*w.name == s)
                        || fresh.iter().any(|w: &Var| &*w.name == s)
                };
                let name = fresh_name(if i == 0 { "y" } else { "z" }, &taken);
                fresh.push(Var { name, ty: ty.clone() });
            }
            for w in &fresh {
                scope.push(w.name.clone());
            }
            let mut all = args;
            for w in &fresh {
                all.push(eta_long(&Term::var(w.clone()), scope));
            }
            for _ in &fresh {
                scope.pop();
            }
            Term::lams(&fresh, aps(head, &all))
        }
    }
}
