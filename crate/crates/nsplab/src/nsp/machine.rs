//! Meta-terms and their head reduction.
//!
//! The machine works on closures over persistent environments, so a
//! substitution `E[x⃗ ↦ Q⃗]` is never performed syntactically. Pending case
//! frames form the continuation; when the head becomes a free variable the
//! continuation is captured as the branch rule of the resulting case node
//! (the case-of-case rule).

use std::sync::Arc;

use num_bigint::BigUint;

use super::{Branches, CaseNode, Expr, NVar, Procedure, DEFAULT_STEPS};
use crate::error::{Error, Result};
use crate::types::Type;

/// Meta-terms. `Fix(r, T)` denotes the infinite unfolding `T[r ↦ T[r ↦ …]]`.
pub enum MetaTerm {
    Var(NVar),
    Lam(NVar, Arc<MetaTerm>),
    App(Arc<MetaTerm>, Arc<MetaTerm>),
    Num(BigUint),
    Bot,
    Case(Arc<MetaTerm>, MetaBranches),
    Proc(Procedure),
    Fix(NVar, Arc<MetaTerm>),
}

type Meta = Arc<MetaTerm>;

/// Branches of a meta-level case, as a rule from index to meta-term.
#[derive(Clone)]
pub struct MetaBranches(Arc<dyn Fn(&BigUint) -> Meta + Send + Sync>);

impl MetaBranches {
    pub fn new(f: impl Fn(&BigUint) -> Meta + Send + Sync + 'static) -> MetaBranches {
        MetaBranches(Arc::new(f))
    }

    pub fn get(&self, i: &BigUint) -> Meta {
        (self.0)(i)
    }
}

impl MetaTerm {
    pub fn ty(&self) -> Type {
        match self {
            MetaTerm::Var(x) | MetaTerm::Fix(x, _) => x.ty.clone(),
            MetaTerm::Lam(x, b) => Type::arrow(x.ty.clone(), b.ty()),
            MetaTerm::App(f, _) => match f.ty() {
                Type::Arrow(_, r) => (*r).clone(),
                t => panic!("applying a term of type {t}"),
            },
            MetaTerm::Num(_) | MetaTerm::Bot | MetaTerm::Case(..) => Type::Nat,
            MetaTerm::Proc(p) => p.ty().clone(),
        }
    }
}

/// Constructors for meta-terms.
pub mod meta {
    use super::*;

    pub fn var(x: &NVar) -> Arc<MetaTerm> {
        Arc::new(MetaTerm::Var(x.clone()))
    }

    pub fn lam(x: &NVar, body: Arc<MetaTerm>) -> Arc<MetaTerm> {
        Arc::new(MetaTerm::Lam(x.clone(), body))
    }

    pub fn lams(xs: &[NVar], body: Arc<MetaTerm>) -> Arc<MetaTerm> {
        xs.iter().rev().fold(body, |b, x| lam(x, b))
    }

    pub fn app(f: Arc<MetaTerm>, a: Arc<MetaTerm>) -> Arc<MetaTerm> {
        Arc::new(MetaTerm::App(f, a))
    }

    pub fn apps(f: Arc<MetaTerm>, args: impl IntoIterator<Item = Arc<MetaTerm>>) -> Arc<MetaTerm> {
        args.into_iter().fold(f, app)
    }

    pub fn num(n: impl Into<BigUint>) -> Arc<MetaTerm> {
        Arc::new(MetaTerm::Num(n.into()))
    }

    pub fn bot() -> Arc<MetaTerm> {
        Arc::new(MetaTerm::Bot)
    }

    pub fn case(s: Arc<MetaTerm>, f: impl Fn(&BigUint) -> Arc<MetaTerm> + Send + Sync + 'static) -> Arc<MetaTerm> {
        Arc::new(MetaTerm::Case(s, MetaBranches::new(f)))
    }

    pub fn proc(p: &Procedure) -> Arc<MetaTerm> {
        Arc::new(MetaTerm::Proc(p.clone()))
    }

    pub fn fix(r: &NVar, body: Arc<MetaTerm>) -> Arc<MetaTerm> {
        Arc::new(MetaTerm::Fix(r.clone(), body))
    }
}

#[derive(Clone)]
pub(crate) enum Val {
    Code(Meta, Env),
    Neutral(NVar),
    Proc(Procedure, Env),
}

#[derive(Clone, Default)]
pub(crate) struct Env(Option<Arc<EnvNode>>);

pub(crate) struct EnvNode {
    id: u64,
    val: Val,
    next: Env,
}

impl Val {
    fn take_env(&mut self) -> Option<Arc<EnvNode>> {
        match self {
            Val::Code(_, env) | Val::Proc(_, env) => env.0.take(),
            Val::Neutral(_) => None,
        }
    }
}

impl Drop for EnvNode {
    // Thunks hold environments that hold thunks; unlinking iteratively keeps
    // long loops from overflowing the stack on drop.
    fn drop(&mut self) {
        let mut work: Vec<Arc<EnvNode>> = self.next.0.take().into_iter().chain(self.val.take_env()).collect();
        while let Some(node) = work.pop() {
            if let Ok(mut n) = Arc::try_unwrap(node) {
                work.extend(n.next.0.take());
                work.extend(n.val.take_env());
            }
        }
    }
}

impl Env {
    pub(crate) fn bind(&self, x: &NVar, val: Val) -> Env {
        Env(Some(Arc::new(EnvNode { id: x.id, val, next: self.clone() })))
    }

    fn lookup(&self, x: &NVar) -> Val {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.id == x.id {
                return node.val.clone();
            }
            cur = &node.next.0;
        }
        Val::Neutral(x.clone())
    }

    fn is_empty(&self) -> bool {
        self.0.is_none()
    }
}

#[derive(Clone)]
enum Pending {
    Meta(MetaBranches),
    Tree(Arc<CaseNode>),
}

#[derive(Clone, Default)]
struct Kont(Option<Arc<Frame>>);

struct Frame {
    branches: Pending,
    env: Env,
    next: Kont,
}

impl Drop for Frame {
    fn drop(&mut self) {
        let mut next = self.next.0.take();
        while let Some(node) = next {
            match Arc::try_unwrap(node) {
                Ok(mut n) => next = n.next.0.take(),
                Err(_) => break,
            }
        }
    }
}

impl Kont {
    fn push(&self, branches: Pending, env: Env) -> Kont {
        Kont(Some(Arc::new(Frame { branches, env, next: self.clone() })))
    }

    fn pop(&self) -> Option<(Pending, Env, Kont)> {
        self.0.as_ref().map(|f| (f.branches.clone(), f.env.clone(), f.next.clone()))
    }

    fn is_empty(&self) -> bool {
        self.0.is_none()
    }
}

enum Focus {
    Meta(Meta, Env),
    Val(Val),
    Expr(Expr, Env),
    Num(BigUint),
}

/// Head-reduces until a numeral reaches an empty continuation, `⊥` is
/// met, a free variable reaches the head, or the budget runs out.
/// `stack` holds pending arguments with the next one on top.
fn run(mut focus: Focus, mut stack: Vec<Val>, mut kont: Kont, budget: u64) -> Expr {
    let mut steps = 0u64;
    loop {
        if steps > budget {
            return Expr::Unresolved;
        }
        focus = match focus {
            Focus::Meta(m, env) => match &*m {
                MetaTerm::Var(x) => Focus::Val(env.lookup(x)),
                MetaTerm::Lam(x, b) => {
                    let Some(a) = stack.pop() else {
                        return Expr::Unresolved;
                    };
                    steps += 1;
                    Focus::Meta(b.clone(), env.bind(x, a))
                }
                MetaTerm::App(f, a) => {
                    // A variable argument is looked up now; wrapping it would
                    // grow a chain of indirections through every loop iteration.
                    let arg = match &**a {
                        MetaTerm::Var(x) => env.lookup(x),
                        _ => Val::Code(a.clone(), env.clone()),
                    };
                    stack.push(arg);
                    Focus::Meta(f.clone(), env)
                }
                MetaTerm::Num(n) => Focus::Num(n.clone()),
                MetaTerm::Bot => return Expr::Bot,
                MetaTerm::Case(s, br) => {
                    kont = kont.push(Pending::Meta(br.clone()), env.clone());
                    Focus::Meta(s.clone(), env)
                }
                MetaTerm::Fix(r, b) => {
                    steps += 1;
                    let me = Val::Code(m.clone(), env.clone());
                    Focus::Meta(b.clone(), env.bind(r, me))
                }
                MetaTerm::Proc(p) => Focus::Val(Val::Proc(p.clone(), env)),
            },
            Focus::Val(v) => match v {
                Val::Code(m, env) => Focus::Meta(m, env),
                Val::Neutral(x) => return neutral(x, stack, kont, budget),
                Val::Proc(p, mut env) => {
                    if stack.len() < p.arity() {
                        return Expr::Unresolved;
                    }
                    for x in p.params() {
                        env = env.bind(x, stack.pop().expect("checked"));
                    }
                    steps += 1;
                    Focus::Expr(p.body().clone(), env)
                }
            },
            Focus::Expr(e, env) => match e {
                Expr::Bot => return Expr::Bot,
                Expr::Unresolved => return Expr::Unresolved,
                Expr::Num(n) => Focus::Num(n),
                Expr::Case(node) => {
                    for q in node.args.iter().rev() {
                        stack.push(Val::Proc(q.clone(), env.clone()));
                    }
                    let h = env.lookup(&node.head);
                    kont = kont.push(Pending::Tree(node), env);
                    Focus::Val(h)
                }
            },
            Focus::Num(n) => match kont.pop() {
                None => return Expr::Num(n),
                Some((pending, env, rest)) => {
                    kont = rest;
                    steps += 1;
                    match pending {
                        Pending::Meta(br) => Focus::Meta(br.get(&n), env),
                        Pending::Tree(node) => Focus::Expr(node.branch(&n), env),
                    }
                }
            },
        }
    }
}

fn neutral(x: NVar, mut stack: Vec<Val>, kont: Kont, budget: u64) -> Expr {
    let (doms, _) = x.ty.uncurry();
    if stack.len() != doms.len() {
        return Expr::Unresolved;
    }
    let args: Vec<Procedure> = doms.into_iter().map(|d| from_val(stack.pop().expect("checked"), Vec::new(), d, budget)).collect();
    let bare = kont.is_empty();
    let branches = if bare {
        Branches::identity()
    } else {
        Branches::from_fn(move |i| run(Focus::Num(i.clone()), Vec::new(), kont.clone(), budget))
    };
    Expr::Case(Arc::new(CaseNode { head: x, args, branches, bare }))
}

/// The normal form of `head pre⃗` at type `ty`, computed lazily.
pub(crate) fn from_val(head: Val, pre: Vec<Val>, ty: Type, budget: u64) -> Procedure {
    if pre.is_empty() {
        match &head {
            Val::Proc(p, env) if env.is_empty() => return p.clone(),
            _ => {}
        }
    }
    let params: Vec<NVar> = ty.uncurry().0.into_iter().map(NVar::fresh).collect();
    let ps = params.clone();
    Procedure::lazy(ty, params, move || {
        let mut stack: Vec<Val> = ps.iter().rev().map(|z| Val::Neutral(z.clone())).collect();
        stack.extend(pre.into_iter().rev());
        run(Focus::Val(head), stack, Kont::default(), budget)
    })
}

/// Head-reduces a closed-or-open meta-term of type `nat`. Exhaustion is
/// reported as [`Expr::Unresolved`]; a head `y Q⃗` with nothing pending is a
/// case node flagged `bare`.
pub fn head_reduce(t: &Arc<MetaTerm>, budget: u64) -> Expr {
    assert!(t.ty().is_nat(), "head reduction applies to meta-terms of type nat");
    run(Focus::Meta(t.clone(), Env::default()), Vec::new(), Kont::default(), budget)
}

/// The normal form of a meta-term, produced on demand.
pub fn normalize(t: &Arc<MetaTerm>, budget: u64) -> Procedure {
    from_val(Val::Code(t.clone(), Env::default()), Vec::new(), t.ty(), budget)
}

/// `p · q` with the default step budget.
pub fn apply(p: &Procedure, q: &Procedure) -> Result<Procedure> {
    apply_budget(p, &[q.clone()], DEFAULT_STEPS)
}

/// `p · q₁ · … · qₙ` with the default step budget.
pub fn apply_all(p: &Procedure, qs: &[Procedure]) -> Result<Procedure> {
    apply_budget(p, qs, DEFAULT_STEPS)
}

/// `p · q₁ · … · qₙ`, each node computed within `budget` steps.
pub fn apply_budget(p: &Procedure, qs: &[Procedure], budget: u64) -> Result<Procedure> {
    let mut ty = p.ty().clone();
    for q in qs {
        match ty {
            Type::Arrow(a, r) if *a == *q.ty() => ty = (*r).clone(),
            _ => {
                return Err(Error::Type {
                    msg: format!("cannot apply a procedure of type {} to one of type {}", p.ty(), q.ty()),
                    subterm: "application".into(),
                })
            }
        }
    }
    let cert = if qs.iter().all(|q| q.lwf_certificate().is_some()) { p.certificate_arc() } else { None };
    let pre = qs.iter().map(|q| Val::Proc(q.clone(), Env::default())).collect();
    Ok(from_val(Val::Proc(p.clone(), Env::default()), pre, ty, budget).set_certificate(cert))
}

/// Instantiates free variables of `p` by procedures and normalizes.
pub fn instantiate(p: &Procedure, bindings: &[(NVar, Procedure)], budget: u64) -> Procedure {
    let mut env = Env::default();
    for (x, q) in bindings {
        assert_eq!(x.ty, *q.ty(), "instantiation type");
        env = env.bind(x, Val::Proc(q.clone(), Env::default()));
    }
    from_val(Val::Proc(p.clone(), env), Vec::new(), p.ty().clone(), budget)
}
