//! Nested sequential procedures.
//!
//! A procedure `λx⃗. e` is a decision tree whose inner nodes interrogate a
//! bound variable, `case x q⃗ of (i ⇒ eᵢ)`. Trees are usually infinite, so
//! they are built on demand: a procedure body is computed the first time it
//! is read and every branch is computed (and memoized) the first time it is
//! forced. Head reduction of meta-terms, which produces these nodes, runs
//! under an explicit step budget; running out yields [`Expr::Unresolved`],
//! which is kept distinct from a proven [`Expr::Bot`].

mod denote;
mod machine;
mod oracle;
mod order;
mod print;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Type;

pub use denote::{const_meta, denote, denote_open, lwf_language};
pub use machine::{
    apply, apply_all, apply_budget, head_reduce, instantiate, meta, normalize, MetaBranches, MetaTerm,
};
pub use oracle::{call_type1, call_type2, eval_with, HostVal};
pub use order::{extensional_leq_on_grid, lwf_probe, syntactic_leq, LwfReport, LwfVerdict, Tri};
pub use print::{expr_to_json, pretty, pretty_expr, to_json};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// A procedure variable. Identity is the numeric id; the hint only affects printing.
#[derive(Clone)]
pub struct NVar {
    pub id: u64,
    pub ty: Type,
    pub hint: Option<Arc<str>>,
}

impl NVar {
    pub fn fresh(ty: Type) -> NVar {
        NVar { id: NEXT_ID.fetch_add(1, Ordering::Relaxed), ty, hint: None }
    }

    pub fn named(name: &str, ty: Type) -> NVar {
        NVar { hint: Some(Arc::from(name)), ..NVar::fresh(ty) }
    }
}

impl PartialEq for NVar {
    fn eq(&self, other: &NVar) -> bool {
        self.id == other.id
    }
}

impl Eq for NVar {}

impl std::hash::Hash for NVar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.id.hash(state)
    }
}

impl fmt::Debug for NVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.hint {
            Some(h) => write!(f, "{h}#{}", self.id),
            None => write!(f, "v#{}", self.id),
        }
    }
}

/// Finite windows onto infinite trees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationBudget {
    /// Head-reduction steps allowed when computing one node.
    pub steps: u64,
    /// Maximum tree depth explored.
    pub depth: usize,
    /// Branch indices `0..branches` forced at each case node.
    pub branches: usize,
}

impl Default for ExplorationBudget {
    fn default() -> ExplorationBudget {
        ExplorationBudget { steps: DEFAULT_STEPS, depth: 32, branches: 64 }
    }
}

impl ExplorationBudget {
    pub fn new(steps: u64, depth: usize, branches: usize) -> Result<ExplorationBudget> {
        if steps == 0 || depth == 0 || branches == 0 {
            return Err(Error::Usage("exploration budget fields must be positive".into()));
        }
        Ok(ExplorationBudget { steps, depth, branches })
    }
}

pub const DEFAULT_STEPS: u64 = 1_000_000;

/// An expression of a procedure body.
#[derive(Clone)]
pub enum Expr {
    Bot,
    /// Head reduction ran out of budget; not known to be `⊥`.
    Unresolved,
    Num(BigUint),
    Case(Arc<CaseNode>),
}

impl Expr {
    pub fn num(n: impl Into<BigUint>) -> Expr {
        Expr::Num(n.into())
    }

    pub fn case(head: &NVar, args: Vec<Procedure>, branches: Branches) -> Expr {
        Expr::Case(Arc::new(CaseNode { head: head.clone(), args, branches, bare: false }))
    }

    /// `x q⃗` standing for `case x q⃗ of (i ⇒ i)`.
    pub fn bare(head: &NVar, args: Vec<Procedure>) -> Expr {
        Expr::Case(Arc::new(CaseNode { head: head.clone(), args, branches: Branches::identity(), bare: true }))
    }

    pub fn as_num(&self) -> Option<&BigUint> {
        match self {
            Expr::Num(n) => Some(n),
            _ => None,
        }
    }

    /// Same node, compared by identity for case nodes.
    pub fn same(&self, other: &Expr) -> bool {
        match (self, other) {
            (Expr::Bot, Expr::Bot) | (Expr::Unresolved, Expr::Unresolved) => true,
            (Expr::Num(a), Expr::Num(b)) => a == b,
            (Expr::Case(a), Expr::Case(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_expr(self, 3, 4))
    }
}

/// `case head args of (i ⇒ branches(i))`.
pub struct CaseNode {
    pub head: NVar,
    pub args: Vec<Procedure>,
    pub branches: Branches,
    /// The branches are the identity and the node may print as a bare application.
    pub bare: bool,
}

impl CaseNode {
    pub fn branch(&self, i: &BigUint) -> Expr {
        self.branches.get(i)
    }
}

type Rule = Arc<dyn Fn(&BigUint) -> Expr + Send + Sync>;

/// A total map from indices to expressions: an explicit table backed by a
/// default rule whose results are memoized.
pub struct Branches {
    table: BTreeMap<BigUint, Expr>,
    rule: Rule,
    memo: Mutex<HashMap<BigUint, Expr>>,
}

impl Branches {
    pub fn from_fn(rule: impl Fn(&BigUint) -> Expr + Send + Sync + 'static) -> Branches {
        Branches::table(BTreeMap::new(), rule)
    }

    pub fn table(table: BTreeMap<BigUint, Expr>, default: impl Fn(&BigUint) -> Expr + Send + Sync + 'static) -> Branches {
        Branches { table, rule: Arc::new(default), memo: Mutex::new(HashMap::new()) }
    }

    pub fn identity() -> Branches {
        Branches::from_fn(|i| Expr::Num(i.clone()))
    }

    pub fn get(&self, i: &BigUint) -> Expr {
        if let Some(e) = self.table.get(i) {
            return e.clone();
        }
        if let Some(e) = self.memo.lock().expect("memo lock").get(i) {
            return e.clone();
        }
        let e = (self.rule)(i);
        self.memo.lock().expect("memo lock").entry(i.clone()).or_insert(e).clone()
    }

    /// Indices with an explicit or already forced branch, in increasing order.
    pub fn known_indices(&self) -> Vec<BigUint> {
        let mut v: Vec<BigUint> = self.table.keys().cloned().collect();
        v.extend(self.memo.lock().expect("memo lock").keys().cloned());
        v.sort();
        v.dedup();
        v
    }
}

type Thunk = Box<dyn FnOnce() -> Expr + Send>;

struct ProcInner {
    ty: Type,
    params: Vec<NVar>,
    body: OnceLock<Expr>,
    thunk: Mutex<Option<Thunk>>,
}

/// `λx⃗. e`, with `e` computed on first use.
#[derive(Clone)]
pub struct Procedure {
    inner: Arc<ProcInner>,
    cert: Option<Arc<str>>,
}

impl Procedure {
    fn check_params(ty: &Type, params: &[NVar]) {
        let (doms, res) = ty.uncurry();
        assert!(res.is_nat(), "procedures have product-free types ending in nat");
        assert_eq!(doms.len(), params.len(), "parameter count");
        for (d, p) in doms.iter().zip(params) {
            assert_eq!(d, &p.ty, "parameter type");
        }
    }

    pub fn new(ty: Type, params: Vec<NVar>, body: Expr) -> Procedure {
        Procedure::check_params(&ty, &params);
        let cell = OnceLock::new();
        let _ = cell.set(body);
        Procedure { inner: Arc::new(ProcInner { ty, params, body: cell, thunk: Mutex::new(None) }), cert: None }
    }

    pub fn lazy(ty: Type, params: Vec<NVar>, thunk: impl FnOnce() -> Expr + Send + 'static) -> Procedure {
        Procedure::check_params(&ty, &params);
        Procedure {
            inner: Arc::new(ProcInner { ty, params, body: OnceLock::new(), thunk: Mutex::new(Some(Box::new(thunk))) }),
            cert: None,
        }
    }

    /// Builds `λx⃗. body(x⃗)` with fresh parameters.
    pub fn build(ty: Type, body: impl FnOnce(&[NVar]) -> Expr) -> Procedure {
        let params: Vec<NVar> = ty.uncurry().0.into_iter().map(NVar::fresh).collect();
        let e = body(&params);
        Procedure::new(ty, params, e)
    }

    /// `λ.n`.
    pub fn numeral(n: impl Into<BigUint>) -> Procedure {
        Procedure::new(Type::Nat, Vec::new(), Expr::Num(n.into()))
    }

    /// `λx⃗.⊥`.
    pub fn bottom(ty: Type) -> Procedure {
        Procedure::build(ty, |_| Expr::Bot)
    }

    pub fn ty(&self) -> &Type {
        &self.inner.ty
    }

    pub fn params(&self) -> &[NVar] {
        &self.inner.params
    }

    pub fn arity(&self) -> usize {
        self.inner.params.len()
    }

    pub fn body(&self) -> &Expr {
        self.inner.body.get_or_init(|| {
            let thunk = self.inner.thunk.lock().expect("thunk lock").take();
            match thunk {
                Some(f) => f(),
                None => Expr::Unresolved,
            }
        })
    }

    pub fn ptr_eq(&self, other: &Procedure) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    /// The reason this procedure is known to be LWF without exploring it.
    pub fn lwf_certificate(&self) -> Option<&str> {
        self.cert.as_deref()
    }

    pub fn with_certificate(mut self, why: &str) -> Procedure {
        self.cert = Some(Arc::from(why));
        self
    }

    pub(crate) fn set_certificate(mut self, cert: Option<Arc<str>>) -> Procedure {
        self.cert = cert;
        self
    }

    pub(crate) fn certificate_arc(&self) -> Option<Arc<str>> {
        self.cert.clone()
    }

    /// The value of a closed procedure of type `nat`.
    pub fn ground(&self) -> Ground {
        match self.body() {
            Expr::Num(n) => Ground::Value(n.clone()),
            Expr::Bot => Ground::Bottom,
            Expr::Unresolved => Ground::Unresolved,
            Expr::Case(_) => Ground::Open,
        }
    }
}

impl fmt::Debug for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self, 3, 4))
    }
}

/// What a procedure of type `nat` amounts to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ground {
    Value(BigUint),
    Bottom,
    Unresolved,
    /// The body still interrogates a free variable.
    Open,
}

impl Ground {
    pub fn value(&self) -> Option<&BigUint> {
        match self {
            Ground::Value(n) => Some(n),
            _ => None,
        }
    }
}

/// `x^{ση}`: the hereditary η-expansion of a variable.
pub fn eta_expand(x: &NVar) -> Procedure {
    Procedure::build(x.ty.clone(), |zs| Expr::bare(x, zs.iter().map(eta_expand).collect()))
}

/// The identity `λx. x^{ση}` on a product-free type.
pub fn identity(sigma: &Type) -> Procedure {
    Procedure::build(Type::arrow(sigma.clone(), sigma.clone()), |ps| {
        let x = &ps[0];
        Expr::bare(x, ps[1..].iter().map(eta_expand).collect())
    })
}
