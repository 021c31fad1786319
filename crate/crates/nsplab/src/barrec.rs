//! Bar conditions, bar trees and bar recursion.
//!
//! Type-2 arguments are handled through the [`Functional`] trait so that the
//! same tree and recursor code runs over NSPs, native host closures and
//! derived functionals such as the Spector view `U·F` of a Kohlenbach tree.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lang::LangTag;
use crate::library::t0_str_bodies;
use crate::nsp::{apply_all, call_type2, Branches, Expr, Ground, NVar, Procedure};
use crate::reduce::{evaluate, Outcome};
use crate::seqcode::SeqCode;
use crate::syntax::parse;
use crate::term::{ap, aps, c, Const, LibFn, Term};
use crate::types::Type;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Flavor {
    Spector,
    Kohlenbach,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Spector => "spector",
            Flavor::Kohlenbach => "kohlenbach",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Flavor> {
        match s {
            "spector" | "S" => Ok(Flavor::Spector),
            "kohlenbach" | "K" => Ok(Flavor::Kohlenbach),
            _ => Err(Error::Usage(format!("unknown flavor {s:?}; expected spector or kohlenbach"))),
        }
    }
}

/// A host function `ℕ → ℕ`, possibly partial.
pub type HostFn<'a> = &'a dyn Fn(&BigUint) -> Result<BigUint>;

/// Anything that can be applied to a host function of type 1.
pub trait Functional: Send + Sync {
    fn call(&self, f: HostFn<'_>) -> Result<BigUint>;
}

impl Functional for Procedure {
    fn call(&self, f: HostFn<'_>) -> Result<BigUint> {
        call_type2(self, f)
    }
}

impl<T: Functional + ?Sized> Functional for &T {
    fn call(&self, f: HostFn<'_>) -> Result<BigUint> {
        (**self).call(f)
    }
}

/// A native closure viewed as a functional.
pub struct HostFunctional<F>(pub F);

impl<F> Functional for HostFunctional<F>
where
    F: Fn(HostFn<'_>) -> Result<BigUint> + Send + Sync,
{
    fn call(&self, f: HostFn<'_>) -> Result<BigUint> {
        (self.0)(f)
    }
}

pub(crate) fn ground_value(p: &Procedure, what: &str) -> Result<BigUint> {
    match p.ground() {
        Ground::Value(n) => Ok(n),
        Ground::Bottom => Err(Error::Undefined(format!("{what} is ⊥"))),
        Ground::Unresolved => Err(Error::Undefined(format!("{what} exceeds its step budget"))),
        Ground::Open => Err(Error::Undefined(format!("{what} still has free variables"))),
    }
}

/// The T₀^str programs for `len`, `add` and `basic`.
pub fn seq_primitives() -> [(&'static str, Term); 3] {
    let b = t0_str_bodies();
    [("len", b.get(LibFn::Len).clone()), ("add", b.get(LibFn::Add).clone()), ("basic", b.get(LibFn::Basic).clone())]
}

/// `[x⃗ j^ω]` as a procedure of type 1.
pub fn basic_procedure(x: &SeqCode, j: &BigUint) -> Procedure {
    let xs: Arc<[BigUint]> = x.decode().into();
    let j = j.clone();
    Procedure::build(Type::pure(1), move |ps| {
        Expr::case(
            &ps[0],
            vec![],
            Branches::from_fn(move |i| match i.to_usize() {
                Some(k) if k < xs.len() => Expr::Num(xs[k].clone()),
                _ => Expr::Num(j.clone()),
            }),
        )
    })
}

fn decide(flavor: Flavor, x: &SeqCode, mut at: impl FnMut(u32) -> Result<BigUint>) -> Result<bool> {
    match flavor {
        Flavor::Spector => Ok(at(0)? < BigUint::from(x.len())),
        Flavor::Kohlenbach => Ok(at(0)? == at(1)?),
    }
}

/// The bar condition of `x⃗` for an NSP `F`, computed by NSP application.
pub fn bar_condition(f: &Procedure, x: &SeqCode, flavor: Flavor) -> Result<bool> {
    decide(flavor, x, |j| {
        let r = apply_all(f, &[basic_procedure(x, &BigUint::from(j))])?;
        ground_value(&r, &format!("F([{x} {j}^ω])"))
    })
}

/// The bar condition of `x⃗` for a closed term `F`, computed by reduction.
pub fn bar_condition_term(f: &Term, x: &SeqCode, flavor: Flavor, fuel: u64) -> Result<bool> {
    decide(flavor, x, |j| {
        let arg = aps(&c(Const::Lib(LibFn::Basic)), &[Term::num(x.code().clone()), Term::num(j)]);
        let t = Term::app(f.clone(), arg)?;
        match evaluate(&t, LangTag::PCF_BYVAL, fuel)?.outcome {
            Outcome::Value(n) => Ok(n),
            other => Err(Error::Undefined(format!("F([{x} {j}^ω]) gives {other:?}"))),
        }
    })
}

/// The bar condition of `x⃗` for any functional.
pub fn bar_condition_host(f: &dyn Functional, x: &SeqCode, flavor: Flavor) -> Result<bool> {
    decide(flavor, x, |j| {
        let j = BigUint::from(j);
        f.call(&|i| Ok(x.basic(&j, i)))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TreeCaps {
    /// Longest sequence explored.
    pub depth: usize,
    /// Children `x⃗·z` are explored for `z < window`.
    pub window: u64,
    /// Total nodes visited.
    pub nodes: usize,
}

impl Default for TreeCaps {
    fn default() -> TreeCaps {
        TreeCaps { depth: 32, window: 64, nodes: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeStatus {
    Outside,
    Leaf,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TreeVerdict {
    /// Every explored path ends in a leaf.
    WellFoundedUpToCaps,
    /// A path of internal nodes reaching the depth cap.
    InfinitePathWitness(Vec<BigUint>),
    /// The node cap was hit first.
    Exceeded,
}

#[derive(Clone, Debug, Serialize)]
pub struct Exploration {
    pub verdict: TreeVerdict,
    pub leaves: Vec<SeqCode>,
    pub internal: Vec<SeqCode>,
    /// Length of the longest explored member.
    pub depth: usize,
}

impl Exploration {
    pub fn members(&self) -> impl Iterator<Item = &SeqCode> {
        self.internal.iter().chain(&self.leaves)
    }
}

/// `T^S(F)` or `T^K(F)` with memoized bar conditions.
pub struct BarTree<'a> {
    f: &'a dyn Functional,
    flavor: Flavor,
    caps: TreeCaps,
    memo: Mutex<HashMap<BigUint, bool>>,
}

impl<'a> BarTree<'a> {
    pub fn new(f: &'a dyn Functional, flavor: Flavor, caps: TreeCaps) -> BarTree<'a> {
        BarTree { f, flavor, caps, memo: Mutex::new(HashMap::new()) }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn caps(&self) -> TreeCaps {
        self.caps
    }

    /// The node's own bar condition.
    pub fn bar(&self, x: &SeqCode) -> Result<bool> {
        if let Some(&b) = self.memo.lock().expect("memo lock").get(x.code()) {
            return Ok(b);
        }
        let b = bar_condition_host(self.f, x, self.flavor)?;
        self.memo.lock().expect("memo lock").insert(x.code().clone(), b);
        Ok(b)
    }

    pub fn status(&self, x: &SeqCode) -> Result<NodeStatus> {
        let prefixes = x.prefixes();
        for p in &prefixes[..prefixes.len() - 1] {
            if self.bar(p)? {
                return Ok(NodeStatus::Outside);
            }
        }
        Ok(if self.bar(x)? { NodeStatus::Leaf } else { NodeStatus::Internal })
    }

    /// Depth-first exploration from the root within the caps.
    pub fn explore(&self) -> Result<Exploration> {
        let mut out = Exploration { verdict: TreeVerdict::WellFoundedUpToCaps, leaves: vec![], internal: vec![], depth: 0 };
        let mut stack = vec![SeqCode::empty()];
        let mut visited = 0;
        while let Some(x) = stack.pop() {
            visited += 1;
            if visited > self.caps.nodes {
                out.verdict = TreeVerdict::Exceeded;
                break;
            }
            let len = x.len();
            out.depth = out.depth.max(len);
            if self.bar(&x)? {
                out.leaves.push(x);
                continue;
            }
            if len >= self.caps.depth {
                if out.verdict == TreeVerdict::WellFoundedUpToCaps {
                    out.verdict = TreeVerdict::InfinitePathWitness(x.decode());
                }
                out.internal.push(x);
                continue;
            }
            for z in (0..self.caps.window).rev() {
                stack.push(x.add_u64(z));
            }
            out.internal.push(x);
        }
        Ok(out)
    }
}

pub fn explore_tree(f: &dyn Functional, flavor: Flavor, caps: TreeCaps) -> Result<Exploration> {
    BarTree::new(f, flavor, caps).explore()
}

/// The functionals `F⁺_w` (no cut) and `F_w` (cut at `k^w`): query `f(0)`,
/// `f(1)`, … and stop with `⟨i_0,…,i_j⟩` at the first `i_j < k^j`. After
/// the last modulus, `F⁺_w` stops unconditionally and `F_w` stops only below
/// the cut, being `⊥` above it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Approximant {
    pub ks: Vec<BigUint>,
    pub cut: Option<BigUint>,
}

impl Approximant {
    pub fn plus(ks: &[BigUint]) -> Approximant {
        Approximant { ks: ks.to_vec(), cut: None }
    }

    pub fn truncated(ks: &[BigUint], cut: &BigUint) -> Approximant {
        Approximant { ks: ks.to_vec(), cut: Some(cut.clone()) }
    }

    /// `w` for `F⁺_w` and `F_w`.
    pub fn level(&self) -> usize {
        self.ks.len()
    }

    /// The functional on a sequence of answers, or `None` if more are needed.
    /// `Some(None)` is `⊥`.
    fn step(&self, answers: &[BigUint]) -> Option<Option<BigUint>> {
        let j = answers.len() - 1;
        let i = &answers[j];
        let code = || SeqCode::from_slice(answers).into_code();
        if j < self.ks.len() {
            return if i < &self.ks[j] { Some(Some(code())) } else { None };
        }
        match &self.cut {
            None => Some(Some(code())),
            Some(k) if i < k => Some(Some(code())),
            Some(_) => Some(None),
        }
    }

    pub fn to_procedure(&self) -> Procedure {
        fn node(me: Arc<Approximant>, f: NVar, answers: Vec<BigUint>) -> Expr {
            let j = answers.len();
            let head = f.clone();
            Expr::case(
                &head,
                vec![Procedure::numeral(j as u64)],
                Branches::from_fn(move |i| {
                    let mut a = answers.clone();
                    a.push(i.clone());
                    match me.step(&a) {
                        Some(Some(n)) => Expr::Num(n),
                        Some(None) => Expr::Bot,
                        None => node(me.clone(), f.clone(), a),
                    }
                }),
            )
        }
        let me = Arc::new(self.clone());
        Procedure::build(Type::pure(2), |ps| node(me, ps[0].clone(), vec![]))
    }

    /// A closed term for the functional: T₀^str without a cut, PCF with one.
    pub fn to_term(&self) -> Term {
        let mut body = String::new();
        let n = self.ks.len();
        let seq = |j: usize| (0..=j).fold("0".to_string(), |s, t| format!("(add {s} i{t})"));
        let last = match &self.cut {
            None => seq(n),
            Some(k) => format!("(ifzero (lt i{n} {k}) {} ((Y nat) (lam (b nat) b)))", seq(n)),
        };
        for j in 0..=n {
            let inner = if j < n { format!("(ifzero (lt i{j} {}) {} ", self.ks[j], seq(j)) } else { last.clone() };
            body.push_str(&format!("((byval () nat) (lam (i{j} nat) {inner}"));
        }
        for j in (0..=n).rev() {
            if j < n {
                body.push(')');
            }
            body.push_str(&format!(") (f {j}))"));
        }
        parse(&format!("(lam (f (-> nat nat)) {body})")).expect("approximant term")
    }
}

impl Functional for Approximant {
    fn call(&self, f: HostFn<'_>) -> Result<BigUint> {
        let mut answers = Vec::new();
        loop {
            answers.push(f(&BigUint::from(answers.len()))?);
            match self.step(&answers) {
                Some(Some(n)) => return Ok(n),
                Some(None) => return Err(Error::Undefined("the truncated functional is ⊥ here".into())),
                None => {}
            }
        }
    }
}

/// `G₀ = λg. case g(0) of i ⇒ 2i`.
pub struct GZero;

impl GZero {
    pub fn to_procedure(&self) -> Procedure {
        Procedure::build(Type::pure(2), |ps| {
            Expr::case(&ps[0], vec![Procedure::numeral(0u32)], Branches::from_fn(|i| Expr::Num(i * 2u32)))
        })
    }

    pub fn to_term(&self) -> Term {
        parse("(lam (g (-> nat nat)) (times 2 (g 0)))").expect("static")
    }
}

impl Functional for GZero {
    fn call(&self, f: HostFn<'_>) -> Result<BigUint> {
        Ok(f(&BigUint::zero())? * 2u32)
    }
}

/// `2⟨x⃗⟩+1`.
pub fn leaf_value(x: &SeqCode) -> BigUint {
    x.code() * 2u32 + 1u32
}

/// Step out of a bar recursion: leaf value or branch functional.
pub type LeafFn<'a> = &'a dyn Fn(&SeqCode) -> Result<BigUint>;
pub type BranchFn<'a> = &'a dyn Fn(&SeqCode, HostFn<'_>) -> Result<BigUint>;

/// The general bar recursor with leaf function `L` and node-dependent `G`,
/// defined by recursion over the tree from a member `x⃗`.
pub fn reference_phi_general(
    f: &dyn Functional,
    leaf: LeafFn<'_>,
    branch: BranchFn<'_>,
    x: &SeqCode,
    flavor: Flavor,
    depth_cap: usize,
) -> Result<BigUint> {
    let tree = BarTree::new(f, flavor, TreeCaps::default());
    if tree.status(x)? == NodeStatus::Outside {
        return Err(Error::NotInTree(x.to_string()));
    }
    fn go(tree: &BarTree<'_>, leaf: LeafFn<'_>, branch: BranchFn<'_>, x: &SeqCode, cap: usize, depth: usize) -> Result<BigUint> {
        if depth > cap {
            return Err(Error::DepthCap { cap, what: format!("bar recursion below {x} does not reach a leaf") });
        }
        if tree.bar(x)? {
            leaf(x)
        } else {
            branch(x, &|z| go(tree, leaf, branch, &x.add(z), cap, depth + 1))
        }
    }
    go(&tree, leaf, branch, x, depth_cap, 0)
}

pub const PHI_DEPTH_CAP: usize = 4096;

/// The simplified bar recursor `Φ(F, G, x⃗)` with leaf value `2⟨x⃗⟩+1`.
pub fn reference_phi(f: &dyn Functional, g: &dyn Functional, x: &SeqCode, flavor: Flavor) -> Result<BigUint> {
    reference_phi_capped(f, g, x, flavor, PHI_DEPTH_CAP)
}

pub fn reference_phi_capped(f: &dyn Functional, g: &dyn Functional, x: &SeqCode, flavor: Flavor, cap: usize) -> Result<BigUint> {
    reference_phi_general(f, &|x| Ok(leaf_value(x)), &|_, h| g.call(h), x, flavor, cap)
}

/// `U·F`: the least `r` with `F([g(0..r) 0^ω]) = F([g(0..r) 1^ω])`, minus one.
pub struct SpectorView<'a> {
    pub f: &'a dyn Functional,
    pub search_cap: usize,
}

impl Functional for SpectorView<'_> {
    fn call(&self, g: HostFn<'_>) -> Result<BigUint> {
        let mut prefix: Vec<BigUint> = Vec::new();
        for r in 0..=self.search_cap {
            let s = SeqCode::from_slice(&prefix);
            if bar_condition_host(self.f, &s, Flavor::Kohlenbach)? {
                return Ok(BigUint::from(r.saturating_sub(1)));
            }
            prefix.push(g(&BigUint::from(r))?);
        }
        Err(Error::DepthCap { cap: self.search_cap, what: "the minimization in U·F".into() })
    }
}

/// `U` as a T+min term of type 2 → 2.
pub fn u_term() -> Term {
    parse(
        "(lam (F (-> (-> nat nat) nat)) (g (-> nat nat))
           (monus (min (lam (r nat)
                  (ifzero (neq (F (lam (i nat) (ifzero (lt i r) (g i) 0)))
                               (F (lam (i nat) (ifzero (lt i r) (g i) 1))))
                          1 0)) 0)
                1))",
    )
    .expect("static")
}

pub type SimplifiedRecursor<'a> = &'a dyn Fn(&dyn Functional, &dyn Functional, &SeqCode) -> Result<BigUint>;

/// A Kohlenbach recursor from a Spector one: the root is handled directly
/// when it is a Kohlenbach leaf, otherwise the Spector recursor runs on `U·F`.
pub fn spector_to_kohlenbach_bridge<'a>(
    phi_s: SimplifiedRecursor<'a>,
    search_cap: usize,
) -> impl Fn(&dyn Functional, &dyn Functional, &SeqCode) -> Result<BigUint> + 'a {
    move |f, g, x| {
        if bar_condition_host(f, &SeqCode::empty(), Flavor::Kohlenbach)? {
            return Ok(leaf_value(&SeqCode::empty()));
        }
        let u = SpectorView { f, search_cap };
        phi_s(&u, g, x)
    }
}

/// The bridge as a term over a Spector recursor term of type 2 → 2 → 1.
pub fn bridge_term(phi_s: &Term) -> Result<Term> {
    let body = parse(
        "(lam (P (-> (-> (-> nat nat) nat) (-> (-> nat nat) nat) nat nat))
              (U (-> (-> (-> nat nat) nat) (-> nat nat) nat))
              (F (-> (-> nat nat) nat)) (G (-> (-> nat nat) nat)) (x nat)
           (ifzero (neq (F (basic 0 0)) (F (basic 0 1))) (P (U F) G x) 1))",
    )?;
    Term::apps(body, [phi_s.clone(), u_term()])
}

/// `BR^S` or `BR^K`: `λFLG. Y(λB x. if bar(x) then L x else G x (λz. B(x·z)))`.
pub fn canonical_br(flavor: Flavor) -> Term {
    let cond = match flavor {
        Flavor::Spector => "(ifzero (lt (F (basic x 0)) (len x)) (L x) (G x (lam (z nat) (B (add x z)))))",
        Flavor::Kohlenbach => "(ifzero (neq (F (basic x 0)) (F (basic x 1))) (G x (lam (z nat) (B (add x z)))) (L x))",
    };
    parse(&format!(
        "(lam (F (-> (-> nat nat) nat)) (L (-> nat nat)) (G (-> nat (-> nat nat) nat))
           ((Y (-> nat nat)) (lam (B (-> nat nat)) (x nat) {cond})))"
    ))
    .expect("static")
}

/// `λFG. BR F (λx. 2x+1) (λx g. G g)`, of type 2 → 2 → 1.
pub fn simplified_br(flavor: Flavor) -> Term {
    let wrap = parse(
        "(lam (R (-> (-> (-> nat nat) nat) (-> nat nat) (-> nat (-> nat nat) nat) nat nat))
              (F (-> (-> nat nat) nat)) (G (-> (-> nat nat) nat))
           (R F (lam (x nat) (suc (times 2 x))) (lam (x nat) (g (-> nat nat)) (G g))))",
    )
    .expect("static");
    ap(&wrap, &canonical_br(flavor))
}

/// A candidate simplified recursor under test.
pub trait Recursor {
    fn eval(&self, f: &Procedure, g: &Procedure, x: &SeqCode) -> Result<BigUint>;
}

impl Recursor for Procedure {
    fn eval(&self, f: &Procedure, g: &Procedure, x: &SeqCode) -> Result<BigUint> {
        let r = apply_all(self, &[f.clone(), g.clone(), Procedure::numeral(x.code().clone())])?;
        ground_value(&r, &format!("Ψ·F·G·{x}"))
    }
}

/// A host closure used as a candidate.
pub struct HostRecursor<F>(pub F);

impl<F> Recursor for HostRecursor<F>
where
    F: Fn(&Procedure, &Procedure, &SeqCode) -> Result<BigUint>,
{
    fn eval(&self, f: &Procedure, g: &Procedure, x: &SeqCode) -> Result<BigUint> {
        (self.0)(f, g, x)
    }
}

#[derive(Clone, Debug)]
pub struct BatteryEntry {
    pub name: String,
    pub f: Procedure,
    pub g: Procedure,
}

impl BatteryEntry {
    pub fn new(name: &str, f: Procedure, g: Procedure) -> BatteryEntry {
        BatteryEntry { name: name.to_string(), f, g }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub battery: String,
    pub node: Vec<BigUint>,
    pub kind: NodeStatus,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConformanceReport {
    pub flavor: Flavor,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl ConformanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn show(r: &Result<BigUint>) -> String {
    match r {
        Ok(n) => n.to_string(),
        Err(e) => e.to_string(),
    }
}

/// Checks the leaf and node equations at every explored member of each
/// battery tree. The right-hand side at an internal node runs `G` against
/// the candidate itself on the children.
pub fn conformance_check(cand: &dyn Recursor, battery: &[BatteryEntry], flavor: Flavor, caps: TreeCaps) -> Result<ConformanceReport> {
    let mut report = ConformanceReport { flavor, checked: 0, violations: vec![] };
    for entry in battery {
        let tree = BarTree::new(&entry.f, flavor, caps);
        let explored = tree.explore()?;
        let memo: RefCell<HashMap<BigUint, Result<BigUint>>> = RefCell::new(HashMap::new());
        let run = |x: &SeqCode| -> Result<BigUint> {
            if let Some(r) = memo.borrow().get(x.code()) {
                return r.clone();
            }
            let r = cand.eval(&entry.f, &entry.g, x);
            memo.borrow_mut().insert(x.code().clone(), r.clone());
            r
        };
        for (kind, nodes) in [(NodeStatus::Leaf, &explored.leaves), (NodeStatus::Internal, &explored.internal)] {
            for x in nodes {
                report.checked += 1;
                let actual = run(x);
                let expected = match kind {
                    NodeStatus::Leaf => Ok(leaf_value(x)),
                    _ => entry.g.call(&|z| run(&x.add(z))),
                };
                let ok = matches!((&actual, &expected), (Ok(a), Ok(e)) if a == e);
                if !ok {
                    report.violations.push(Violation {
                        battery: entry.name.clone(),
                        node: x.decode(),
                        kind,
                        expected: show(&expected),
                        actual: show(&actual),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// `λg. g(1) + 2·g(0)`.
pub fn g_two_term() -> Term {
    parse("(lam (g (-> nat nat)) (plus (g 1) (times 2 (g 0))))").expect("static")
}

/// The constant functional `λf. 0`.
pub fn const_zero_term() -> Term {
    parse("(lam (f (-> nat nat)) 0)").expect("static")
}

fn nums(ks: &[u64]) -> Vec<BigUint> {
    ks.iter().map(|&k| BigUint::from(k)).collect()
}

/// The standard battery: constant `F`, `F⁺₀`, `F⁺₁` with `k⁰ = 2` and a
/// depth-3 tree mixing leaves at every length, each against `G₀` and
/// `λg. g(1) + 2·g(0)`.
pub fn standard_battery() -> Result<Vec<BatteryEntry>> {
    use crate::nsp::denote;
    let fs = [
        ("const0", denote(&const_zero_term())?),
        ("F+0", denote(&Approximant::plus(&[]).to_term())?),
        ("F+1[2]", denote(&Approximant::plus(&nums(&[2])).to_term())?),
        ("F+2[2,2]", denote(&Approximant::plus(&nums(&[2, 2])).to_term())?),
    ];
    let gs = [("G0", denote(&GZero.to_term())?), ("G2", denote(&g_two_term())?)];
    let mut out = Vec::new();
    for (fname, f) in &fs {
        for (gname, g) in &gs {
            out.push(BatteryEntry::new(&format!("{fname}/{gname}"), f.clone(), g.clone()));
        }
    }
    Ok(out)
}

/// Caps under which conformance runs in reasonable time. Spector trees grow
/// as deep as the codes `F` returns, so only small entries are probed.
pub fn conformance_caps(flavor: Flavor) -> TreeCaps {
    match flavor {
        Flavor::Kohlenbach => TreeCaps { depth: 8, window: 4, nodes: 5_000 },
        Flavor::Spector => TreeCaps { depth: 6, window: 2, nodes: 5_000 },
    }
}

pub fn one() -> BigUint {
    BigUint::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsp::{denote, lwf_probe, syntactic_leq, ExplorationBudget, LwfVerdict, Tri};
    use crate::reduce::evaluate;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn eval_t0(t: &Term) -> BigUint {
        match evaluate(t, LangTag::T0_STR, 10_000_000).unwrap().outcome {
            Outcome::Value(n) => n,
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn primitives_are_strict_programs() {
        let [(_, len), (_, add), (_, basic)] = seq_primitives();
        for t in [&len, &add, &basic] {
            assert!(LangTag::T0_STR.contains(t));
            assert!(t.is_closed());
        }
        assert_eq!(eval_t0(&ap(&len, &Term::num(0u32))), b(0));
        assert_eq!(eval_t0(&aps(&add, &[Term::num(0u32), Term::num(0u32)])), b(1));
        let five = SeqCode::from_u64s(&[5]).into_code();
        for (i, want) in [(0, 5), (1, 9), (7, 9)] {
            let t = aps(&basic, &[Term::num(five.clone()), Term::num(9u32), Term::num(i as u32)]);
            assert_eq!(eval_t0(&t), b(want));
        }
    }

    #[test]
    fn bar_condition_examples() {
        let zero = denote(&const_zero_term()).unwrap();
        assert!(bar_condition(&zero, &SeqCode::empty(), Flavor::Kohlenbach).unwrap());
        assert!(!bar_condition(&zero, &SeqCode::empty(), Flavor::Spector).unwrap());
        assert!(bar_condition(&zero, &SeqCode::from_u64s(&[4]), Flavor::Spector).unwrap());
        let fp = Approximant::plus(&[]).to_procedure();
        assert!(!bar_condition(&fp, &SeqCode::empty(), Flavor::Kohlenbach).unwrap());
        assert!(bar_condition(&fp, &SeqCode::from_u64s(&[17]), Flavor::Kohlenbach).unwrap());
        let trunc = Approximant::truncated(&[], &b(3)).to_procedure();
        assert!(bar_condition(&trunc, &SeqCode::from_u64s(&[1]), Flavor::Kohlenbach).unwrap());
        assert!(matches!(bar_condition(&trunc, &SeqCode::from_u64s(&[5]), Flavor::Kohlenbach), Err(Error::Undefined(_))));
    }

    #[test]
    fn bar_condition_term_matches_nsp() {
        let f = Approximant::plus(&nums(&[2])).to_term();
        let p = denote(&f).unwrap();
        for xs in [vec![], vec![0], vec![3], vec![3, 1], vec![1, 4, 2]] {
            let x = SeqCode::from_u64s(&xs);
            for flavor in [Flavor::Spector, Flavor::Kohlenbach] {
                let a = bar_condition(&p, &x, flavor).unwrap();
                assert_eq!(a, bar_condition_term(&f, &x, flavor, 1_000_000).unwrap());
                assert_eq!(a, bar_condition_host(&Approximant::plus(&nums(&[2])), &x, flavor).unwrap());
            }
        }
    }

    #[test]
    fn approximant_term_denotes_native_tree() {
        let budget = ExplorationBudget::new(100_000, 8, 5).unwrap();
        for ks in [vec![], vec![2], vec![1, 3]] {
            let a = Approximant::plus(&nums(&ks));
            let t = a.to_term();
            assert!(LangTag::T0_STR.contains(&t), "{t}");
            let (p, q) = (denote(&t).unwrap(), a.to_procedure());
            assert_eq!(syntactic_leq(&p, &q, &budget), Tri::True);
            assert_eq!(syntactic_leq(&q, &p, &budget), Tri::True);
        }
        let cut = Approximant::truncated(&nums(&[2]), &b(3));
        let (p, q) = (denote(&cut.to_term()).unwrap(), cut.to_procedure());
        assert_eq!(syntactic_leq(&q, &Approximant::plus(&nums(&[2])).to_procedure(), &budget), Tri::True);
        assert_ne!(syntactic_leq(&Approximant::plus(&nums(&[2])).to_procedure(), &q, &budget), Tri::True);
        let f = |i: &BigUint| Ok(i + 1u32);
        assert_eq!(p.call(&f).unwrap(), q.call(&f).unwrap());
    }

    #[test]
    fn tree_shapes() {
        let zero = denote(&const_zero_term()).unwrap();
        let e = explore_tree(&zero, Flavor::Kohlenbach, TreeCaps::default()).unwrap();
        assert_eq!(e.leaves, vec![SeqCode::empty()]);
        assert!(e.internal.is_empty());

        let fp = Approximant::plus(&[]);
        let e = explore_tree(&fp, Flavor::Kohlenbach, TreeCaps::default()).unwrap();
        assert_eq!(e.verdict, TreeVerdict::WellFoundedUpToCaps);
        assert_eq!(e.internal, vec![SeqCode::empty()]);
        assert_eq!(e.leaves.len(), 64);
        assert!(e.leaves.iter().all(|x| x.len() == 1));

        let finf = Approximant::plus(&nums(&[2, 3]));
        let caps = TreeCaps { depth: 8, window: 6, nodes: 10_000 };
        let tree = BarTree::new(&finf, Flavor::Kohlenbach, caps);
        let e = tree.explore().unwrap();
        assert_eq!(e.depth, 3);
        assert_eq!(tree.status(&SeqCode::from_u64s(&[2, 3, 0])).unwrap(), NodeStatus::Leaf);
        assert_eq!(tree.status(&SeqCode::from_u64s(&[2, 1])).unwrap(), NodeStatus::Leaf);
        assert_eq!(tree.status(&SeqCode::from_u64s(&[1, 1])).unwrap(), NodeStatus::Outside);

        let sp = explore_tree(&fp, Flavor::Spector, TreeCaps { depth: 5, window: 3, nodes: 1000 }).unwrap();
        assert!(matches!(sp.verdict, TreeVerdict::InfinitePathWitness(_)));
    }

    #[test]
    fn reference_phi_values() {
        let fp = Approximant::plus(&[]);
        let c = reference_phi(&fp, &GZero, &SeqCode::empty(), Flavor::Kohlenbach).unwrap();
        assert_eq!(c, SeqCode::from_u64s(&[0]).code() * 4u32 + 2u32);
        assert_eq!(c, b(6));
        let zero = HostFunctional(|_: HostFn<'_>| Ok(BigUint::zero()));
        assert_eq!(reference_phi(&zero, &GZero, &SeqCode::empty(), Flavor::Kohlenbach).unwrap(), b(1));
        let x = SeqCode::from_u64s(&[9]);
        assert_eq!(reference_phi(&fp, &GZero, &x, Flavor::Kohlenbach).unwrap(), leaf_value(&x));
        assert!(matches!(
            reference_phi(&zero, &GZero, &x, Flavor::Kohlenbach),
            Err(Error::NotInTree(_))
        ));
    }

    #[test]
    fn canonical_programs_conform() {
        let battery = standard_battery().unwrap();
        for flavor in [Flavor::Kohlenbach, Flavor::Spector] {
            let br = denote(&simplified_br(flavor)).unwrap();
            let r = conformance_check(&br, &battery, flavor, conformance_caps(flavor)).unwrap();
            assert!(r.passed(), "{flavor}: {:?}", r.violations.first());
            assert!(r.checked > battery.len());
        }
    }

    #[test]
    fn unsimplified_run_through_reduction() {
        let br = canonical_br(Flavor::Kohlenbach);
        let t = aps(
            &br,
            &[const_zero_term(), parse("(lam (x nat) x)").unwrap(), parse("(lam (x nat) (g (-> nat nat)) 7)").unwrap(), Term::num(0u32)],
        );
        match evaluate(&t, LangTag::PCF, 100_000).unwrap().outcome {
            Outcome::Value(n) => assert_eq!(n, b(0)),
            o => panic!("{o:?}"),
        }
        let br = canonical_br(Flavor::Spector);
        let t = aps(
            &br,
            &[const_zero_term(), parse("(lam (x nat) x)").unwrap(), parse("(lam (x nat) (g (-> nat nat)) (suc (g 4)))").unwrap(), Term::num(0u32)],
        );
        let want = SeqCode::from_u64s(&[4]).into_code() + 1u32;
        match evaluate(&t, LangTag::PCF, 100_000).unwrap().outcome {
            Outcome::Value(n) => assert_eq!(n, want),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn constant_recursor_violates_every_leaf() {
        let cand = denote(&parse("(lam (F (-> (-> nat nat) nat)) (G (-> (-> nat nat) nat)) (x nat) 0)").unwrap()).unwrap();
        let battery = standard_battery().unwrap();
        let r = conformance_check(&cand, &battery[2..3], Flavor::Kohlenbach, conformance_caps(Flavor::Kohlenbach)).unwrap();
        assert!(r.violations.iter().all(|v| v.kind == NodeStatus::Leaf));
        assert_eq!(r.violations.len(), 4);
    }

    #[test]
    fn canonical_br_is_not_lwf() {
        let t = parse(&format!(
            "(lam (F (-> (-> nat nat) nat)) (L (-> nat nat)) (G (-> nat (-> nat nat) nat)) ({} F L G 0))",
            crate::syntax::print(&canonical_br(Flavor::Kohlenbach))
        ))
        .unwrap();
        let p = denote(&t).unwrap();
        let budget = ExplorationBudget::new(100_000, 8, 2).unwrap();
        for bound in [1, 2, 4] {
            assert!(matches!(lwf_probe(&p, bound, &budget).verdict, LwfVerdict::ChainFound(_)));
        }
    }

    #[test]
    fn bridge_matches_kohlenbach_reference() {
        let phi_s = |f: &dyn Functional, g: &dyn Functional, x: &SeqCode| reference_phi(f, g, x, Flavor::Spector);
        let bridge = spector_to_kohlenbach_bridge(&phi_s, 64);
        for ks in [vec![], vec![2], vec![1, 2]] {
            let f = Approximant::plus(&nums(&ks));
            let u = SpectorView { f: &f, search_cap: 64 };
            let caps = TreeCaps { depth: 6, window: 4, nodes: 5_000 };
            let k = explore_tree(&f, Flavor::Kohlenbach, caps).unwrap();
            let s = explore_tree(&u, Flavor::Spector, caps).unwrap();
            let sorted = |v: &[SeqCode]| {
                let mut v = v.to_vec();
                v.sort();
                v
            };
            assert_eq!(sorted(&k.leaves), sorted(&s.leaves));
            assert_eq!(sorted(&k.internal), sorted(&s.internal));
            for x in k.members() {
                for g in [&GZero as &dyn Functional, &denote(&g_two_term()).unwrap()] {
                    assert_eq!(bridge(&f, g, x).unwrap(), reference_phi(&f, g, x, Flavor::Kohlenbach).unwrap());
                }
            }
        }
        let zero = HostFunctional(|_: HostFn<'_>| Ok(BigUint::zero()));
        assert_eq!(bridge(&zero, &GZero, &SeqCode::empty()).unwrap(), b(1));
    }

    #[test]
    fn bridge_term_conforms() {
        let t = bridge_term(&simplified_br(Flavor::Spector)).unwrap();
        let p = denote(&t).unwrap();
        let battery = standard_battery().unwrap();
        let r = conformance_check(&p, &battery, Flavor::Kohlenbach, TreeCaps { depth: 6, window: 2, nodes: 2_000 }).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
    }
}
