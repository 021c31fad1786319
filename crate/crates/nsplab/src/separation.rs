//! Counterexample synthesis against candidate bar recursors.
//!
//! A candidate `Ψ : 2 → 2 → 1` whose denotation is left well-founded is run
//! symbolically on free `F` and `G`. Recording every oracle call along the
//! way, and the calls made inside the arguments of those calls, yields a
//! finite analysis of how `Ψ` uses its arguments under `F⁺_w` and `G₀`. From
//! it we build `F_∞` and a functional `G₁` on which `Ψ` still returns the old
//! value `c` while the true bar recursor returns a fresh value `K`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::barrec::{reference_phi, Approximant, Flavor, Functional, GZero, HostFn};
use crate::error::{Error, Result};
use crate::nsp::{
    apply_budget, denote, eta_expand, instantiate, lwf_language, lwf_probe, Branches, ExplorationBudget, Expr,
    LwfVerdict, NVar, Procedure, DEFAULT_STEPS,
};
use crate::seqcode::{odd_part, SeqCode};
use crate::syntax::parse;
use crate::term::Term;
use crate::types::Type;

pub const REPORT_SCHEMA: &str = "nsplab.separation/1";

/// The type `2 → 2 → 1` of candidates.
pub fn candidate_type() -> Type {
    Type::arrows([Type::pure(2), Type::pure(2), Type::Nat], Type::Nat)
}

#[derive(Clone, Debug)]
pub struct SeparationOptions {
    /// Levels of subcomputation analysed before giving up.
    pub depth_cap: usize,
    /// Step budget per NSP node.
    pub steps: u64,
    /// Largest modulus tried on the doubling schedule.
    pub k_cap: u64,
    /// Nesting bound for the LWF probe on raw candidates.
    pub lwf_bound: usize,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        SeparationOptions { depth_cap: 8, steps: DEFAULT_STEPS, k_cap: 1 << 16, lwf_bound: 6 }
    }
}

/// A candidate admitted for analysis, with the reason it is LWF.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub procedure: Procedure,
    pub evidence: String,
}

/// Admits a closed term of type `2 → 2 → 1`. Terms of an LWF language are
/// accepted outright; anything else must pass the LWF probe.
pub fn admit_term(t: &Term, opts: &SeparationOptions) -> Result<Candidate> {
    check_type(t.ty())?;
    let p = denote(t)?;
    match lwf_language(t) {
        Some(lang) => Ok(Candidate { procedure: p, evidence: format!("denotation of a {lang} term") }),
        None => admit_procedure(p, opts),
    }
}

/// Admits a raw procedure, probing it for long nesting chains.
pub fn admit_procedure(p: Procedure, opts: &SeparationOptions) -> Result<Candidate> {
    check_type(p.ty())?;
    if let Some(why) = p.lwf_certificate() {
        let evidence = why.to_string();
        return Ok(Candidate { procedure: p, evidence });
    }
    let budget = ExplorationBudget::new(opts.steps.min(100_000), 4 * opts.lwf_bound + 8, 4)?;
    let r = lwf_probe(&p, opts.lwf_bound, &budget);
    match r.verdict {
        LwfVerdict::ChainFound(n) => Err(Error::Inapplicable(format!(
            "the candidate is not left well-founded: a chain of {n} nested applications exceeds the bound {}",
            opts.lwf_bound
        ))),
        LwfVerdict::CertifiedUpTo(b) => {
            Ok(Candidate { procedure: p, evidence: format!("no nesting chain longer than {b} found by the probe") })
        }
    }
}

fn check_type(ty: &Type) -> Result<()> {
    if *ty == candidate_type() {
        Ok(())
    } else {
        Err(Error::Type { msg: format!("candidates have type {}, found {ty}", candidate_type()), subterm: "candidate".into() })
    }
}

/// `Ψ_D`: the bar recursor unrolled `D` times, returning the leaf value
/// below that depth. It agrees with the genuine recursor on trees of height
/// at most `D` and is a term of T.
pub fn make_truncated_candidate(depth: u64) -> Term {
    let src = format!(
        "(lam (F (-> (-> nat nat) nat)) (G (-> (-> nat nat) nat))
           ((rec (-> nat nat))
             (lam (x nat) (suc (times 2 x)))
             (lam (r (-> nat nat)) (k nat)
               (lam (x nat)
                 (ifzero (neq (F (basic x 0)) (F (basic x 1)))
                   (G (lam (z nat) (r (add x z))))
                   (suc (times 2 x)))))
             {depth}))"
    );
    parse(&src).expect("truncated candidate")
}

/// LWF candidates on which separation must succeed.
pub fn regression_battery() -> Vec<(String, Term)> {
    let fg = "(F (-> (-> nat nat) nat)) (G (-> (-> nat nat) nat)) (x nat)";
    let mut v: Vec<(String, Term)> = [
        ("const7", "7"),
        ("g-identity", "(G (lam (z nat) z))"),
        ("f-only", "(F (lam (z nat) (suc z)))"),
        ("g-of-f", "(G (lam (z nat) (F (lam (i nat) (plus i z)))))"),
        ("f-then-g", "(ifzero (F (lam (i nat) 0)) (G (lam (z nat) (times 3 z))) (suc (G (lam (z nat) 1))))"),
        ("nested-g", "(G (lam (z nat) (G (lam (u nat) (plus z u)))))"),
    ]
    .iter()
    .map(|(n, body)| (n.to_string(), parse(&format!("(lam {fg} {body})")).expect("battery candidate")))
    .collect();
    for d in 0..=3 {
        v.push((format!("psi{d}"), make_truncated_candidate(d)));
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Oracle {
    F,
    G,
}

/// Where a subcomputation came from: entry `entry` of level `level`, applied to `z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Parent {
    pub level: usize,
    pub entry: usize,
    #[serde(serialize_with = "big::one")]
    pub z: BigUint,
}

/// One call `F(h)` or `G(h)` met while tracing.
#[derive(Clone, Debug)]
pub struct OracleTraceEntry {
    pub oracle: Oracle,
    pub level: usize,
    /// Position among the calls to the same oracle at this level.
    pub index: usize,
    pub parent: Option<Parent>,
    /// The argument, with `F` and `G` free.
    pub arg: Procedure,
    /// The answer under `F⁺_w` and `G₀`.
    pub outcome: BigUint,
    /// `h·z` for the recorded `z`: `z ≤ w` for `F` calls, `z < m^w` for `G` calls.
    pub values: Vec<BigUint>,
}

#[derive(Clone, Debug)]
pub struct LevelRecord {
    pub entries: Vec<OracleTraceEntry>,
    pub k: BigUint,
    pub m: BigUint,
}

impl LevelRecord {
    pub fn calls(&self, o: Oracle) -> impl Iterator<Item = &OracleTraceEntry> {
        self.entries.iter().filter(move |e| e.oracle == o)
    }

    pub fn count(&self, o: Oracle) -> usize {
        self.calls(o).count()
    }
}

/// A computation over `F`, `G` and the answers it got under `F⁺_w`, `G₀`.
#[derive(Clone, Debug)]
struct Computation {
    body: Expr,
    outcomes: Vec<BigUint>,
    result: BigUint,
}

/// A traced open computation.
#[derive(Clone, Debug)]
pub struct Trace {
    pub calls: Vec<(Oracle, Procedure, BigUint)>,
    pub result: BigUint,
}

/// `Ψ` applied to free `F`, `G` and `0`.
pub struct OpenCandidate {
    pub f: NVar,
    pub g: NVar,
    pub body: Procedure,
}

impl OpenCandidate {
    pub fn new(psi: &Procedure, steps: u64) -> Result<OpenCandidate> {
        check_type(psi.ty())?;
        let f = NVar::named("F", Type::pure(2));
        let g = NVar::named("G", Type::pure(2));
        let body = apply_budget(psi, &[eta_expand(&f), eta_expand(&g), Procedure::numeral(0u32)], steps)?;
        Ok(OpenCandidate { f, g, body })
    }
}

/// Runs an open computation of type `nat` against closed `F` and `G`,
/// recording each oracle call and its answer.
pub fn trace_open(
    body: &Expr,
    vars: (&NVar, &NVar),
    inst: (&Procedure, &Procedure),
    steps: u64,
) -> Result<Trace> {
    let mut calls = Vec::new();
    let mut cur = body.clone();
    loop {
        match cur {
            Expr::Num(n) => return Ok(Trace { calls, result: n }),
            Expr::Bot => return Err(Error::Inapplicable("a traced computation reaches ⊥".into())),
            Expr::Unresolved => return Err(Error::Inapplicable("a traced computation exceeds its step budget".into())),
            Expr::Case(node) => {
                let (oracle, head) = if node.head == *vars.0 {
                    (Oracle::F, inst.0)
                } else if node.head == *vars.1 {
                    (Oracle::G, inst.1)
                } else {
                    return Err(Error::Invariant(format!("unexpected free variable {:?} in a traced computation", node.head)));
                };
                let arg = node.args.first().cloned().ok_or_else(|| Error::Invariant("oracle call without argument".into()))?;
                let outcome = answer(head, &arg, vars, inst, steps)?;
                cur = node.branch(&outcome);
                calls.push((oracle, arg, outcome));
            }
        }
    }
}

fn answer(head: &Procedure, arg: &Procedure, vars: (&NVar, &NVar), inst: (&Procedure, &Procedure), steps: u64) -> Result<BigUint> {
    let closed = instantiate(arg, &[(vars.0.clone(), inst.0.clone()), (vars.1.clone(), inst.1.clone())], steps);
    let r = apply_budget(head, &[closed], steps)?;
    match r.body() {
        Expr::Num(n) => Ok(n.clone()),
        Expr::Bot => Err(Error::Inapplicable("an oracle call is ⊥".into())),
        Expr::Unresolved => Err(Error::Inapplicable("an oracle call exceeds its step budget".into())),
        Expr::Case(_) => Err(Error::Invariant("an instantiated oracle call is still open".into())),
    }
}

/// Traces `Ψ·F·G·0` for closed `F` and `G`.
pub fn trace_toplevel(psi: &Procedure, f: &Procedure, g: &Procedure, steps: u64) -> Result<Trace> {
    let open = OpenCandidate::new(psi, steps)?;
    trace_open(open.body.body(), (&open.f, &open.g), (f, g), steps)
}

/// Whether the computation follows the recorded path under `F`, `G`.
fn replays(c: &Computation, vars: (&NVar, &NVar), inst: (&Procedure, &Procedure), steps: u64) -> bool {
    let mut cur = c.body.clone();
    let mut i = 0;
    loop {
        match cur {
            Expr::Num(n) => return i == c.outcomes.len() && n == c.result,
            Expr::Bot | Expr::Unresolved => return false,
            Expr::Case(node) => {
                let head = if node.head == *vars.0 { inst.0 } else { inst.1 };
                let Some(expected) = c.outcomes.get(i) else { return false };
                match answer(head, &node.args[0], vars, inst, steps) {
                    Ok(a) if a == *expected => {}
                    _ => return false,
                }
                i += 1;
                cur = node.branch(expected);
            }
        }
    }
}

/// The outcome of the analysis.
pub struct AnalysisState {
    pub psi: Procedure,
    open: OpenCandidate,
    computations: Vec<Computation>,
    pub c: BigUint,
    pub levels: Vec<LevelRecord>,
    /// The level at which no further calls appeared.
    pub d: usize,
    pub f_inf: Approximant,
}

impl AnalysisState {
    pub fn ks(&self) -> Vec<BigUint> {
        self.levels.iter().map(|l| l.k.clone()).collect()
    }

    pub fn ms(&self) -> Vec<BigUint> {
        self.levels.iter().map(|l| l.m.clone()).collect()
    }

    /// `F_w`: the modulus-`k^w` truncation.
    pub fn f_trunc(&self, w: usize) -> Approximant {
        let ks = self.ks();
        Approximant::truncated(&ks[..w], &ks[w])
    }

    /// `F⁺_w`.
    pub fn f_plus(&self, w: usize) -> Approximant {
        Approximant::plus(&self.ks()[..w])
    }

    /// Every number recorded by the analysis.
    pub fn recorded_numbers(&self) -> Vec<BigUint> {
        let mut v = vec![self.c.clone()];
        for l in &self.levels {
            v.push(l.k.clone());
            v.push(l.m.clone());
            for e in &l.entries {
                v.push(e.outcome.clone());
                v.extend(e.values.iter().cloned());
            }
        }
        v
    }

    /// `{r^u_{i0} : u ≤ w}`.
    fn g_heads(&self, w: usize) -> BTreeSet<BigUint> {
        self.levels[..=w].iter().flat_map(|l| l.calls(Oracle::G).map(|e| e.values[0].clone())).collect()
    }

    /// `Σ_{u≤w} n^u`.
    fn g_total(&self, w: usize) -> usize {
        self.levels[..=w].iter().map(|l| l.count(Oracle::G)).sum()
    }

    /// The moduli inequalities and table shapes of the analysis.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |w: usize, what: &str| Err(Error::Invariant(format!("level {w}: {what}")));
        for (w, l) in self.levels.iter().enumerate() {
            if l.k.is_zero() {
                return fail(w, "k^w = 0");
            }
            if l.m < &l.k + BigUint::from(self.g_total(w) + w + 2) {
                return fail(w, "m^w < k^w + n^0 + … + n^w + w + 2");
            }
            if w > 0 && l.m < self.levels[w - 1].m {
                return fail(w, "m^w < m^{w-1}");
            }
            for e in &l.entries {
                let want = match e.oracle {
                    Oracle::F => w + 1,
                    Oracle::G => l.m.to_usize().unwrap_or(usize::MAX),
                };
                if e.level != w || e.values.len() != want || e.parent.is_none() != (w == 0) {
                    return fail(w, "malformed trace entry");
                }
            }
        }
        if self.d + 1 != self.levels.len() || self.f_inf != self.f_plus(self.d + 1) {
            return fail(self.d, "F_∞ is not F⁺_{d+1}");
        }
        Ok(())
    }

    /// Checks that `Ψ` under `(F_∞, G)` follows the recorded top-level path
    /// and that every recorded subcomputation keeps its value.
    pub fn secured_by(&self, g: &Procedure, steps: u64) -> Result<bool> {
        let f = self.f_inf.to_procedure();
        let vars = (&self.open.f, &self.open.g);
        if !replays(&self.computations[0], vars, (&f, g), steps) {
            return Ok(false);
        }
        for l in &self.levels {
            for e in &l.entries {
                for (z, v) in e.values.iter().enumerate() {
                    let sub = apply_budget(&e.arg, &[Procedure::numeral(z as u64)], steps)?;
                    let closed = instantiate(&sub, &[(self.open.f.clone(), f.clone()), (self.open.g.clone(), g.clone())], steps);
                    match closed.body() {
                        Expr::Num(n) if n == v => {}
                        _ => return Ok(false),
                    }
                }
            }
        }
        Ok(true)
    }
}

/// The least `k` on the doubling schedule for which `F_w` with modulus `k`
/// reproduces every computation recorded so far.
fn find_modulus(
    comps: &[Computation],
    open: &OpenCandidate,
    ks: &[BigUint],
    g0: &Procedure,
    opts: &SeparationOptions,
) -> Result<BigUint> {
    let mut k = 1u64;
    while k <= opts.k_cap {
        let fw = Approximant::truncated(ks, &BigUint::from(k)).to_procedure();
        if comps.iter().all(|c| replays(c, (&open.f, &open.g), (&fw, g0), opts.steps)) {
            return Ok(BigUint::from(k));
        }
        k *= 2;
    }
    Err(Error::Inapplicable(format!("no truncation modulus up to {} at level {}", opts.k_cap, ks.len())))
}

/// Runs the level-by-level analysis of `Ψ` under `F⁺_w` and `G₀`.
pub fn analyze(psi: &Procedure, opts: &SeparationOptions) -> Result<AnalysisState> {
    let open = OpenCandidate::new(psi, opts.steps)?;
    let g0 = GZero.to_procedure();
    let vars = (&open.f, &open.g);
    let top = trace_open(open.body.body(), vars, (&Approximant::plus(&[]).to_procedure(), &g0), opts.steps)?;
    let c = top.result.clone();
    let mut pending = entries_of(&top, 0, None);
    let mut computations = vec![Computation {
        body: open.body.body().clone(),
        outcomes: top.calls.iter().map(|t| t.2.clone()).collect(),
        result: top.result,
    }];
    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut ks: Vec<BigUint> = Vec::new();
    let mut g_total = 0usize;
    for w in 0.. {
        if w > opts.depth_cap {
            return Err(Error::DepthCap { cap: opts.depth_cap, what: "the analysis keeps finding nested oracle calls".into() });
        }
        let k = find_modulus(&computations, &open, &ks, &g0, opts)?;
        ks.push(k.clone());
        g_total += pending.iter().filter(|e| e.oracle == Oracle::G).count();
        let mut m = &k + BigUint::from(g_total + w + 2);
        if let Some(prev) = levels.last() {
            m = m.max(prev.m.clone());
        }
        let fplus = Approximant::plus(&ks).to_procedure();
        let mut next = Vec::new();
        for (i, e) in pending.iter_mut().enumerate() {
            let zs = match e.oracle {
                Oracle::F => w as u64 + 1,
                Oracle::G => m.to_u64().ok_or_else(|| Error::Inapplicable("m^w does not fit in 64 bits".into()))?,
            };
            for z in 0..zs {
                let sub = apply_budget(&e.arg, &[Procedure::numeral(z)], opts.steps)?;
                let t = trace_open(sub.body(), vars, (&fplus, &g0), opts.steps)?;
                e.values.push(t.result.clone());
                next.extend(entries_of(&t, w + 1, Some(Parent { level: w, entry: i, z: BigUint::from(z) })));
                computations.push(Computation {
                    body: sub.body().clone(),
                    outcomes: t.calls.iter().map(|c| c.2.clone()).collect(),
                    result: t.result,
                });
            }
        }
        levels.push(LevelRecord { entries: std::mem::take(&mut pending), k, m });
        if next.is_empty() {
            return Ok(AnalysisState {
                psi: psi.clone(),
                open,
                computations,
                c,
                levels,
                d: w,
                f_inf: Approximant::plus(&ks),
            });
        }
        renumber(&mut next);
        pending = next;
    }
    unreachable!()
}

fn entries_of(t: &Trace, level: usize, parent: Option<Parent>) -> Vec<OracleTraceEntry> {
    t.calls
        .iter()
        .map(|(o, arg, out)| OracleTraceEntry {
            oracle: *o,
            level,
            index: 0,
            parent: parent.clone(),
            arg: arg.clone(),
            outcome: out.clone(),
            values: Vec::new(),
        })
        .collect()
}

fn renumber(es: &mut [OracleTraceEntry]) {
    let (mut nf, mut ng) = (0, 0);
    for e in es {
        let n = match e.oracle {
            Oracle::F => &mut nf,
            Oracle::G => &mut ng,
        };
        e.index = *n;
        *n += 1;
    }
}

/// The path `x₀ … x_d` through `F_∞`, the values `y_w = Φ₀(x^w.0)` and the fresh value `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalNeighbourhood {
    #[serde(serialize_with = "big::many")]
    pub x: Vec<BigUint>,
    #[serde(serialize_with = "big::many")]
    pub y: Vec<BigUint>,
    #[serde(rename = "K", serialize_with = "big::one")]
    pub big_k: BigUint,
}

impl CriticalNeighbourhood {
    /// `x^w = ⟨x₀ … x_{w−1}⟩`.
    pub fn prefix(&self, w: usize) -> SeqCode {
        SeqCode::from_slice(&self.x[..w])
    }
}

/// Chooses the critical path greedily: each `x_w` is the least candidate in
/// `[k^w, m^w)` whose `y_{w+1}` avoids the recorded `G` heads and whose odd
/// part is new.
pub fn choose_critical_path(state: &AnalysisState) -> Result<CriticalNeighbourhood> {
    let phi0 = |x: &SeqCode| reference_phi(&state.f_inf, &GZero, x, Flavor::Kohlenbach);
    let mut x: Vec<BigUint> = Vec::new();
    let mut y = vec![phi0(&SeqCode::from_u64s(&[0]))?];
    for w in 0..=state.d {
        let l = &state.levels[w];
        let avoid = state.g_heads(w);
        let thetas: BTreeSet<BigUint> = y.iter().map(odd_part).collect();
        let forbidden = state.g_total(w) + w + 1;
        if &l.m - &l.k <= BigUint::from(forbidden) {
            return Err(Error::Invariant(format!("level {w}: interval [k, m) too narrow for {forbidden} exclusions")));
        }
        let mut xi = l.k.clone();
        let found = loop {
            if xi >= l.m {
                break None;
            }
            let mut path = x.clone();
            path.push(xi.clone());
            path.push(BigUint::zero());
            let yy = phi0(&SeqCode::from_slice(&path))?;
            if !avoid.contains(&yy) && !thetas.contains(&odd_part(&yy)) {
                break Some(yy);
            }
            xi += 1u32;
        };
        let yy = found.ok_or_else(|| Error::Invariant(format!("level {w}: no admissible x in [k, m)")))?;
        x.push(xi);
        y.push(yy);
    }
    let big_k = state.recorded_numbers().iter().chain(y.iter()).max().cloned().unwrap_or_default() + 1u32;
    if big_k == state.c {
        return Err(Error::Invariant("K coincides with c".into()));
    }
    Ok(CriticalNeighbourhood { x, y, big_k })
}

/// `G₁`: like `G₀` except on the critical path, where it answers `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GOne {
    pub x: Vec<BigUint>,
    pub y: Vec<BigUint>,
    pub big_k: BigUint,
}

impl GOne {
    pub fn new(cn: &CriticalNeighbourhood) -> GOne {
        GOne { x: cn.x.clone(), y: cn.y.clone(), big_k: cn.big_k.clone() }
    }

    fn d(&self) -> usize {
        self.x.len() - 1
    }

    /// Which path level `g(0) = i` points at, if any.
    fn lookup(&self, i: &BigUint) -> Option<usize> {
        (0..=self.d()).rev().find(|&u| self.y[u] == *i)
    }

    pub fn to_procedure(&self) -> Procedure {
        let me = self.clone();
        Procedure::build(Type::pure(2), move |ps| {
            let g = ps[0].clone();
            Expr::case(
                &g.clone(),
                vec![Procedure::numeral(0u32)],
                Branches::from_fn(move |i| {
                    if *i == me.y[me.d() + 1] {
                        return Expr::Num(me.big_k.clone());
                    }
                    match me.lookup(i) {
                        Some(u) => {
                            let (k, two_i) = (me.big_k.clone(), i * 2u32);
                            Expr::case(
                                &g,
                                vec![Procedure::numeral(me.x[u].clone())],
                                Branches::from_fn(move |j| Expr::Num(if *j == k { k.clone() } else { two_i.clone() })),
                            )
                        }
                        None => Expr::Num(i * 2u32),
                    }
                }),
            )
        })
    }

    /// A T₀^str term for `G₁`.
    pub fn to_term(&self) -> Term {
        let k = &self.big_k;
        let eq = |a: &str, b: &BigUint, then: String, other: String| format!("(ifzero (neq {a} {b}) {other} {then})");
        let mut body = "(times 2 i)".to_string();
        for u in 0..=self.d() {
            let inner = format!(
                "((byval () nat) (lam (j nat) {}) (g {}))",
                eq("j", k, k.to_string(), "(times 2 i)".into()),
                self.x[u]
            );
            body = eq("i", &self.y[u], inner, body);
        }
        body = eq("i", &self.y[self.d() + 1], k.to_string(), body);
        parse(&format!("(lam (g (-> nat nat)) ((byval () nat) (lam (i nat) {body}) (g 0)))")).expect("G1 term")
    }
}

impl Functional for GOne {
    fn call(&self, g: HostFn<'_>) -> Result<BigUint> {
        let i = g(&BigUint::zero())?;
        if i == self.y[self.d() + 1] {
            return Ok(self.big_k.clone());
        }
        match self.lookup(&i) {
            Some(u) => {
                let j = g(&self.x[u])?;
                Ok(if j == self.big_k { j } else { i * 2u32 })
            }
            None => Ok(i * 2u32),
        }
    }
}

/// A member of the class of functionals that agree with `G₀` on every
/// recorded constraint table: it returns `2g(0)` when `g(0)` is a recorded
/// head and otherwise something seeded.
#[derive(Clone, Debug)]
pub struct RandomMember {
    heads: BTreeSet<BigUint>,
    probe: u64,
    salt: u64,
    offset: u64,
}

impl RandomMember {
    pub fn new(state: &AnalysisState, seed: u64) -> RandomMember {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RandomMember {
            heads: state.g_heads(state.d),
            probe: rng.gen_range(0..8),
            salt: rng.gen_range(2..1000),
            offset: rng.gen_range(0..1000),
        }
    }

    fn other(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * self.salt + b + self.offset) % 1009u32 + 1u32
    }

    pub fn to_procedure(&self) -> Procedure {
        let me = self.clone();
        Procedure::build(Type::pure(2), move |ps| {
            let g = ps[0].clone();
            Expr::case(
                &g.clone(),
                vec![Procedure::numeral(0u32)],
                Branches::from_fn(move |a| {
                    if me.heads.contains(a) {
                        return Expr::Num(a * 2u32);
                    }
                    let (me, a) = (me.clone(), a.clone());
                    Expr::case(&g, vec![Procedure::numeral(me.probe)], Branches::from_fn(move |b| Expr::Num(me.other(&a, b))))
                }),
            )
        })
    }
}

impl Functional for RandomMember {
    fn call(&self, g: HostFn<'_>) -> Result<BigUint> {
        let a = g(&BigUint::zero())?;
        if self.heads.contains(&a) {
            return Ok(a * 2u32);
        }
        let b = g(&BigUint::from(self.probe))?;
        Ok(self.other(&a, &b))
    }
}

/// Everything needed to exhibit the separation.
pub struct CounterexamplePackage {
    pub state: AnalysisState,
    pub path: CriticalNeighbourhood,
    pub g1: GOne,
}

impl CounterexamplePackage {
    /// Path ranges, exclusions, θ-distinctness and the choice of `K`.
    pub fn check_invariants(&self) -> Result<()> {
        let st = &self.state;
        st.check_invariants()?;
        let p = &self.path;
        if p.x.len() != st.d + 1 || p.y.len() != st.d + 2 {
            return Err(Error::Invariant("critical path has the wrong length".into()));
        }
        for w in 0..=st.d {
            let l = &st.levels[w];
            if p.x[w] < l.k || p.x[w] >= l.m {
                return Err(Error::Invariant(format!("x_{w} outside [k^{w}, m^{w})")));
            }
            if st.g_heads(w).contains(&p.y[w + 1]) {
                return Err(Error::Invariant(format!("y_{} is a recorded G head", w + 1)));
            }
        }
        let thetas: BTreeSet<BigUint> = p.y.iter().map(odd_part).collect();
        if thetas.len() != p.y.len() {
            return Err(Error::Invariant("θ(y_u) not pairwise distinct".into()));
        }
        if st.recorded_numbers().iter().chain(&p.y).any(|n| *n >= p.big_k) {
            return Err(Error::Invariant("K is not larger than every recorded number".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationChecks {
    /// `G₁` returns `v^w_i` on every recorded constraint table.
    pub neighbourhood: bool,
    /// `Ψ·F_∞·G₁·0 = c`.
    pub psi_eval: bool,
    /// `Φ(F_∞, G₁)` equals `K` at the root and behaves as predicted along the path.
    pub phi_eval: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub schema: &'static str,
    #[serde(serialize_with = "big::one")]
    pub c: BigUint,
    pub d: usize,
    #[serde(serialize_with = "big::many")]
    pub k: Vec<BigUint>,
    #[serde(serialize_with = "big::many")]
    pub m: Vec<BigUint>,
    #[serde(serialize_with = "big::many")]
    pub x: Vec<BigUint>,
    #[serde(serialize_with = "big::many")]
    pub y: Vec<BigUint>,
    #[serde(rename = "K", serialize_with = "big::one")]
    pub big_k: BigUint,
    #[serde(serialize_with = "big::opt")]
    pub psi_result: Option<BigUint>,
    #[serde(serialize_with = "big::opt")]
    pub phi_result: Option<BigUint>,
    pub checks: SeparationChecks,
    pub pass: bool,
}

/// Analyses `Ψ` and builds `F_∞`, the critical path and `G₁`.
pub fn synthesize(psi: &Procedure, opts: &SeparationOptions) -> Result<CounterexamplePackage> {
    let state = analyze(psi, opts)?;
    let path = choose_critical_path(&state)?;
    let g1 = GOne::new(&path);
    let pkg = CounterexamplePackage { state, path, g1 };
    pkg.check_invariants()?;
    Ok(pkg)
}

/// Checks the package independently of how it was built.
pub fn verify_separation(pkg: &CounterexamplePackage, opts: &SeparationOptions) -> Result<SeparationReport> {
    let st = &pkg.state;
    let g1 = pkg.g1.to_procedure();

    let mut neighbourhood = true;
    for l in &st.levels {
        let m = l.m.to_usize().unwrap_or(usize::MAX);
        for e in l.calls(Oracle::G) {
            let table = |z: &BigUint| match z.to_usize() {
                Some(i) if i < m => Ok(e.values[i].clone()),
                _ => Err(Error::Undefined(format!("query {z} outside the constraint table"))),
            };
            neighbourhood &= matches!(g1.call(&table), Ok(v) if v == e.outcome);
        }
    }

    let fp = st.f_inf.to_procedure();
    let psi_result = apply_budget(&st.psi, &[fp, g1, Procedure::numeral(0u32)], opts.steps)?.body().as_num().cloned();
    let psi_eval = psi_result.as_ref() == Some(&st.c);

    let phi1 = |x: &SeqCode| reference_phi(&st.f_inf, &pkg.g1, x, Flavor::Kohlenbach).ok();
    let phi_result = phi1(&SeqCode::empty());
    let k = &pkg.path.big_k;
    let mut phi_eval = phi_result.as_ref() == Some(k);
    for w in 0..=st.d + 1 {
        let xw = pkg.path.prefix(w);
        phi_eval &= phi1(&xw.add_u64(0)).as_ref() == Some(&pkg.path.y[w]);
        phi_eval &= phi1(&xw).as_ref() == Some(k);
    }

    let checks = SeparationChecks { neighbourhood, psi_eval, phi_eval };
    let pass = neighbourhood && psi_eval && phi_eval && st.c != *k;
    Ok(SeparationReport {
        schema: REPORT_SCHEMA,
        c: st.c.clone(),
        d: st.d,
        k: st.ks(),
        m: st.ms(),
        x: pkg.path.x.clone(),
        y: pkg.path.y.clone(),
        big_k: k.clone(),
        psi_result,
        phi_result,
        checks,
        pass,
    })
}

/// Admission, analysis, synthesis and verification in one go.
pub fn separate(t: &Term, opts: &SeparationOptions) -> Result<SeparationReport> {
    let cand = admit_term(t, opts)?;
    let pkg = synthesize(&cand.procedure, opts)?;
    verify_separation(&pkg, opts)
}

/// `Ψ·F_∞·G₀·0` and `Φ(F_∞, G₀)`, which should both be `c`.
pub fn sanity_with_g0(pkg: &CounterexamplePackage, opts: &SeparationOptions) -> Result<(Option<BigUint>, Option<BigUint>)> {
    let st = &pkg.state;
    let psi = apply_budget(&st.psi, &[st.f_inf.to_procedure(), GZero.to_procedure(), Procedure::numeral(0u32)], opts.steps)?;
    let phi = reference_phi(&st.f_inf, &GZero, &SeqCode::empty(), Flavor::Kohlenbach).ok();
    Ok((psi.body().as_num().cloned(), phi))
}

/// Numbers as JSON numbers when they fit in 64 bits, strings otherwise.
mod big {
    use super::*;

    fn value(n: &BigUint) -> serde_json::Value {
        match n.to_u64() {
            Some(v) => v.into(),
            None => n.to_string().into(),
        }
    }

    pub fn one<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        value(n).serialize(s)
    }

    pub fn many<S: Serializer>(ns: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
        ns.iter().map(value).collect::<Vec<_>>().serialize(s)
    }

    pub fn opt<S: Serializer>(n: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
        n.as_ref().map(value).serialize(s)
    }
}
