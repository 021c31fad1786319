//! Call-by-name small-step reduction.
//!
//! The machine keeps the term as a focus plus a stack of evaluation-context
//! frames. Descending into a context is free; only contractions of a basic
//! rule count as steps, so the step count is exactly the length of the
//! reduction sequence.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lang::LangTag;
use crate::library;
use crate::term::{ap, aps, c, fresh_name, subst, v, Const, LibFn, Term, TermKind, Var};
use crate::types::Type;

/// Default step budget.
pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Rule {
    Fst,
    Snd,
    Beta,
    Suc,
    PreSucc,
    PreZero,
    IfzeroZero,
    IfzeroSucc,
    Y,
    While,
    RecZero,
    RecSucc,
    Min,
    Byval,
    RecStrZero,
    RecStrSucc,
    WhileStr,
    Lib(LibFn),
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Fst => "fst",
            Rule::Snd => "snd",
            Rule::Beta => "beta",
            Rule::Suc => "suc",
            Rule::PreSucc => "pre-succ",
            Rule::PreZero => "pre-zero",
            Rule::IfzeroZero => "ifzero-zero",
            Rule::IfzeroSucc => "ifzero-succ",
            Rule::Y => "Y",
            Rule::While => "while",
            Rule::RecZero => "rec-zero",
            Rule::RecSucc => "rec-succ",
            Rule::Min => "min",
            Rule::Byval => "byval",
            Rule::RecStrZero => "rec-str-zero",
            Rule::RecStrSucc => "rec-str-succ",
            Rule::WhileStr => "while-str",
            Rule::Lib(l) => return write!(f, "lib-{}", l.name()),
        };
        f.write_str(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Outcome {
    Value(BigUint),
    FuelExhausted { consumed: u64 },
    Stuck(String),
}

impl Outcome {
    pub fn value(&self) -> Option<&BigUint> {
        match self {
            Outcome::Value(n) => Some(n),
            _ => None,
        }
    }

    /// Equal numerals, or both without a value within fuel.
    pub fn agrees(&self, other: &Outcome) -> bool {
        match (self, other) {
            (Outcome::Value(a), Outcome::Value(b)) => a == b,
            (Outcome::FuelExhausted { .. }, Outcome::FuelExhausted { .. }) => true,
            (Outcome::Stuck(_), Outcome::Stuck(_)) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(n) => write!(f, "{n}"),
            Outcome::FuelExhausted { consumed } => write!(f, "fuel exhausted after {consumed} steps"),
            Outcome::Stuck(r) => write!(f, "stuck: {r}"),
        }
    }
}

/// One reduction step: the term reached, the rule used, and the evaluation
/// context (outermost frame first) in which the redex sat.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub term: Term,
    pub rule: Rule,
    pub context: Vec<&'static str>,
}

#[derive(Clone, Debug)]
pub struct StepTrace {
    /// Recorded only by [`trace`]; [`evaluate`] leaves it empty.
    pub steps: Vec<TraceStep>,
    pub consumed: u64,
    pub outcome: Outcome,
}

#[derive(Clone)]
enum Frame {
    Arg(Term),
    Suc,
    Pre,
    Ifz(Type),
    Fst,
    Snd,
    /// `rec X F [-]` or `rec^str X F [-]`.
    Rec { k: Const, x: Term, f: Term },
    Min { f: Term },
    Byval { k: Const, f: Term, xs: Vec<Term> },
    Lib { f: LibFn, args: Vec<Term>, vals: Vec<Option<BigUint>>, pos: usize },
}

impl Frame {
    fn name(&self) -> &'static str {
        match self {
            Frame::Arg(_) => "app",
            Frame::Suc => "suc",
            Frame::Pre => "pre",
            Frame::Ifz(_) => "ifzero",
            Frame::Fst => "fst",
            Frame::Snd => "snd",
            Frame::Rec { k: Const::RecStr(_), .. } => "rec-str",
            Frame::Rec { .. } => "rec",
            Frame::Min { .. } => "min",
            Frame::Byval { .. } => "byval",
            Frame::Lib { f, .. } => f.name(),
        }
    }

    fn plug(&self, t: Term) -> Term {
        let app = Term::app_unchecked;
        match self {
            Frame::Arg(a) => app(t, a.clone()),
            Frame::Suc => app(c(Const::Suc), t),
            Frame::Pre => app(c(Const::Pre), t),
            Frame::Ifz(s) => app(c(Const::Ifzero(s.clone())), t),
            Frame::Fst => Term::fst(t).expect("product in fst context"),
            Frame::Snd => Term::snd(t).expect("product in snd context"),
            Frame::Rec { k, x, f } => app(app(app(c(k.clone()), x.clone()), f.clone()), t),
            Frame::Min { f } => app(app(c(Const::Min), f.clone()), t),
            Frame::Byval { k, f, xs } => {
                let head = xs.iter().fold(app(c(k.clone()), f.clone()), |acc, x| app(acc, x.clone()));
                app(head, t)
            }
            Frame::Lib { f, args, pos, .. } => {
                let mut out = c(Const::Lib(*f));
                for (i, a) in args.iter().enumerate() {
                    out = app(out, if i == *pos { t.clone() } else { a.clone() });
                }
                out
            }
        }
    }
}

fn plug_all(focus: &Term, stack: &[Frame]) -> Term {
    stack.iter().rev().fold(focus.clone(), |t, fr| fr.plug(t))
}

enum Halt {
    Value(BigUint),
    /// A normal form that is not a numeral (a function or pair value).
    Normal,
    Stuck(String),
    Fuel,
}

struct Machine {
    focus: Term,
    stack: Vec<Frame>,
    steps: u64,
    fuel: u64,
}

/// `byval_[σ]` at result type `ρ`, of type `(σ → ρ) → σ → ρ`, for `σ` of
/// level 0: `byval^ε_ρ` at `nat`, and componentwise at products.
pub fn byval_composite(sigma: &Type, rho: &Type) -> Term {
    match sigma {
        Type::Nat => c(Const::Byval(Vec::new(), rho.clone())),
        Type::Product(s1, s2) => {
            let f = Var::new("f", Type::arrow(sigma.clone(), rho.clone()));
            let x = Var::new("x", sigma.clone());
            let y = Var::new("y", (**s1).clone());
            let z = Var::new("z", (**s2).clone());
            let inner = Term::lam(
                y.clone(),
                aps(
                    &byval_composite(s2, rho),
                    &[
                        Term::lam(z.clone(), ap(&v(&f), &Term::pair(v(&y), v(&z)))),
                        Term::snd(v(&x)).expect("product"),
                    ],
                ),
            );
            let body = aps(&byval_composite(s1, rho), &[inner, Term::fst(v(&x)).expect("product")]);
            Term::lams(&[f, x], body)
        }
        Type::Arrow(..) => panic!("byval_[σ] needs σ of level 0, got {sigma}"),
    }
}

fn fresh_var(base: &str, ty: &Type, avoid: &[&Term]) -> Var {
    let name = fresh_name(base, &|s| avoid.iter().any(|t| t.free_vars().iter().any(|w| &*w.name == s)));
    Var { name, ty: ty.clone() }
}

/// `λx^σ y^σ. x` or `λx^σ y^σ. y`.
fn selector(sigma: &Type, first: bool) -> Term {
    let x = Var::new("x", sigma.clone());
    let y = Var::new("y", sigma.clone());
    let body = if first { v(&x) } else { v(&y) };
    Term::lams(&[x, y], body)
}

impl Machine {
    fn new(t: &Term, fuel: u64) -> Machine {
        Machine { focus: t.clone(), stack: Vec::new(), steps: 0, fuel }
    }

    fn context(&self) -> Vec<&'static str> {
        self.stack.iter().map(Frame::name).collect()
    }

    fn term(&self) -> Term {
        plug_all(&self.focus, &self.stack)
    }

    /// Number of `Arg` frames on top of the stack.
    fn args_available(&self) -> usize {
        self.stack.iter().rev().take_while(|f| matches!(f, Frame::Arg(_))).count()
    }

    fn pop_args(&mut self, n: usize) -> Vec<Term> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            match self.stack.pop() {
                Some(Frame::Arg(a)) => out.push(a),
                _ => unreachable!("checked by args_available"),
            }
        }
        out
    }

    fn run(&mut self, on_step: &mut dyn FnMut(&Machine, Rule)) -> Halt {
        macro_rules! fire {
            ($rule:expr, $body:expr) => {{
                if self.steps == self.fuel {
                    return Halt::Fuel;
                }
                $body;
                self.steps += 1;
                on_step(self, $rule);
            }};
        }
        loop {
            let focus = self.focus.clone();
            match focus.kind() {
                TermKind::App(f, a) => {
                    self.stack.push(Frame::Arg(a.clone()));
                    self.focus = f.clone();
                }
                TermKind::Fst(p) => {
                    self.stack.push(Frame::Fst);
                    self.focus = p.clone();
                }
                TermKind::Snd(p) => {
                    self.stack.push(Frame::Snd);
                    self.focus = p.clone();
                }
                TermKind::Var(x) => return Halt::Stuck(format!("free variable {} in head position", x.name)),
                TermKind::Lam(x, b) => match self.stack.last() {
                    Some(Frame::Arg(_)) => {
                        if self.steps == self.fuel {
                            return Halt::Fuel;
                        }
                        let a = self.pop_args(1).pop().expect("one");
                        fire!(Rule::Beta, self.focus = subst(b, x, &a));
                    }
                    None => return Halt::Normal,
                    Some(_) => return Halt::Stuck("abstraction in a ground context".into()),
                },
                TermKind::Pair(..) if self.steps == self.fuel && matches!(self.stack.last(), Some(Frame::Fst | Frame::Snd)) => {
                    return Halt::Fuel;
                }
                TermKind::Pair(l, r) => match self.stack.last() {
                    Some(Frame::Fst) => {
                        self.stack.pop();
                        fire!(Rule::Fst, self.focus = l.clone());
                    }
                    Some(Frame::Snd) => {
                        self.stack.pop();
                        fire!(Rule::Snd, self.focus = r.clone());
                    }
                    None => return Halt::Normal,
                    Some(_) => return Halt::Stuck("pair in a non-projection context".into()),
                },
                TermKind::Num(k) => {
                    let frame = match self.stack.pop() {
                        None => return Halt::Value(k.clone()),
                        Some(fr) => fr,
                    };
                    if let Err(h) = self.numeral_into(k, frame, on_step) {
                        return h;
                    }
                }
                TermKind::Const(k) => {
                    let need = k.rule_arity();
                    if self.args_available() < need {
                        return if self.stack.iter().all(|f| matches!(f, Frame::Arg(_))) {
                            Halt::Normal
                        } else {
                            Halt::Stuck("partially applied constant in a ground context".into())
                        };
                    }
                    let fires_now = match k {
                        Const::Y(_) | Const::While(_) | Const::WhileStr(_) => true,
                        Const::Lib(lf) => {
                            let n = self.stack.len();
                            let vals: Vec<Option<BigUint>> = self.stack[n - need..]
                                .iter()
                                .rev()
                                .map(|f| match f {
                                    Frame::Arg(a) => a.as_num().cloned(),
                                    _ => None,
                                })
                                .collect();
                            library::next_arg(*lf, &vals).is_none()
                        }
                        _ => false,
                    };
                    if fires_now && self.steps == self.fuel {
                        return Halt::Fuel;
                    }
                    let args = self.pop_args(need);
                    match k {
                        Const::Suc => {
                            self.stack.push(Frame::Suc);
                            self.focus = args[0].clone();
                        }
                        Const::Pre => {
                            self.stack.push(Frame::Pre);
                            self.focus = args[0].clone();
                        }
                        Const::Ifzero(s) => {
                            self.stack.push(Frame::Ifz(s.clone()));
                            self.focus = args[0].clone();
                        }
                        Const::Y(_) => {
                            let yf = ap(&focus, &args[0]);
                            fire!(Rule::Y, self.focus = ap(&args[0], &yf));
                        }
                        Const::While(s) => {
                            let (cc, x, f) = (&args[0], &args[1], &args[2]);
                            let again = aps(&focus, &[cc.clone(), ap(f, x), f.clone()]);
                            let r = aps(&c(Const::Ifzero(s.clone())), &[ap(cc, x), again, x.clone()]);
                            fire!(Rule::While, self.focus = r);
                        }
                        Const::WhileStr(s) => {
                            let (cc, x, f) = (&args[0], &args[1], &args[2]);
                            let x1 = fresh_var("x", s, &[cc, f]);
                            let again = aps(&focus, &[cc.clone(), ap(f, &v(&x1)), f.clone()]);
                            let body = aps(&c(Const::Ifzero(s.clone())), &[ap(cc, &v(&x1)), again, v(&x1)]);
                            let r = aps(&byval_composite(s, s), &[Term::lam(x1, body), x.clone()]);
                            fire!(Rule::WhileStr, self.focus = r);
                        }
                        Const::Rec(_) | Const::RecStr(_) => {
                            self.stack.push(Frame::Rec { k: k.clone(), x: args[0].clone(), f: args[1].clone() });
                            self.focus = args[2].clone();
                        }
                        Const::Min => {
                            self.stack.push(Frame::Min { f: args[0].clone() });
                            self.focus = args[1].clone();
                        }
                        Const::Byval(ss, _) => {
                            let xs = args[1..=ss.len()].to_vec();
                            self.stack.push(Frame::Byval { k: k.clone(), f: args[0].clone(), xs });
                            self.focus = args[need - 1].clone();
                        }
                        Const::Lib(lf) => {
                            let vals: Vec<Option<BigUint>> = args.iter().map(|a| a.as_num().cloned()).collect();
                            match library::next_arg(*lf, &vals) {
                                None => fire!(Rule::Lib(*lf), self.focus = Term::num(library::compute(*lf, &vals))),
                                Some(pos) => {
                                    self.focus = args[pos].clone();
                                    self.stack.push(Frame::Lib { f: *lf, args, vals, pos });
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// A numeral has reached `frame` (already popped).
    fn numeral_into(&mut self, k: &BigUint, frame: Frame, on_step: &mut dyn FnMut(&Machine, Rule)) -> std::result::Result<(), Halt> {
        macro_rules! fire {
            ($rule:expr, $body:expr) => {{
                if self.steps == self.fuel {
                    self.stack.push(frame);
                    return Err(Halt::Fuel);
                }
                $body;
                self.steps += 1;
                on_step(self, $rule);
            }};
        }
        let pred = |k: &BigUint| Term::num(k - BigUint::one());
        match &frame {
            Frame::Suc => fire!(Rule::Suc, self.focus = Term::num(k + BigUint::one())),
            Frame::Pre => {
                if k.is_zero() {
                    fire!(Rule::PreZero, self.focus = Term::num(0u32))
                } else {
                    fire!(Rule::PreSucc, self.focus = pred(k))
                }
            }
            Frame::Ifz(s) => {
                if k.is_zero() {
                    fire!(Rule::IfzeroZero, self.focus = selector(s, true))
                } else {
                    fire!(Rule::IfzeroSucc, self.focus = selector(s, false))
                }
            }
            Frame::Rec { k: rk, x, f } => {
                let strict = matches!(rk, Const::RecStr(_));
                if k.is_zero() {
                    let rule = if strict { Rule::RecStrZero } else { Rule::RecZero };
                    fire!(rule, self.focus = x.clone());
                } else {
                    let nm = pred(k);
                    let rec_n = aps(&c(rk.clone()), &[x.clone(), f.clone(), nm.clone()]);
                    if strict {
                        let sigma = x.ty().clone();
                        let m = fresh_var("m", &sigma, &[f]);
                        let g = Term::lam(m.clone(), aps(f, &[v(&m), nm]));
                        fire!(Rule::RecStrSucc, self.focus = aps(&byval_composite(&sigma, &sigma), &[g, rec_n]));
                    } else {
                        fire!(Rule::RecSucc, self.focus = aps(f, &[rec_n, nm]));
                    }
                }
            }
            Frame::Min { f } => {
                let n = Term::num(k.clone());
                let next = aps(&c(Const::Min), &[f.clone(), ap(&c(Const::Suc), &n)]);
                fire!(Rule::Min, self.focus = aps(&c(Const::ifzero()), &[ap(f, &n), n.clone(), next]));
            }
            Frame::Byval { f, xs, .. } => {
                let mut all = xs.clone();
                all.push(Term::num(k.clone()));
                fire!(Rule::Byval, self.focus = aps(f, &all));
            }
            Frame::Lib { f, args, vals, pos } => {
                let mut args = args.clone();
                let mut vals = vals.clone();
                args[*pos] = Term::num(k.clone());
                vals[*pos] = Some(k.clone());
                match library::next_arg(*f, &vals) {
                    None => fire!(Rule::Lib(*f), self.focus = Term::num(library::compute(*f, &vals))),
                    Some(p) => {
                        self.focus = args[p].clone();
                        self.stack.push(Frame::Lib { f: *f, args, vals, pos: p });
                    }
                }
            }
            Frame::Arg(_) | Frame::Fst | Frame::Snd => {
                self.stack.push(frame);
                return Err(Halt::Stuck("numeral in a function or projection context".into()));
            }
        }
        Ok(())
    }
}

/// The unique successor of `m`, or `None` if `m` is a normal form.
pub fn step(m: &Term, lang: LangTag) -> Result<Option<(Term, Rule)>> {
    lang.check(m)?;
    Ok(step_unchecked(m))
}

pub(crate) fn step_unchecked(m: &Term) -> Option<(Term, Rule)> {
    let mut mach = Machine::new(m, 1);
    let mut fired = None;
    mach.run(&mut |_, r| fired = Some(r));
    fired.map(|r| (mach.term(), r))
}

fn outcome_of(h: Halt, steps: u64, ty: &Type) -> Outcome {
    match h {
        Halt::Value(n) => Outcome::Value(n),
        Halt::Fuel => Outcome::FuelExhausted { consumed: steps },
        Halt::Stuck(r) => Outcome::Stuck(r),
        Halt::Normal => Outcome::Stuck(format!("normal form of type {ty} is not a numeral")),
    }
}

fn check_eval(m: &Term, lang: LangTag, fuel: u64) -> Result<()> {
    if fuel == 0 {
        return Err(Error::ZeroFuel);
    }
    if !m.ty().is_nat() {
        return Err(Error::Type { msg: format!("evaluation needs a program of type nat, not {}", m.ty()), subterm: m.to_string() });
    }
    lang.check(m)
}

/// Runs `m` to a numeral or until `fuel` steps have been taken.
pub fn evaluate(m: &Term, lang: LangTag, fuel: u64) -> Result<StepTrace> {
    check_eval(m, lang, fuel)?;
    Ok(evaluate_unchecked(m, fuel))
}

pub(crate) fn evaluate_unchecked(m: &Term, fuel: u64) -> StepTrace {
    let mut mach = Machine::new(m, fuel);
    let h = mach.run(&mut |_, _| {});
    StepTrace { steps: Vec::new(), consumed: mach.steps, outcome: outcome_of(h, mach.steps, m.ty()) }
}

/// As [`evaluate`], recording every intermediate term.
pub fn trace(m: &Term, lang: LangTag, fuel: u64) -> Result<StepTrace> {
    check_eval(m, lang, fuel)?;
    Ok(trace_unchecked(m, fuel))
}

pub(crate) fn trace_unchecked(m: &Term, fuel: u64) -> StepTrace {
    let mut mach = Machine::new(m, fuel);
    let mut steps = Vec::new();
    // After a contraction the frames left on the stack are exactly the
    // evaluation context the redex sat in.
    let h = mach.run(&mut |mm, rule| {
        steps.push(TraceStep { term: mm.term(), rule, context: mm.context() });
    });
    StepTrace { steps, consumed: mach.steps, outcome: outcome_of(h, mach.steps, m.ty()) }
}

/// Reduces `m` (of any type) until it is a normal form or fuel runs out.
/// Returns the final term and whether it is normal.
pub fn normalize_to_value(m: &Term, fuel: u64) -> (Term, bool) {
    let mut mach = Machine::new(m, fuel);
    let h = mach.run(&mut |_, _| {});
    (mach.term(), !matches!(h, Halt::Fuel))
}

/// A tuple of closed arguments on which two terms give different ground results.
#[derive(Clone, Debug)]
pub struct Witness {
    pub args: Vec<Term>,
    pub left: Outcome,
    pub right: Outcome,
}

/// Searches `corpus` (tuples of closed arguments) for one on which `m` and
/// `m2` differ. `None` is bounded evidence of equivalence, not a proof.
pub fn observationally_distinct_witness(
    m: &Term,
    m2: &Term,
    lang: LangTag,
    corpus: &[Vec<Term>],
    fuel: u64,
) -> Result<Option<Witness>> {
    if m.ty() != m2.ty() {
        return Err(Error::Type { msg: format!("comparing terms of types {} and {}", m.ty(), m2.ty()), subterm: m2.to_string() });
    }
    lang.check(m)?;
    lang.check(m2)?;
    for args in corpus {
        let a = Term::apps(m.clone(), args.iter().cloned())?;
        let b = Term::apps(m2.clone(), args.iter().cloned())?;
        if !a.ty().is_nat() {
            return Err(Error::Type { msg: "argument tuple does not reach type nat".into(), subterm: a.to_string() });
        }
        let left = evaluate_unchecked(&a, fuel).outcome;
        let right = evaluate_unchecked(&b, fuel).outcome;
        if !left.agrees(&right) {
            return Ok(Some(Witness { args: args.clone(), left, right }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn ev(s: &str, lang: LangTag) -> Outcome {
        evaluate(&parse(s).unwrap(), lang, 10_000).unwrap().outcome
    }

    #[test]
    fn basic_rules() {
        let (t, r) = step(&parse("(ifzero 0)").unwrap(), LangTag::B).unwrap().unwrap();
        assert_eq!(r, Rule::IfzeroZero);
        assert!(t.alpha_eq(&parse("(lam (x nat) (y nat) x)").unwrap()));
        let (t, r) = step(&parse("(pre 0)").unwrap(), LangTag::B).unwrap().unwrap();
        assert_eq!(r, Rule::PreZero);
        assert!(t.alpha_eq(&parse("0").unwrap()));
        assert!(step(&parse("7").unwrap(), LangTag::B).unwrap().is_none());
    }

    #[test]
    fn while_rule_instance() {
        let m = parse("((while nat) (lam (x nat) x) 3 (lam (x nat) (suc x)))").unwrap();
        let (t, r) = step(&m, LangTag::W).unwrap().unwrap();
        assert_eq!(r, Rule::While);
        let expect = parse(
            "(ifzero ((lam (x nat) x) 3) ((while nat) (lam (x nat) x) ((lam (x nat) (suc x)) 3) (lam (x nat) (suc x))) 3)",
        )
        .unwrap();
        assert!(t.alpha_eq(&expect));
        assert_eq!(ev("((while nat) (lam (x nat) x) 3 (lam (x nat) (suc x)))", LangTag::W), Outcome::Value(3u32.into()));
    }

    #[test]
    fn values_and_divergence() {
        assert_eq!(ev("(min (lam (x nat) 0) 5)", LangTag::T_MIN), Outcome::Value(5u32.into()));
        assert!(matches!(ev("((Y nat) (lam (x nat) x))", LangTag::PCF), Outcome::FuelExhausted { .. }));
        assert_eq!(ev("((rec nat) 0 (lam (x nat) (n nat) (suc x)) 3)", LangTag::T), Outcome::Value(3u32.into()));
    }

    #[test]
    fn strict_recursion_and_products() {
        assert_eq!(ev("((rec-str nat) 0 (lam (x nat) (n nat) (suc x)) 3)", LangTag::T0_STR), Outcome::Value(3u32.into()));
        let swap = "((rec-str (* nat nat)) (pair 1 2) (lam (p (* nat nat)) (n nat) (pair (snd p) (fst p))) 3)";
        assert_eq!(ev(&format!("(fst {swap})"), LangTag::T0_STR), Outcome::Value(2u32.into()));
        let w = "((while-str nat) (lam (x nat) (ifzero (pre (pre (pre x))) 0 1)) 0 suc)";
        assert_eq!(ev(w, LangTag::W0_STR), Outcome::Value(4u32.into()));
    }

    #[test]
    fn byval_composite_types() {
        let p = Type::product(Type::Nat, Type::product(Type::Nat, Type::Nat));
        let b = byval_composite(&p, &p);
        assert_eq!(b.ty(), &Type::arrows([Type::arrow(p.clone(), p.clone()), p.clone()], p.clone()));
        assert!(LangTag::T0_STR.contains(&b));
    }

    #[test]
    fn fuel_and_type_errors() {
        let m = parse("3").unwrap();
        assert_eq!(evaluate(&m, LangTag::B, 0).unwrap_err(), Error::ZeroFuel);
        assert!(evaluate(&parse("suc").unwrap(), LangTag::B, 10).is_err());
        let t = evaluate(&parse("(suc (suc 0))").unwrap(), LangTag::B, 1).unwrap();
        assert_eq!(t.outcome, Outcome::FuelExhausted { consumed: 1 });
    }

    #[test]
    fn traces_record_terms() {
        let t = trace(&parse("(suc (pre 2))").unwrap(), LangTag::B, 100).unwrap();
        assert_eq!(t.steps.len(), 2);
        assert_eq!(t.steps[0].rule, Rule::PreSucc);
        assert_eq!(t.steps[0].context, vec!["suc"]);
        assert!(t.steps[0].term.alpha_eq(&parse("(suc 1)").unwrap()));
        assert_eq!(t.outcome, Outcome::Value(2u32.into()));
    }

    #[test]
    fn library_constants_step_once() {
        let t = trace(&parse("(plus 2 (suc 3))").unwrap(), LangTag::T, 100).unwrap();
        let rules: Vec<Rule> = t.steps.iter().map(|s| s.rule).collect();
        assert_eq!(rules, vec![Rule::Suc, Rule::Lib(LibFn::Plus)]);
        assert_eq!(ev("(basic 3 ((Y nat) (lam (x nat) x)) 0)", LangTag::PCF), Outcome::Value(1u32.into()));
    }
}
