//! Translations between the languages.
//!
//! * [`to_pcf`]: `while`, `rec`, `min` and their strict forms become
//!   PCF+byval programs that simulate each reduction step.
//! * [`t_min_to_w`], [`w_to_t_min`]: the two directions between T+min and W,
//!   faithful on ground results only.
//! * [`eliminate_products`]: a product-free term with the same ground
//!   behaviour.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lang::{Lang, LangTag};
use crate::reduce::{byval_composite, step_unchecked, trace_unchecked, Outcome};
use crate::syntax::parse_open;
use crate::term::{ap, aps, c, fresh_name, n, substitute_closed, v, Const, Term, TermKind, Var};
use crate::types::Type;

/// Instantiates a program template: `$S`, `$T`, … are replaced by types and
/// the free variables in `holes` by closed terms.
fn template(src: &str, types: &[(&str, &Type)], holes: &[(&str, Term)]) -> Term {
    let mut text = src.to_string();
    for (k, t) in types {
        text = text.replace(k, &t.to_string());
    }
    let scope: Vec<Var> = holes.iter().map(|(name, t)| Var::new(name, t.ty().clone())).collect();
    let open = parse_open(&text, &scope).unwrap_or_else(|e| panic!("template {src}: {e}"));
    let map: Vec<(Var, Term)> = scope.into_iter().zip(holes.iter().map(|(_, t)| t.clone())).collect();
    substitute_closed(&open, &map)
}

fn byval_plus(sigma: &Type) -> Const {
    let step = Type::arrows([sigma.clone(), Type::Nat], sigma.clone());
    Const::Byval(vec![sigma.clone(), step], sigma.clone())
}

/// `While°_σ`: a fixed point unrolling one loop iteration per `Y` step.
pub fn while_pcf(sigma: &Type) -> Term {
    let tau = Const::While(sigma.clone()).ty();
    template(
        "((Y $T) (lam (w $T) (c (-> $S nat)) (x $S) (f (-> $S $S)) ((ifzero $S) (c x) (w c (f x) f) x)))",
        &[("$T", &tau), ("$S", sigma)],
        &[],
    )
}

/// `Rec°_σ`.
pub fn rec_pcf(sigma: &Type) -> Term {
    let rho = Const::Rec(sigma.clone()).ty();
    template(
        "(BP ((Y $R) (lam (r $R) (x $S) (f (-> $S nat $S)) (n nat)
            ((ifzero $S) n x ((byval () $S) (lam (n1 nat) (f (BP r x f n1) n1)) (pre n))))))",
        &[("$R", &rho), ("$S", sigma)],
        &[("BP", c(byval_plus(sigma)))],
    )
}

/// `Min°`.
pub fn min_pcf() -> Term {
    template(
        "(BM ((Y (-> (-> nat nat) nat nat)) (lam (m (-> (-> nat nat) nat nat)) (f (-> nat nat)) (n nat)
            (ifzero (f n) n (BM m f (suc n))))))",
        &[],
        &[("BM", c(Const::Byval(vec![Type::pure(1)], Type::Nat)))],
    )
}

/// `rec^str_σ` in PCF+byval: as `Rec°_σ`, with the recursive value passed
/// through `byval_[σ]`.
pub fn rec_str_pcf(sigma: &Type) -> Term {
    let rho = Const::RecStr(sigma.clone()).ty();
    template(
        "(BP ((Y $R) (lam (r $R) (x $S) (f (-> $S nat $S)) (n nat)
            ((ifzero $S) n x ((byval () $S) (lam (n1 nat) (BV (lam (m $S) (f m n1)) (BP r x f n1))) (pre n))))))",
        &[("$R", &rho), ("$S", sigma)],
        &[("BP", c(byval_plus(sigma))), ("BV", byval_composite(sigma, sigma))],
    )
}

/// `while^str_σ` in PCF+byval.
pub fn while_str_pcf(sigma: &Type) -> Term {
    let tau = Const::WhileStr(sigma.clone()).ty();
    template(
        "((Y $T) (lam (w $T) (c (-> $S nat)) (x $S) (f (-> $S $S))
            (BV (lam (x1 $S) ((ifzero $S) (c x1) (w c (f x1) f) x1)) x)))",
        &[("$T", &tau), ("$S", sigma)],
        &[("BV", byval_composite(sigma, sigma))],
    )
}

fn check_source(m: &Term, source: LangTag, allowed: &[Lang]) -> Result<()> {
    if !allowed.contains(&source.lang) {
        return Err(Error::Inapplicable(format!("no translation from {source}")));
    }
    source.check(m)
}

/// `M°`: replaces each loop, recursor and minimization constant by its
/// PCF+byval program. The result is in PCF+byval and has the same type.
pub fn to_pcf(m: &Term, source: LangTag) -> Result<Term> {
    use Lang::*;
    check_source(m, source, &[B, Pcf, PcfByval, T, TMin, W, T0Str, T0StrMin, W0Str])?;
    Ok(to_pcf_unchecked(m))
}

pub(crate) fn to_pcf_unchecked(m: &Term) -> Term {
    let mut cache: HashMap<Const, Term> = HashMap::new();
    let table = std::cell::RefCell::new(&mut cache);
    m.map_consts(&|k| {
        let mut t = table.borrow_mut();
        if let Some(r) = t.get(k) {
            return Some(r.clone());
        }
        let r = match k {
            Const::While(s) => while_pcf(s),
            Const::Rec(s) => rec_pcf(s),
            Const::Min => min_pcf(),
            Const::RecStr(s) => rec_str_pcf(s),
            Const::WhileStr(s) => while_str_pcf(s),
            _ => return None,
        };
        t.insert(k.clone(), r.clone());
        Some(r)
    })
}

/// Inequality as a W program: counts both arguments down together.
/// Like `neq`, it returns 0 when the arguments differ.
pub fn neq_w() -> Term {
    template(
        "(lam (a nat) (b nat)
           ((lam (r (* nat nat)) (ifzero (fst r) (ifzero (snd r) 1 0) 0))
            ((while (* nat nat)) (lam (p (* nat nat)) (ifzero (fst p) 1 (ifzero (snd p) 1 0)))
               (pair a b) (lam (p (* nat nat)) (pair (pre (fst p)) (pre (snd p)))))))",
        &[],
        &[],
    )
}

/// Inequality as a T program, via truncated subtraction.
pub fn neq_t() -> Term {
    let monus = template("(lam (a nat) (b nat) ((rec nat) a (lam (x nat) (k nat) (pre x)) b))", &[], &[]);
    template(
        "(lam (a nat) (b nat) (ifzero (MON a b) (ifzero (MON b a) 1 0) 0))",
        &[],
        &[("MON", monus)],
    )
}

/// `Rec′_σ`: a counting loop over pairs.
pub fn rec_w(sigma: &Type) -> Term {
    template(
        "(lam (x $S) (f (-> $S nat $S)) (n nat)
           (snd ((while (* nat $S)) (lam (p (* nat $S)) (NEQ (fst p) n)) (pair 0 x)
                  (lam (p (* nat $S)) (pair (suc (fst p)) (f (snd p) (fst p)))))))",
        &[("$S", sigma)],
        &[("NEQ", neq_w())],
    )
}

/// `Min′`.
pub fn min_w() -> Term {
    template("(lam (f (-> nat nat)) (n nat) ((while nat) (lam (k nat) (NEQ (f k) 0)) n suc))", &[], &[("NEQ", neq_w())])
}

/// `While′_σ`: find the number of iterations with `min`, then iterate.
pub fn while_t(sigma: &Type) -> Term {
    template(
        "(lam (c (-> $S nat)) (x $S) (f (-> $S $S))
           ((rec $S) x (lam (y $S) (k nat) (f y))
              (min (lam (k nat) (NEQ (c ((rec $S) x (lam (y $S) (j nat) (f y)) k)) 0)) 0)))",
        &[("$S", sigma)],
        &[("NEQ", neq_t())],
    )
}

/// `M†`: replaces `rec_σ` and `min` by W programs.
pub fn t_min_to_w(m: &Term) -> Result<Term> {
    LangTag::T_MIN.check(m)?;
    Ok(m.map_consts(&|k| match k {
        Const::Rec(s) => Some(rec_w(s)),
        Const::Min => Some(min_w()),
        _ => None,
    }))
}

/// `M‡`: replaces `while_σ` by T+min programs.
pub fn w_to_t_min(m: &Term) -> Result<Term> {
    LangTag::W.check(m)?;
    Ok(m.map_consts(&|k| match k {
        Const::While(s) => Some(while_t(s)),
        _ => None,
    }))
}

/// The product-free image `σ̂` of a type. A product becomes a function of a
/// selector `i` followed by the arguments of both components:
/// `(σ×τ)^ = nat → a⃗ → b⃗ → nat` where `σ̂ = a⃗ → nat` and `τ̂ = b⃗ → nat`.
pub fn hat_type(t: &Type) -> Type {
    match t {
        Type::Nat => Type::Nat,
        Type::Arrow(a, b) => Type::arrow(hat_type(a), hat_type(b)),
        Type::Product(a, b) => {
            let (mut xs, _) = hat_type(a).uncurry();
            let (ys, _) = hat_type(b).uncurry();
            let mut doms = vec![Type::Nat];
            doms.append(&mut xs);
            doms.extend(ys);
            Type::arrows(doms, Type::Nat)
        }
    }
}

/// `λy⃗. 0` at a product-free type.
fn zero_at(t: &Type) -> Term {
    let (doms, _) = t.uncurry();
    let vars: Vec<Var> = doms.iter().enumerate().map(|(i, d)| Var::new(&format!("u{i}"), d.clone())).collect();
    Term::lams(&vars, n(0))
}

fn fresh_vars(base: &str, tys: &[Type], avoid: &[&Term]) -> Vec<Var> {
    let mut out: Vec<Var> = Vec::new();
    for (i, t) in tys.iter().enumerate() {
        let name = fresh_name(&format!("{base}{i}"), &|s| {
            avoid.iter().any(|a| a.free_vars().iter().any(|w| &*w.name == s)) || out.iter().any(|w| &*w.name == s)
        });
        out.push(Var { name, ty: t.clone() });
    }
    out
}

fn hat_const(k: &Const) -> Result<Const> {
    let h = hat_type;
    Ok(match k {
        Const::Ifzero(s) => Const::Ifzero(h(s)),
        Const::Y(s) => Const::Y(h(s)),
        Const::While(s) => Const::While(h(s)),
        Const::Rec(s) => Const::Rec(h(s)),
        Const::Byval(ss, t) => Const::Byval(ss.iter().map(h).collect(), h(t)),
        Const::RecStr(s) | Const::WhileStr(s) if !s.is_product_free() => {
            return Err(Error::Inapplicable(format!(
                "strict constant at product type {s} has no product-free counterpart of level 0"
            )))
        }
        other => other.clone(),
    })
}

fn hat_term(t: &Term) -> Result<Term> {
    Ok(match t.kind() {
        TermKind::Var(x) => Term::var(Var { name: x.name.clone(), ty: hat_type(&x.ty) }),
        TermKind::Num(_) => t.clone(),
        TermKind::Const(k) => c(hat_const(k)?),
        TermKind::Lam(x, b) => Term::lam(Var { name: x.name.clone(), ty: hat_type(&x.ty) }, hat_term(b)?),
        TermKind::App(f, a) => Term::app(hat_term(f)?, hat_term(a)?)?,
        TermKind::Pair(a, b) => {
            let (ha, hb) = (hat_term(a)?, hat_term(b)?);
            let (ta, _) = ha.ty().uncurry();
            let (tb, _) = hb.ty().uncurry();
            let i = fresh_vars("i", &[Type::Nat], &[&ha, &hb]).remove(0);
            let xs = fresh_vars("a", &ta, &[&ha, &hb]);
            let ys = fresh_vars("b", &tb, &[&ha, &hb]);
            let left = aps(&ha, &xs.iter().map(v).collect::<Vec<_>>());
            let right = aps(&hb, &ys.iter().map(v).collect::<Vec<_>>());
            let mut binders = vec![i.clone()];
            binders.extend(xs);
            binders.extend(ys);
            Term::lams(&binders, aps(&c(Const::ifzero()), &[v(&i), left, right]))
        }
        TermKind::Fst(p) | TermKind::Snd(p) => {
            let hp = hat_term(p)?;
            let (pl, pr) = p.ty().as_product().expect("typed projection");
            let (ta, _) = hat_type(pl).uncurry();
            let (tb, _) = hat_type(pr).uncurry();
            let first = matches!(t.kind(), TermKind::Fst(_));
            let (keep, drop) = if first { (&ta, &tb) } else { (&tb, &ta) };
            let xs = fresh_vars("a", keep, &[&hp]);
            let kept: Vec<Term> = xs.iter().map(v).collect();
            let zeros: Vec<Term> = drop.iter().map(zero_at).collect();
            let mut args = vec![n(if first { 0 } else { 1 })];
            if first {
                args.extend(kept);
                args.extend(zeros);
            } else {
                args.extend(zeros);
                args.extend(kept);
            }
            Term::lams(&xs, aps(&hp, &args))
        }
    })
}

/// Product-free term of the same (product-free) type and ground behaviour.
pub fn eliminate_products(m: &Term) -> Result<Term> {
    if !m.ty().is_product_free() {
        return Err(Error::ProductType(format!("target type {} contains a product", m.ty())));
    }
    hat_term(m)
}

/// `enc_σ : σ → σ̂`, a term of the source language with products.
pub fn enc(sigma: &Type) -> Term {
    let x = Var::new("x", sigma.clone());
    Term::lam(x.clone(), enc_app(sigma, v(&x)))
}

/// `dec_σ : σ̂ → σ`.
pub fn dec(sigma: &Type) -> Term {
    let y = Var::new("y", hat_type(sigma));
    Term::lam(y.clone(), dec_app(sigma, v(&y)))
}

fn enc_app(sigma: &Type, t: Term) -> Term {
    match sigma {
        Type::Nat => t,
        Type::Arrow(a, b) => {
            let z = fresh_vars("z", &[hat_type(a)], &[&t]).remove(0);
            Term::lam(z.clone(), enc_app(b, ap(&t, &dec_app(a, v(&z)))))
        }
        Type::Product(a, b) => {
            let ea = enc_app(a, Term::fst(t.clone()).expect("product"));
            let eb = enc_app(b, Term::snd(t).expect("product"));
            let (ta, _) = ea.ty().uncurry();
            let (tb, _) = eb.ty().uncurry();
            let i = fresh_vars("i", &[Type::Nat], &[&ea, &eb]).remove(0);
            let xs = fresh_vars("a", &ta, &[&ea, &eb]);
            let ys = fresh_vars("b", &tb, &[&ea, &eb]);
            let left = aps(&ea, &xs.iter().map(v).collect::<Vec<_>>());
            let right = aps(&eb, &ys.iter().map(v).collect::<Vec<_>>());
            let mut binders = vec![i.clone()];
            binders.extend(xs);
            binders.extend(ys);
            Term::lams(&binders, aps(&c(Const::ifzero()), &[v(&i), left, right]))
        }
    }
}

fn dec_app(sigma: &Type, t: Term) -> Term {
    match sigma {
        Type::Nat => t,
        Type::Arrow(a, b) => {
            let z = fresh_vars("z", &[(**a).clone()], &[&t]).remove(0);
            Term::lam(z.clone(), dec_app(b, ap(&t, &enc_app(a, v(&z)))))
        }
        Type::Product(a, b) => {
            let (ta, _) = hat_type(a).uncurry();
            let (tb, _) = hat_type(b).uncurry();
            let proj = |first: bool| {
                let (keep, drop) = if first { (&ta, &tb) } else { (&tb, &ta) };
                let xs = fresh_vars("a", keep, &[&t]);
                let mut args = vec![n(if first { 0 } else { 1 })];
                let kept: Vec<Term> = xs.iter().map(v).collect();
                let zeros: Vec<Term> = drop.iter().map(zero_at).collect();
                if first {
                    args.extend(kept);
                    args.extend(zeros);
                } else {
                    args.extend(zeros);
                    args.extend(kept);
                }
                Term::lams(&xs, aps(&t, &args))
            };
            Term::pair(dec_app(a, proj(true)), dec_app(b, proj(false)))
        }
    }
}

/// Result of checking step-by-step simulation along one trace.
#[derive(Clone, Debug)]
pub struct LockstepReport {
    pub source_steps: usize,
    pub target_steps: usize,
    /// First source step whose image was not reached, with a description.
    pub failure: Option<(usize, String)>,
}

impl LockstepReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that every step `Mᵢ ⇝ Mᵢ₊₁` of the trace of `m` is matched by
/// `Mᵢ° ⇝⁺ Mᵢ₊₁°` in at most `max_inner` steps, and that the image of the
/// final term has no successor when the source has none.
pub fn check_lockstep(m: &Term, source: LangTag, fuel: u64, max_inner: usize) -> Result<LockstepReport> {
    source.check(m)?;
    let tr = trace_unchecked(m, fuel);
    let mut terms = vec![m.clone()];
    terms.extend(tr.steps.iter().map(|s| s.term.clone()));
    let mut report = LockstepReport { source_steps: tr.steps.len(), target_steps: 0, failure: None };
    let mut cur = to_pcf_unchecked(&terms[0]);
    for i in 0..terms.len() - 1 {
        let goal = to_pcf_unchecked(&terms[i + 1]);
        let mut reached = false;
        for _ in 0..max_inner {
            match step_unchecked(&cur) {
                Some((next, _)) => {
                    report.target_steps += 1;
                    cur = next;
                    if cur.alpha_eq(&goal) {
                        reached = true;
                        break;
                    }
                }
                None => break,
            }
        }
        if !reached {
            report.failure = Some((i, format!("image of step {i} did not reach {goal}")));
            return Ok(report);
        }
        cur = goal;
    }
    let source_done = !matches!(tr.outcome, Outcome::FuelExhausted { .. });
    if source_done && step_unchecked(&cur).is_some() {
        report.failure = Some((terms.len() - 1, "image of a normal form has a successor".into()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::evaluate;
    use crate::syntax::parse;

    fn value(t: &Term, lang: LangTag) -> Outcome {
        evaluate(t, lang, 200_000).unwrap().outcome
    }

    #[test]
    fn programs_are_typed_and_in_language() {
        for s in [Type::Nat, Type::pure(1), Type::product(Type::Nat, Type::Nat)] {
            assert_eq!(while_pcf(&s).ty(), &Const::While(s.clone()).ty());
            assert_eq!(rec_pcf(&s).ty(), &Const::Rec(s.clone()).ty());
            assert!(LangTag::PCF_BYVAL.contains(&rec_pcf(&s)));
            assert_eq!(rec_w(&s).ty(), &Const::Rec(s.clone()).ty());
            assert!(LangTag::W.contains(&rec_w(&s)));
            assert_eq!(while_t(&s).ty(), &Const::While(s.clone()).ty());
            assert!(LangTag::T_MIN.contains(&while_t(&s)));
        }
        assert_eq!(min_pcf().ty(), &Const::Min.ty());
        let p = Type::product(Type::Nat, Type::Nat);
        assert_eq!(rec_str_pcf(&p).ty(), &Const::RecStr(p.clone()).ty());
        assert_eq!(while_str_pcf(&p).ty(), &Const::WhileStr(p.clone()).ty());
    }

    #[test]
    fn numerals_are_fixed() {
        let t = parse("7").unwrap();
        assert!(to_pcf(&t, LangTag::W).unwrap().alpha_eq(&t));
    }

    #[test]
    fn min_translation_agrees() {
        let m = parse("(min (lam (x nat) (monus 3 x)) 0)").unwrap();
        assert_eq!(value(&m, LangTag::T_MIN), Outcome::Value(3u32.into()));
        assert_eq!(value(&to_pcf(&m, LangTag::T_MIN).unwrap(), LangTag::PCF_BYVAL), Outcome::Value(3u32.into()));
        assert_eq!(value(&t_min_to_w(&m).unwrap(), LangTag::W), Outcome::Value(3u32.into()));
    }

    #[test]
    fn neq_programs() {
        for (a, b) in [(0u64, 0u64), (0, 2), (3, 1), (4, 4)] {
            let expect = Outcome::Value(if a == b { 1u32 } else { 0 }.into());
            assert_eq!(value(&aps(&neq_w(), &[n(a), n(b)]), LangTag::W), expect);
            assert_eq!(value(&aps(&neq_t(), &[n(a), n(b)]), LangTag::T), expect);
        }
    }

    #[test]
    fn loop_translations() {
        let w = parse("((while nat) (lam (k nat) (neq k 3)) 0 suc)").unwrap();
        assert_eq!(value(&w_to_t_min(&w).unwrap(), LangTag::T_MIN), Outcome::Value(3u32.into()));
        let r = parse("((rec nat) 0 (lam (x nat) (k nat) (suc x)) 3)").unwrap();
        assert_eq!(value(&t_min_to_w(&r).unwrap(), LangTag::W), Outcome::Value(3u32.into()));
        let bot = parse("((rec nat) 0 (lam (x nat) (k nat) (suc x)) (min (lam (x nat) 1) 0))").unwrap();
        assert!(matches!(value(&bot, LangTag::T_MIN), Outcome::FuelExhausted { .. }));
        assert!(matches!(value(&t_min_to_w(&bot).unwrap(), LangTag::W), Outcome::FuelExhausted { .. }));
    }

    #[test]
    fn products_eliminated() {
        let m = parse("(fst (pair 4 7))").unwrap();
        let e = eliminate_products(&m).unwrap();
        assert!(e.is_product_free());
        assert_eq!(value(&e, LangTag::PCF), Outcome::Value(4u32.into()));
        let f = parse("(lam (x nat) x)").unwrap();
        assert!(eliminate_products(&f).unwrap().alpha_eq(&f));
        assert!(eliminate_products(&parse("(pair 1 2)").unwrap()).is_err());
    }

    #[test]
    fn retraction_on_pairs() {
        let s = Type::product(Type::Nat, Type::product(Type::pure(1), Type::Nat));
        let m = parse("(pair 4 (pair (lam (x nat) (suc x)) 7))").unwrap();
        let round = ap(&dec(&s), &ap(&enc(&s), &m));
        let probe = |t: &Term| {
            [
                Term::fst(t.clone()).unwrap(),
                ap(&Term::fst(Term::snd(t.clone()).unwrap()).unwrap(), &n(9)),
                Term::snd(Term::snd(t.clone()).unwrap()).unwrap(),
            ]
        };
        for (a, b) in probe(&round).iter().zip(probe(&m).iter()) {
            assert_eq!(value(a, LangTag::PCF), value(b, LangTag::PCF));
        }
    }

    #[test]
    fn lockstep_small() {
        let m = parse("((while nat) (lam (k nat) (neq k 2)) 0 suc)").unwrap();
        let r = check_lockstep(&m, LangTag::W, 10_000, 64).unwrap();
        assert!(r.passed(), "{:?}", r.failure);
        let m = parse("(min (lam (x nat) (monus 2 x)) ((rec nat) 0 (lam (x nat) (k nat) (suc x)) 1))").unwrap();
        let r = check_lockstep(&m, LangTag::T_MIN, 10_000, 64).unwrap();
        assert!(r.passed(), "{:?}", r.failure);
    }
}
