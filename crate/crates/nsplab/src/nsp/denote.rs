//! The interpretation of terms as procedures.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;

use super::machine::{meta, normalize, MetaTerm};
use super::{NVar, Procedure, DEFAULT_STEPS};
use crate::error::{Error, Result};
use crate::lang::LangTag;
use crate::library;
use crate::syntax::print;
use crate::term::{Const, Term, TermKind, Var};
use crate::translate::{min_pcf, rec_pcf, rec_str_pcf, while_pcf, while_str_pcf};
use crate::types::Type;

type Meta = Arc<MetaTerm>;

/// Languages whose terms denote LWF procedures.
const LWF_LANGS: [LangTag; 5] = [LangTag::T_MIN, LangTag::W, LangTag::T0_STR_MIN, LangTag::W0_STR, LangTag::B];

/// The first LWF language containing `m`, if any.
pub fn lwf_language(m: &Term) -> Option<LangTag> {
    LWF_LANGS.into_iter().find(|l| l.contains(m))
}

/// `⟦m⟧` for a closed product-free term. Loops, recursors and
/// minimization are interpreted through their PCF programs.
pub fn denote(m: &Term) -> Result<Procedure> {
    if !m.is_closed() {
        return Err(Error::Type { msg: "denote expects a closed term".into(), subterm: print(m) });
    }
    Ok(denote_open(m, &[])?.0)
}

/// `⟦m⟧` with the listed free variables turned into procedure variables.
pub fn denote_open(m: &Term, free: &[Var]) -> Result<(Procedure, Vec<NVar>)> {
    denote_budget(m, free, DEFAULT_STEPS)
}

pub(crate) fn denote_budget(m: &Term, free: &[Var], budget: u64) -> Result<(Procedure, Vec<NVar>)> {
    if !m.is_product_free() {
        return Err(Error::ProductType(print(m)));
    }
    let mut scope: HashMap<Var, Vec<NVar>> = HashMap::new();
    let nvars: Vec<NVar> = free.iter().map(|x| NVar::named(&x.name, x.ty.clone())).collect();
    for (x, nv) in free.iter().zip(&nvars) {
        scope.entry(x.clone()).or_default().push(nv.clone());
    }
    if let Some(x) = m.free_vars().iter().find(|x| !scope.contains_key(*x)) {
        return Err(Error::Type { msg: format!("unlisted free variable {}", x.name), subterm: print(m) });
    }
    let code = compile(m, &mut scope);
    let cert = lwf_language(m).map(|l| Arc::from(format!("denotation of a {l} term")));
    Ok((normalize(&code, budget).set_certificate(cert), nvars))
}

fn compile(t: &Term, scope: &mut HashMap<Var, Vec<NVar>>) -> Meta {
    match t.kind() {
        TermKind::Var(x) => meta::var(scope.get(x).and_then(|s| s.last()).expect("bound variable")),
        TermKind::Lam(x, b) => {
            let nv = NVar::named(&x.name, x.ty.clone());
            scope.entry(x.clone()).or_default().push(nv.clone());
            let body = compile(b, scope);
            scope.get_mut(x).expect("pushed").pop();
            meta::lam(&nv, body)
        }
        TermKind::App(f, a) => meta::app(compile(f, scope), compile(a, scope)),
        TermKind::Num(n) => meta::num(n.clone()),
        TermKind::Const(k) => const_meta(k),
        TermKind::Pair(..) | TermKind::Fst(_) | TermKind::Snd(_) => unreachable!("checked product-free"),
    }
}

fn params(ty: &Type) -> Vec<NVar> {
    ty.uncurry().0.into_iter().map(NVar::fresh).collect()
}

fn vars(xs: &[NVar]) -> Vec<Meta> {
    xs.iter().map(meta::var).collect()
}

/// The meta-term of a constant, η-expanded so every case sits at type `nat`.
pub fn const_meta(k: &Const) -> Meta {
    static CACHE: OnceLock<Mutex<HashMap<Const, Meta>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().expect("cache lock").get(k) {
        return m.clone();
    }
    let m = build_const(k);
    cache.lock().expect("cache lock").entry(k.clone()).or_insert(m).clone()
}

fn build_const(k: &Const) -> Meta {
    let ps = params(&k.ty());
    let body = match k {
        Const::Suc => meta::case(meta::var(&ps[0]), |i| meta::num(i + 1u32)),
        Const::Pre => meta::case(meta::var(&ps[0]), |i| meta::num(if i.is_zero() { BigUint::zero() } else { i - 1u32 })),
        Const::Ifzero(_) => {
            let rest = vars(&ps[3..]);
            let yes = meta::apps(meta::var(&ps[1]), rest.clone());
            let no = meta::apps(meta::var(&ps[2]), rest);
            meta::case(meta::var(&ps[0]), move |i| if i.is_zero() { yes.clone() } else { no.clone() })
        }
        Const::Y(s) => {
            let r = NVar::fresh(s.clone());
            let fix = meta::fix(&r, meta::app(meta::var(&ps[0]), meta::var(&r)));
            meta::apps(fix, vars(&ps[1..]))
        }
        Const::Byval(ss, _) => {
            let f = meta::var(&ps[0]);
            let xs = vars(&ps[1..=ss.len()]);
            let n = meta::var(&ps[ss.len() + 1]);
            let ys = vars(&ps[ss.len() + 2..]);
            meta::case(n, move |i| {
                let mut args = xs.clone();
                args.push(meta::num(i.clone()));
                args.extend(ys.iter().cloned());
                meta::apps(f.clone(), args)
            })
        }
        Const::Lib(f) => lib_case(*f, Arc::new(vars(&ps)), vec![None; f.arity()]),
        Const::While(s) => return compile_closed(&while_pcf(s)),
        Const::Rec(s) => return compile_closed(&rec_pcf(s)),
        Const::Min => return compile_closed(&min_pcf()),
        Const::RecStr(s) => return compile_closed(&rec_str_pcf(s)),
        Const::WhileStr(s) => return compile_closed(&while_str_pcf(s)),
    };
    meta::lams(&ps, body)
}

fn compile_closed(t: &Term) -> Meta {
    compile(t, &mut HashMap::new())
}

/// Interrogates the arguments of a library function in evaluation order.
fn lib_case(f: crate::term::LibFn, args: Arc<Vec<Meta>>, vals: Vec<Option<BigUint>>) -> Meta {
    match library::next_arg(f, &vals) {
        None => meta::num(library::compute(f, &vals)),
        Some(k) => {
            let scrut = args[k].clone();
            meta::case(scrut, move |i| {
                let mut v = vals.clone();
                v[k] = Some(i.clone());
                lib_case(f, args.clone(), v)
            })
        }
    }
}
