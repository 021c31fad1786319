//! Library constants: native semantics and definitions as programs.
//!
//! Bar recursion manipulates sequence codes far beyond what unary arithmetic
//! can reach, so `plus`, `monus`, `times`, `neq`, `lt`, `add`, `len` and
//! `basic` are primitive constants with native reduction rules. Each one is
//! also given a definition as a genuine program of every language that
//! admits it; tests check the two agree.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lang::{Lang, LangTag};
use crate::seqcode::SeqCode;
use crate::syntax::{parse, parse_open, parse_type_str};
use crate::term::{substitute_closed, Const, LibFn, Term, Var};

/// Index of the next argument to evaluate, or `None` when the result is determined.
pub fn next_arg(f: LibFn, vals: &[Option<BigUint>]) -> Option<usize> {
    match f {
        LibFn::Basic => {
            if vals[0].is_none() {
                return Some(0);
            }
            if vals[2].is_none() {
                return Some(2);
            }
            let s = SeqCode::from_code(vals[0].clone().expect("checked"));
            let in_range = vals[2].as_ref().and_then(|i| i.to_usize()).is_some_and(|i| i < s.len());
            if in_range || vals[1].is_some() {
                None
            } else {
                Some(1)
            }
        }
        _ => vals.iter().position(Option::is_none),
    }
}

/// Result once [`next_arg`] returns `None`.
pub fn compute(f: LibFn, vals: &[Option<BigUint>]) -> BigUint {
    let get = |i: usize| vals[i].as_ref().expect("argument evaluated");
    let bool_num = |b: bool| if b { BigUint::zero() } else { BigUint::one() };
    match f {
        LibFn::Plus => get(0) + get(1),
        LibFn::Monus => {
            if get(0) > get(1) {
                get(0) - get(1)
            } else {
                BigUint::zero()
            }
        }
        LibFn::Times => get(0) * get(1),
        LibFn::Neq => bool_num(get(0) != get(1)),
        LibFn::Lt => bool_num(get(0) < get(1)),
        LibFn::Add => SeqCode::from_code(get(0).clone()).add(get(1)).into_code(),
        LibFn::Len => BigUint::from(SeqCode::from_code(get(0).clone()).len()),
        LibFn::Basic => {
            let s = SeqCode::from_code(get(0).clone());
            let i = get(2);
            match i.to_usize() {
                Some(k) if k < s.len() => s.index(k).expect("in range"),
                _ => get(1).clone(),
            }
        }
    }
}

/// Evaluates a fully numeric application.
pub fn eval(f: LibFn, args: &[BigUint]) -> BigUint {
    let vals: Vec<Option<BigUint>> = args.iter().cloned().map(Some).collect();
    compute(f, &vals)
}

const RT: &str = "(-> nat (-> nat nat nat) nat nat)";
const LT: &str = "(-> nat (-> nat nat) nat)";
const N1: &str = "(-> nat nat)";
const N2: &str = "(-> nat nat nat)";
const N3: &str = "(-> nat nat nat nat)";

/// Definitions in dependency order: name, type, body. `R` is a recursor on
/// `nat` and `L e b` evaluates `e` before passing it to `b`.
const DEFS: &[(&str, &str, &str)] = &[
    ("Plus", N2, "(lam (a nat) (b nat) (R a (lam (x nat) (k nat) (suc x)) b))"),
    ("Monus", N2, "(lam (a nat) (b nat) (R a (lam (x nat) (k nat) (pre x)) b))"),
    ("Times", N2, "(lam (a nat) (b nat) (L a (lam (a1 nat) (R 0 (lam (x nat) (k nat) (Plus x a1)) b))))"),
    (
        "Neq",
        N2,
        "(lam (a nat) (b nat) (L a (lam (a1 nat) (L b (lam (b1 nat)
           (ifzero (Monus a1 b1) (ifzero (Monus b1 a1) 1 0) 0))))))",
    ),
    ("Lt", N2, "(lam (a nat) (b nat) (ifzero (Monus b a) 1 0))"),
    ("Le", N2, "(lam (a nat) (b nat) (ifzero (Monus a b) 1 0))"),
    ("Tri", N1, "(lam (t nat) (R 0 (lam (acc nat) (k nat) (Plus acc (suc k))) t))"),
    ("Cantor", N2, "(lam (a nat) (b nat) (L b (lam (b1 nat) (Plus (Tri (Plus a b1)) b1))))"),
    ("Add", N2, "(lam (s nat) (z nat) (suc (Cantor s z)))"),
    (
        "Diag",
        N1,
        "(lam (n nat) (L n (lam (n1 nat)
           (R 0 (lam (acc nat) (k nat) (Plus acc (Le (Tri (suc k)) n1))) n1))))",
    ),
    ("Sndc", N1, "(lam (n nat) (L n (lam (n1 nat) (Monus n1 (Tri (Diag n1))))))"),
    (
        "Fstc",
        N1,
        "(lam (n nat) (L n (lam (n1 nat) (L (Diag n1) (lam (w nat) (Monus w (Monus n1 (Tri w))))))))",
    ),
    ("Tail", N1, "(lam (s nat) (L s (lam (s1 nat) (ifzero s1 0 (Fstc (pre s1))))))"),
    ("Last", N1, "(lam (s nat) (Sndc (pre s)))"),
    ("Itail", N2, "(lam (s nat) (k nat) (R s (lam (x nat) (j nat) (Tail x)) k))"),
    (
        "Len",
        N1,
        "(lam (s nat) (L s (lam (s1 nat)
           (R 0 (lam (acc nat) (k nat) (Plus acc (ifzero (Itail s1 k) 0 1))) s1))))",
    ),
    ("Index", N2, "(lam (s nat) (i nat) (L s (lam (s1 nat) (Last (Itail s1 (Monus (Monus (Len s1) 1) i))))))"),
    (
        "Basic",
        N3,
        "(lam (s nat) (j nat) (i nat) (L s (lam (s1 nat) (L i (lam (i1 nat)
           (ifzero (Lt i1 (Len s1)) (Index s1 i1) j))))))",
    ),
];

fn capitalized(f: LibFn) -> String {
    let n = f.name();
    n[..1].to_ascii_uppercase() + &n[1..]
}

/// Library definitions built from a recursor `R` and a strict let `L`.
pub struct LibBodies {
    defs: HashMap<&'static str, Term>,
}

impl LibBodies {
    pub fn new(r: Term, l: Term) -> LibBodies {
        let rv = Var::new("R", parse_type_str(RT).expect("static type"));
        let lv = Var::new("L", parse_type_str(LT).expect("static type"));
        let mut env: Vec<(Var, Term)> = vec![(rv, r), (lv, l)];
        let mut defs = HashMap::new();
        for (name, ty, src) in DEFS {
            let scope: Vec<Var> = env.iter().map(|(v, _)| v.clone()).collect();
            let open = parse_open(src, &scope).unwrap_or_else(|e| panic!("library {name}: {e}"));
            let closed = substitute_closed(&open, &env);
            debug_assert!(closed.is_closed());
            env.push((Var::new(name, parse_type_str(ty).expect("static type")), closed.clone()));
            defs.insert(*name, closed);
        }
        LibBodies { defs }
    }

    pub fn get(&self, f: LibFn) -> &Term {
        &self.defs[capitalized(f).as_str()]
    }

    /// Every definition, including internal helpers.
    pub fn all(&self) -> impl Iterator<Item = (&'static str, &Term)> {
        self.defs.iter().map(|(k, v)| (*k, v))
    }
}

fn recursor_and_let(strict: bool) -> (Term, Term) {
    if strict {
        (
            parse("(rec-str nat)").expect("static"),
            parse("(lam (e nat) (b (-> nat nat)) ((byval () nat) b e))").expect("static"),
        )
    } else {
        (
            parse("(rec nat)").expect("static"),
            parse("(lam (e nat) (b (-> nat nat)) ((rec nat) 0 (lam (d nat) (x nat) (b x)) (suc e)))")
                .expect("static"),
        )
    }
}

/// Definitions as T programs (`rec`).
pub fn t_bodies() -> LibBodies {
    let (r, l) = recursor_and_let(false);
    LibBodies::new(r, l)
}

/// Definitions as strict T₀ programs (`rec^str`, `byval_[nat]`).
pub fn t0_str_bodies() -> LibBodies {
    let (r, l) = recursor_and_let(true);
    LibBodies::new(r, l)
}

/// Definitions as pure PCF programs (a fixed-point recursor, lazy let).
pub fn pcf_bodies() -> LibBodies {
    let r = parse(
        "(lam (x nat) (f (-> nat nat nat)) (n nat)
           ((Y (-> nat nat)) (lam (r (-> nat nat)) (m nat) (ifzero m x (f (r (pre m)) (pre m)))) n))",
    )
    .expect("static");
    let l = parse("(lam (e nat) (b (-> nat nat)) (b e))").expect("static");
    LibBodies::new(r, l)
}

/// Replaces library constants by their definitions in `lang`.
pub fn expand_library(t: &Term, lang: LangTag) -> Result<Term> {
    let bodies_then = |b: LibBodies, post: &dyn Fn(&Term) -> Result<Term>| -> Result<Term> {
        let mut table = HashMap::new();
        for f in LibFn::ALL {
            table.insert(f, post(b.get(f))?);
        }
        Ok(t.map_consts(&|k| match k {
            Const::Lib(f) => Some(table[f].clone()),
            _ => None,
        }))
    };
    let out = match lang.lang {
        Lang::T | Lang::TMin => bodies_then(t_bodies(), &|b| Ok(b.clone()))?,
        Lang::T0Str | Lang::T0StrMin => bodies_then(t0_str_bodies(), &|b| Ok(b.clone()))?,
        Lang::Pcf => bodies_then(pcf_bodies(), &|b| Ok(b.clone()))?,
        Lang::PcfByval => bodies_then(t_bodies(), &|b| crate::translate::to_pcf(b, LangTag::T_MIN))?,
        Lang::W => bodies_then(t_bodies(), &|b| crate::translate::t_min_to_w(b))?,
        Lang::B | Lang::W0Str => {
            return Err(Error::Membership {
                lang: lang.to_string(),
                subterm: "library constants".into(),
            })
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn native_values() {
        assert_eq!(eval(LibFn::Neq, &[b(3), b(4)]), b(0));
        assert_eq!(eval(LibFn::Neq, &[b(4), b(4)]), b(1));
        assert_eq!(eval(LibFn::Lt, &[b(3), b(4)]), b(0));
        assert_eq!(eval(LibFn::Monus, &[b(3), b(4)]), b(0));
        assert_eq!(eval(LibFn::Add, &[b(0), b(0)]), b(1));
        let s5 = SeqCode::from_u64s(&[5]).into_code();
        assert_eq!(eval(LibFn::Basic, &[s5.clone(), b(9), b(0)]), b(5));
        assert_eq!(eval(LibFn::Basic, &[s5, b(9), b(7)]), b(9));
    }

    #[test]
    fn basic_is_lazy_in_default() {
        let s = SeqCode::from_u64s(&[5]).into_code();
        assert_eq!(next_arg(LibFn::Basic, &[Some(s.clone()), None, Some(b(0))]), None);
        assert_eq!(next_arg(LibFn::Basic, &[Some(s), None, Some(b(1))]), Some(1));
    }

    #[test]
    fn bodies_are_closed_and_typed() {
        for bodies in [t_bodies(), t0_str_bodies(), pcf_bodies()] {
            for f in LibFn::ALL {
                let t = bodies.get(f);
                assert!(t.is_closed());
                assert_eq!(t.ty(), &f.ty());
            }
        }
    }

    fn grid(f: LibFn) -> Vec<Vec<BigUint>> {
        let small: Vec<u64> = (0..5).collect();
        let codes: Vec<u64> = vec![0, 1, 3, 4, 12, 21];
        let mut out = Vec::new();
        match f.arity() {
            1 => out.extend(codes.iter().map(|&s| vec![b(s)])),
            2 if f == LibFn::Add => {
                for &s in &codes[..4] {
                    for &z in &small[..3] {
                        out.push(vec![b(s), b(z)]);
                    }
                }
            }
            2 => {
                for &x in &small {
                    for &y in &small {
                        out.push(vec![b(x), b(y)]);
                    }
                }
            }
            _ => {
                for &s in &codes {
                    for i in 0..3 {
                        out.push(vec![b(s), b(9), b(i)]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn programs_agree_with_native_rules() {
        use crate::reduce::{evaluate, Outcome};
        use crate::term::{aps, Term};
        for (bodies, lang) in [(t_bodies(), LangTag::T), (t0_str_bodies(), LangTag::T0_STR), (pcf_bodies(), LangTag::PCF)] {
            for f in LibFn::ALL {
                for args in grid(f) {
                    // Without sharing, the lazy let recomputes its argument.
                    if lang == LangTag::PCF && args[0] > b(3) && f.arity() != 2 {
                        continue;
                    }
                    let t = aps(bodies.get(f), &args.iter().map(|a| Term::num(a.clone())).collect::<Vec<_>>());
                    let got = evaluate(&t, lang, 20_000_000).unwrap().outcome;
                    assert_eq!(got, Outcome::Value(eval(f, &args)), "{} {:?} in {lang}", f.name(), args);
                }
            }
        }
    }
}
