//! Seeded generation of closed programs of type `nat`, and the test suites
//! that run over them.
//!
//! Programs are small and built from templates that usually terminate
//! within a few thousand steps: bounded recursion, searches with a reachable
//! zero, loops with a reachable exit. A few are made divergent on purpose
//! (`Y` of the identity, a search that never succeeds) so that the suites
//! also compare non-termination.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lang::{Lang, LangTag};
use crate::nsp::{denote, Ground};
use crate::reduce::{evaluate, Outcome};
use crate::syntax::parse;
use crate::term::Term;
use crate::translate::{check_lockstep, eliminate_products, t_min_to_w, w_to_t_min};

/// Default fuel for corpus runs.
pub const CORPUS_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ty {
    Nat,
    Fun,
    Pair,
}

struct Gen {
    rng: ChaCha8Rng,
    lang: LangTag,
    products: bool,
    next: usize,
}

type Ctx = Vec<(String, Ty)>;

impl Gen {
    fn fresh(&mut self, base: &str) -> String {
        self.next += 1;
        format!("{base}{}", self.next)
    }

    fn small(&mut self) -> u32 {
        self.rng.gen_range(0..4)
    }

    fn pick_var(&mut self, ctx: &Ctx, ty: Ty) -> Option<String> {
        let vs: Vec<&String> = ctx.iter().filter(|(_, t)| *t == ty).map(|(v, _)| v).collect();
        vs.choose(&mut self.rng).map(|v| v.to_string())
    }

    fn leaf(&mut self, ctx: &Ctx) -> String {
        if self.rng.gen_bool(0.5) {
            if let Some(v) = self.pick_var(ctx, Ty::Nat) {
                return v;
            }
        }
        self.small().to_string()
    }

    fn lib(&self) -> bool {
        !matches!(self.lang.lang, Lang::B | Lang::W0Str)
    }

    fn nat(&mut self, ctx: &Ctx, d: usize) -> String {
        if d == 0 {
            return self.leaf(ctx);
        }
        match self.rng.gen_range(0..12) {
            0 | 1 => self.leaf(ctx),
            2 => format!("(suc {})", self.nat(ctx, d - 1)),
            3 => format!("(pre {})", self.nat(ctx, d - 1)),
            4 => format!("(ifzero {} {} {})", self.nat(ctx, d - 1), self.nat(ctx, d - 1), self.nat(ctx, d - 1)),
            5 => format!("({} {})", self.fun(ctx, d - 1), self.nat(ctx, d - 1)),
            6 if self.lib() => {
                let f = ["plus", "monus", "neq", "lt", "times"].choose(&mut self.rng).copied().unwrap_or("plus");
                let dd = if f == "times" { 0 } else { d - 1 };
                format!("({f} {} {})", self.nat(ctx, dd), self.nat(ctx, dd))
            }
            7 => {
                let f = self.fresh("f");
                let mut inner = ctx.clone();
                inner.push((f.clone(), Ty::Fun));
                format!("((lam ({f} (-> nat nat)) {}) {})", self.nat(&inner, d - 1), self.fun(ctx, d - 1))
            }
            8 if self.products => {
                let p = self.pair(ctx, d - 1);
                format!("({} {p})", if self.rng.gen_bool(0.5) { "fst" } else { "snd" })
            }
            9 if self.products => {
                let p = self.fresh("p");
                let mut inner = ctx.clone();
                inner.push((p.clone(), Ty::Pair));
                format!("((lam ({p} (* nat nat)) {}) {})", self.nat(&inner, d - 1), self.pair(ctx, d - 1))
            }
            _ => match self.pick_var(ctx, Ty::Fun) {
                Some(f) if self.rng.gen_bool(0.5) => format!("({f} {})", self.nat(ctx, d - 1)),
                _ => self.special(ctx, d),
            },
        }
    }

    fn fun(&mut self, ctx: &Ctx, d: usize) -> String {
        match self.rng.gen_range(0..6) {
            0 => "suc".into(),
            1 => "pre".into(),
            2 => match self.pick_var(ctx, Ty::Fun) {
                Some(f) => f,
                None => "suc".into(),
            },
            3 if self.lib() => format!("(plus {})", self.nat(ctx, d.saturating_sub(1))),
            _ => {
                let x = self.fresh("x");
                let mut inner = ctx.clone();
                inner.push((x.clone(), Ty::Nat));
                format!("(lam ({x} nat) {})", self.nat(&inner, d))
            }
        }
    }

    fn pair(&mut self, ctx: &Ctx, d: usize) -> String {
        match self.rng.gen_range(0..4) {
            0 => match self.pick_var(ctx, Ty::Pair) {
                Some(p) => p,
                None => format!("(pair {} {})", self.nat(ctx, d), self.nat(ctx, d)),
            },
            1 if d > 0 => {
                let p = self.fresh("p");
                format!("((lam ({p} (* nat nat)) (pair (snd {p}) (fst {p}))) {})", self.pair(ctx, d - 1))
            }
            _ => format!("(pair {} {})", self.nat(ctx, d.saturating_sub(1)), self.nat(ctx, d.saturating_sub(1))),
        }
    }

    /// A `nat`-valued use of one of the language's distinctive constants.
    fn special(&mut self, ctx: &Ctx, d: usize) -> String {
        let d1 = d.saturating_sub(1);
        let c = self.small() + 1;
        let with = |me: &mut Gen, base: &str| {
            let v = me.fresh(base);
            let mut inner = ctx.clone();
            inner.push((v.clone(), Ty::Nat));
            (v, inner)
        };
        let bounded = self.small();
        match self.lang.lang {
            Lang::Pcf | Lang::PcfByval => {
                let r = self.rng.gen_range(0..10);
                if r == 0 {
                    let (b, _) = with(self, "b");
                    return format!("((Y nat) (lam ({b} nat) {b}))");
                }
                if r < 4 && self.lang.lang == Lang::PcfByval {
                    let (x, inner) = with(self, "x");
                    return format!("((byval () nat) (lam ({x} nat) {}) {})", self.nat(&inner, d1), self.nat(ctx, d1));
                }
                let f = self.fresh("r");
                let (x, inner) = with(self, "x");
                let base = self.nat(&inner, d1);
                let step = self.fun(ctx, d1);
                format!("((Y (-> nat nat)) (lam ({f} (-> nat nat)) ({x} nat) (ifzero {x} {base} ({step} ({f} (pre {x}))))) {bounded})")
            }
            Lang::T | Lang::TMin | Lang::T0Str | Lang::T0StrMin => {
                let strict = matches!(self.lang.lang, Lang::T0Str | Lang::T0StrMin);
                let has_min = matches!(self.lang.lang, Lang::TMin | Lang::T0StrMin);
                let r = self.rng.gen_range(0..10);
                if has_min && r < 4 {
                    let (x, inner) = with(self, "x");
                    let body = match self.rng.gen_range(0..5) {
                        0 => format!("(monus {c} {x})"),
                        1 => format!("(lt {c} {x})"),
                        2 => format!("(neq {x} {c})"),
                        3 => "1".to_string(),
                        _ => self.nat(&inner, d1),
                    };
                    return format!("(min (lam ({x} nat) {body}) {})", self.nat(ctx, d1));
                }
                if strict && r < 6 {
                    let (x, inner) = with(self, "x");
                    return format!("((byval () nat) (lam ({x} nat) {}) {})", self.nat(&inner, d1), self.nat(ctx, d1));
                }
                let rec = if strict { "rec-str" } else { "rec" };
                let x = self.fresh("x");
                let k = self.fresh("k");
                let mut inner = ctx.clone();
                inner.push((x.clone(), Ty::Nat));
                inner.push((k.clone(), Ty::Nat));
                let start = self.nat(ctx, d1);
                let body = self.nat(&inner, d1);
                format!("(({rec} nat) {start} (lam ({x} nat) ({k} nat) {body}) {bounded})")
            }
            Lang::W | Lang::W0Str => {
                let lw = if self.lang.lang == Lang::W { "while" } else { "while-str" };
                let s = self.fresh("s");
                let mut inner = ctx.clone();
                inner.push((s.clone(), Ty::Nat));
                // Loops while the condition is 0: here while s < c.
                let cond = match self.rng.gen_range(0..12) {
                    0 => "0".to_string(),
                    1 | 2 => self.nat(&inner, d1),
                    _ => (1..c).fold(s.clone(), |t, _| format!("(pre {t})")),
                };
                let step = match self.rng.gen_range(0..4) {
                    0 => self.nat(&inner, d1),
                    _ => format!("(suc {s})"),
                };
                let init = self.nat(ctx, d1);
                format!("(({lw} nat) (lam ({s} nat) {cond}) {init} (lam ({s} nat) {step}))")
            }
            Lang::B => {
                let x = self.fresh("x");
                let mut inner = ctx.clone();
                inner.push((x.clone(), Ty::Nat));
                format!("((lam ({x} nat) {}) {})", self.nat(&inner, d1), self.nat(ctx, d1))
            }
        }
    }
}

fn lang_index(lang: LangTag) -> u64 {
    LangTag::ALL.iter().position(|l| *l == lang).unwrap_or(0) as u64
}

fn generate(seed: u64, size: usize, lang: LangTag, products: bool) -> Vec<Term> {
    let stream = lang_index(lang) * 2 + products as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut g = Gen { rng, lang, products, next: 0 };
    (0..size)
        .map(|_| {
            g.next = 0;
            let d = g.rng.gen_range(2..5);
            let src = g.special(&Vec::new(), d);
            let t = parse(&src).unwrap_or_else(|e| panic!("generated term does not parse: {e}\n{src}"));
            debug_assert!(lang.contains(&t), "{src}");
            t
        })
        .collect()
}

/// `size` closed programs of type `nat` in `lang`, determined by `seed`.
pub fn generate_corpus(seed: u64, size: usize, lang: LangTag) -> Vec<Term> {
    generate(seed, size, lang, false)
}

/// Closed PCF programs of type `nat` that build and take apart pairs.
pub fn generate_product_corpus(seed: u64, size: usize) -> Vec<Term> {
    generate(seed, size, LangTag::PCF, true)
}

/// The text of one corpus file, with the seed recorded in a header comment.
pub fn corpus_file_text(seed: u64, lang: LangTag, index: usize, t: &Term) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "; nsplab corpus: seed {seed}, lang {lang}, index {index}");
    let _ = writeln!(s, "{t}");
    s
}

/// Writes `lang-index.term` files into `dir` and returns their paths.
pub fn write_corpus(dir: &Path, seed: u64, size: usize, langs: &[LangTag], products: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for &lang in langs {
        let terms = if products { generate_product_corpus(seed, size) } else { generate_corpus(seed, size, lang) };
        let tag = if products { "products".to_string() } else { lang.to_string() };
        for (i, t) in terms.iter().enumerate() {
            let path = dir.join(format!("{tag}-{i:04}.term"));
            fs::write(&path, corpus_file_text(seed, lang, i, t))
                .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
            out.push(path);
        }
    }
    Ok(out)
}

/// Result of running a suite over a corpus.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    /// Programs that terminated within fuel.
    pub terminating: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> SuiteReport {
        SuiteReport { suite: suite.into(), checked: 0, terminating: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Reduction and denotation agree on each program: the same numeral, or
/// fuel exhaustion against an unresolved or `⊥` denotation.
pub fn adequacy_suite(terms: &[Term], lang: LangTag, fuel: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("adequacy");
    for t in terms {
        let out = evaluate(t, lang, fuel)?.outcome;
        let den = denote(t)?.ground();
        r.checked += 1;
        let ok = match (&out, &den) {
            (Outcome::Value(a), Ground::Value(b)) => a == b,
            (Outcome::FuelExhausted { .. }, Ground::Unresolved | Ground::Bottom) => true,
            _ => false,
        };
        if matches!(out, Outcome::Value(_)) {
            r.terminating += 1;
        }
        if !ok {
            r.failures.push(format!("{t}: reduction gives {out}, denotation {den:?}"));
        }
    }
    Ok(r)
}

/// Lock-step simulation by the PCF translation along every terminating trace.
pub fn lockstep_suite(terms: &[Term], lang: LangTag, fuel: u64, max_inner: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("lockstep");
    for t in terms {
        let rep = check_lockstep(t, lang, fuel, max_inner)?;
        r.checked += 1;
        if rep.source_steps < fuel as usize {
            r.terminating += 1;
        }
        if let Some((i, why)) = rep.failure {
            r.failures.push(format!("{t}: step {i}: {why}"));
        }
    }
    Ok(r)
}

/// Which translation a faithfulness run exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Faithful {
    /// T+min to W.
    Dagger,
    /// W to T+min.
    DoubleDagger,
    /// Product elimination within PCF.
    Products,
}

impl Faithful {
    fn run(self, t: &Term) -> Result<(Term, LangTag, LangTag)> {
        Ok(match self {
            Faithful::Dagger => (t_min_to_w(t)?, LangTag::T_MIN, LangTag::W),
            Faithful::DoubleDagger => (w_to_t_min(t)?, LangTag::W, LangTag::T_MIN),
            Faithful::Products => (eliminate_products(t)?, LangTag::PCF, LangTag::PCF),
        })
    }
}

/// Source and translation reach the same numeral, or both run out of fuel.
/// The translation gets `slack` times the fuel; a source that runs out is
/// retried with the same allowance before a disagreement is reported.
pub fn faithfulness_suite(terms: &[Term], which: Faithful, fuel: u64, slack: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(&format!("faithfulness-{which:?}").to_lowercase());
    for t in terms {
        let (u, from, to) = which.run(t)?;
        let a = evaluate(t, from, fuel)?.outcome;
        let b = evaluate(&u, to, fuel * slack)?.outcome;
        r.checked += 1;
        let ok = match (&a, &b) {
            (Outcome::Value(x), Outcome::Value(y)) => x == y,
            (Outcome::FuelExhausted { .. }, Outcome::FuelExhausted { .. }) => true,
            (Outcome::FuelExhausted { .. }, Outcome::Value(_)) => evaluate(t, from, fuel * slack)?.outcome.agrees(&b),
            _ => false,
        };
        if matches!(a, Outcome::Value(_)) {
            r.terminating += 1;
        }
        if !ok {
            r.failures.push(format!("{t}: source gives {a}, translation {b}"));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_language() {
        for lang in LangTag::ALL {
            let a = generate_corpus(7, 20, lang);
            let b = generate_corpus(7, 20, lang);
            assert_eq!(a.len(), 20);
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.to_string(), y.to_string());
                assert!(lang.contains(x), "{lang}: {x}");
                assert!(x.is_closed() && x.ty().is_nat());
            }
        }
        assert_ne!(generate_corpus(1, 5, LangTag::T).iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                   generate_corpus(2, 5, LangTag::T).iter().map(|t| t.to_string()).collect::<Vec<_>>());
    }

    #[test]
    fn seed_zero_size_one() {
        let c = generate_corpus(0, 1, LangTag::B);
        assert_eq!(c.len(), 1);
        assert!(LangTag::B.contains(&c[0]));
    }

    #[test]
    fn product_corpus_uses_pairs() {
        let c = generate_product_corpus(3, 40);
        assert!(c.iter().any(|t| !t.is_product_free()));
        assert!(c.iter().all(|t| t.ty().is_nat()));
    }

    #[test]
    fn files_round_trip() {
        let dir = std::env::temp_dir().join(format!("nsplab-corpus-{}", std::process::id()));
        let paths = write_corpus(&dir, 5, 3, &[LangTag::W], false).unwrap();
        assert_eq!(paths.len(), 3);
        let gen = generate_corpus(5, 3, LangTag::W);
        for (p, t) in paths.iter().zip(&gen) {
            let text = fs::read_to_string(p).unwrap();
            assert!(text.starts_with("; nsplab corpus: seed 5"));
            assert!(parse(&text).unwrap().alpha_eq(t));
        }
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn small_suites() {
        let pcf = generate_corpus(11, 10, LangTag::PCF_BYVAL);
        assert!(adequacy_suite(&pcf, LangTag::PCF_BYVAL, 100_000).unwrap().passed());
        let w = generate_corpus(11, 10, LangTag::W);
        let r = lockstep_suite(&w, LangTag::W, 2_000, 256).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }
}
