//! The `nsplab` command line.
//!
//! Exit status: 0 on success, 1 when a computation or check fails, 2 on
//! usage errors (bad flags, unreadable or ill-formed input files).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::barrec::{
    conformance_caps, conformance_check, explore_tree, reference_phi, standard_battery, BatteryEntry, Flavor, TreeCaps,
    TreeVerdict,
};
use crate::corpus::{
    adequacy_suite, faithfulness_suite, generate_corpus, generate_product_corpus, lockstep_suite, write_corpus,
    corpus_file_text, Faithful, SuiteReport, CORPUS_FUEL,
};
use crate::error::{Error, Result};
use crate::lang::{Lang, LangTag};
use crate::nsp::{denote, lwf_probe, pretty, to_json, ExplorationBudget, DEFAULT_STEPS};
use crate::reduce::{evaluate, trace, Outcome};
use crate::separation::{admit_term, synthesize, verify_separation, SeparationOptions};
use crate::seqcode::SeqCode;
use crate::syntax::parse;
use crate::term::Term;
use crate::translate::{eliminate_products, t_min_to_w, to_pcf, w_to_t_min};

#[derive(Parser, Debug)]
#[command(name = "nsplab", version, about = "Typed lambda languages, nested sequential procedures and bar recursion")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate a closed program of type nat by small-step reduction.
    Eval(EvalArgs),
    /// Translate a term between languages.
    Translate(TranslateArgs),
    /// Show the nested sequential procedure denoted by a term.
    Nsp(NspArgs),
    /// Bar recursion over given F and G, or a conformance check.
    Barrec(BarrecArgs),
    /// Synthesize and verify a counterexample against a candidate recursor.
    Separate(SeparateArgs),
    /// Generate seeded corpora of closed programs.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    lang: LangTag,
    #[arg(long, default_value_t = CORPUS_FUEL)]
    fuel: u64,
    /// Print every step as a JSON line {step, rule, term}.
    #[arg(long)]
    trace: bool,
    file: PathBuf,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    #[arg(long)]
    from: LangTag,
    #[arg(long)]
    to: LangTag,
    /// Eliminate product types (source and target language must agree).
    #[arg(long)]
    eliminate_products: bool,
    file: PathBuf,
}

#[derive(Args, Debug)]
struct NspArgs {
    #[arg(long, value_name = "FILE")]
    denote: PathBuf,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = 4)]
    branches: usize,
    /// Run the LWF probe with this nesting bound.
    #[arg(long, value_name = "D")]
    lwf: Option<usize>,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: u64,
}

#[derive(Args, Debug)]
struct BarrecArgs {
    #[arg(long, default_value = "kohlenbach")]
    flavor: Flavor,
    #[arg(long = "F", value_name = "FILE")]
    f: Option<PathBuf>,
    #[arg(long = "G", value_name = "FILE")]
    g: Option<PathBuf>,
    /// A node such as "<0,1>"; the empty string is the root.
    #[arg(long)]
    node: Option<String>,
    /// Check a candidate recursor of type (nat→nat)→nat → (nat→nat)→nat → nat → nat.
    #[arg(long, value_name = "FILE")]
    conformance: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    depth: usize,
    #[arg(long, default_value_t = 64)]
    window: u64,
}

#[derive(Args, Debug)]
struct SeparateArgs {
    #[arg(long, value_name = "FILE")]
    candidate: PathBuf,
    #[arg(long, default_value_t = 8)]
    depth_cap: usize,
    /// Step budget per NSP node.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    fuel: u64,
    #[arg(long, default_value_t = 1 << 16)]
    k_cap: u64,
    #[arg(long, default_value_t = 6)]
    lwf_bound: usize,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CorpusArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    size: usize,
    /// Language tags; repeat for several. Defaults to b.
    #[arg(long = "lang")]
    langs: Vec<LangTag>,
    /// PCF programs that use pairs.
    #[arg(long)]
    products: bool,
    /// Write one file per program here instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the suites that apply to each generated language.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = CORPUS_FUEL)]
    fuel: u64,
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Usage(_) | Error::Syntax { .. } | Error::ZeroFuel => 2,
                _ => 1,
            }
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Usage(format!("output: {e}"))
}

fn read_term(path: &Path) -> Result<Term> {
    let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Cmd::Eval(a) => eval(a, out),
        Cmd::Translate(a) => translate(a, out),
        Cmd::Nsp(a) => nsp(a, out),
        Cmd::Barrec(a) => barrec(a, out),
        Cmd::Separate(a) => separate(a, out),
        Cmd::Corpus(a) => corpus(a, out),
    }
}

fn eval(a: EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let m = read_term(&a.file)?;
    let r = if a.trace { trace(&m, a.lang, a.fuel)? } else { evaluate(&m, a.lang, a.fuel)? };
    for (i, s) in r.steps.iter().enumerate() {
        let line = json!({ "step": i + 1, "rule": s.rule.to_string(), "term": s.term.to_string() });
        writeln!(out, "{line}").map_err(io)?;
    }
    writeln!(out, "{}", r.outcome).map_err(io)?;
    Ok(if matches!(r.outcome, Outcome::Value(_)) { 0 } else { 1 })
}

fn translate(a: TranslateArgs, out: &mut dyn Write) -> Result<i32> {
    let m = read_term(&a.file)?;
    a.from.check(&m)?;
    let r = if a.eliminate_products {
        if a.from != a.to {
            return Err(Error::Usage("product elimination keeps the language: use the same --from and --to".into()));
        }
        eliminate_products(&m)?
    } else {
        match (a.from.lang, a.to.lang) {
            (_, Lang::Pcf | Lang::PcfByval) => to_pcf(&m, a.from)?,
            (Lang::TMin | Lang::T, Lang::W) => t_min_to_w(&m)?,
            (Lang::W, Lang::TMin) => w_to_t_min(&m)?,
            _ => return Err(Error::Inapplicable(format!("no translation from {} to {}", a.from, a.to))),
        }
    };
    a.to.check(&r)?;
    writeln!(out, "{r}").map_err(io)?;
    Ok(0)
}

fn nsp(a: NspArgs, out: &mut dyn Write) -> Result<i32> {
    let m = read_term(&a.denote)?;
    let p = denote(&m)?;
    if let Some(bound) = a.lwf {
        let budget = ExplorationBudget::new(a.steps, a.depth.max(4 * bound + 4), a.branches.max(1))?;
        let r = lwf_probe(&p, bound, &budget);
        let line = serde_json::to_string(&r).map_err(|e| Error::Invariant(e.to_string()))?;
        writeln!(out, "{line}").map_err(io)?;
        return Ok(0);
    }
    if a.json {
        writeln!(out, "{}", to_json(&p, a.depth, a.branches)).map_err(io)?;
    } else {
        writeln!(out, "{}", pretty(&p, a.depth, a.branches)).map_err(io)?;
    }
    Ok(0)
}

fn barrec(a: BarrecArgs, out: &mut dyn Write) -> Result<i32> {
    let f = a.f.as_deref().map(read_term).transpose()?.map(|t| denote(&t)).transpose()?;
    let g = a.g.as_deref().map(read_term).transpose()?.map(|t| denote(&t)).transpose()?;
    if let Some(path) = &a.conformance {
        let cand = denote(&read_term(path)?)?;
        let battery = match (f, g) {
            (Some(f), Some(g)) => vec![BatteryEntry::new("F/G", f, g)],
            (None, None) => standard_battery()?,
            _ => return Err(Error::Usage("give both --F and --G, or neither for the standard battery".into())),
        };
        let r = conformance_check(&cand, &battery, a.flavor, conformance_caps(a.flavor))?;
        let violations: Vec<_> = r
            .violations
            .iter()
            .map(|v| json!({ "battery": v.battery, "node": SeqCode::from_slice(&v.node).to_string(), "expected": v.expected, "actual": v.actual }))
            .collect();
        let report = json!({
            "schema": "nsplab.conformance/1",
            "flavor": a.flavor.to_string(),
            "checked": r.checked,
            "violations": violations,
            "pass": r.passed(),
        });
        writeln!(out, "{report}").map_err(io)?;
        return Ok(if r.passed() { 0 } else { 1 });
    }
    let (Some(f), Some(g)) = (f, g) else {
        return Err(Error::Usage("barrec needs --F and --G (or --conformance)".into()));
    };
    let node: SeqCode = a.node.as_deref().unwrap_or("").parse()?;
    let value = reference_phi(&f, &g, &node, a.flavor)?;
    writeln!(out, "{value}").map_err(io)?;
    let caps = TreeCaps { depth: a.depth, window: a.window, ..TreeCaps::default() };
    let ex = explore_tree(&f, a.flavor, caps)?;
    let verdict = match &ex.verdict {
        TreeVerdict::WellFoundedUpToCaps => "well-founded up to caps".to_string(),
        TreeVerdict::InfinitePathWitness(p) => format!("path of internal nodes to the depth cap: {}", SeqCode::from_slice(p)),
        TreeVerdict::Exceeded => "node cap exceeded".to_string(),
    };
    let show = |xs: &[SeqCode]| {
        let mut v: Vec<String> = xs.iter().take(16).map(|x| x.to_string()).collect();
        if xs.len() > 16 {
            v.push(format!("… {} more", xs.len() - 16));
        }
        v.join(" ")
    };
    writeln!(out, "tree ({}): {verdict}; depth {}", a.flavor, ex.depth).map_err(io)?;
    writeln!(out, "internal: {}", show(&ex.internal)).map_err(io)?;
    writeln!(out, "leaves: {}", show(&ex.leaves)).map_err(io)?;
    Ok(0)
}

fn separate(a: SeparateArgs, out: &mut dyn Write) -> Result<i32> {
    let t = read_term(&a.candidate)?;
    let opts = SeparationOptions { depth_cap: a.depth_cap, steps: a.fuel, k_cap: a.k_cap, lwf_bound: a.lwf_bound };
    let cand = admit_term(&t, &opts)?;
    let pkg = synthesize(&cand.procedure, &opts)?;
    let report = verify_separation(&pkg, &opts)?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Invariant(e.to_string()))?;
    match &a.out {
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
            writeln!(out, "c = {}, K = {}, d = {}, pass = {}", report.c, report.big_k, report.d, report.pass).map_err(io)?;
        }
        None => writeln!(out, "{text}").map_err(io)?,
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn corpus(a: CorpusArgs, out: &mut dyn Write) -> Result<i32> {
    let langs = if a.products {
        vec![LangTag::PCF]
    } else if a.langs.is_empty() {
        vec![LangTag::B]
    } else {
        a.langs.clone()
    };
    if let Some(dir) = &a.out {
        let paths = write_corpus(dir, a.seed, a.size, &langs, a.products)?;
        writeln!(out, "wrote {} files to {} (seed {})", paths.len(), dir.display(), a.seed).map_err(io)?;
    }
    let mut ok = true;
    for &lang in &langs {
        let terms = if a.products { generate_product_corpus(a.seed, a.size) } else { generate_corpus(a.seed, a.size, lang) };
        if a.out.is_none() && !a.check {
            for (i, t) in terms.iter().enumerate() {
                write!(out, "{}", corpus_file_text(a.seed, lang, i, t)).map_err(io)?;
            }
        }
        if a.check {
            for r in suites_for(&terms, lang, a.products, a.fuel)? {
                ok &= r.passed();
                let line = serde_json::to_string(&r).map_err(|e| Error::Invariant(e.to_string()))?;
                writeln!(out, "{line}").map_err(io)?;
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn suites_for(terms: &[Term], lang: LangTag, products: bool, fuel: u64) -> Result<Vec<SuiteReport>> {
    let small = (fuel / 50).max(1);
    let mut v = vec![adequacy_suite(terms, lang, fuel)?];
    if products {
        v.push(faithfulness_suite(terms, Faithful::Products, small, 10)?);
    }
    match lang.lang {
        Lang::W => {
            v.push(lockstep_suite(terms, lang, 1_000, 256)?);
            v.push(faithfulness_suite(terms, Faithful::DoubleDagger, small, 10)?);
        }
        Lang::TMin => {
            v.push(lockstep_suite(terms, lang, 1_000, 256)?);
            v.push(faithfulness_suite(terms, Faithful::Dagger, small, 10)?);
        }
        _ => {}
    }
    Ok(v)
}
