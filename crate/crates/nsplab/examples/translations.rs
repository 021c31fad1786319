//! Translations into PCF, between T+min and W, and product elimination.
//!
//! `cargo run --example translations`

use nsplab::lang::LangTag;
use nsplab::reduce::evaluate;
use nsplab::syntax::parse;
use nsplab::translate::{check_lockstep, eliminate_products, t_min_to_w, to_pcf, w_to_t_min};

fn main() -> nsplab::Result<()> {
    let m = parse("(min (lam (x nat) (monus 4 x)) 0)")?;
    println!("source (t-min): {m}");
    println!("  value: {}", evaluate(&m, LangTag::T_MIN, 10_000)?.outcome);

    let pcf = to_pcf(&m, LangTag::T_MIN)?;
    println!("to pcf-byval: {pcf}");
    println!("  value: {}", evaluate(&pcf, LangTag::PCF_BYVAL, 10_000)?.outcome);
    let r = check_lockstep(&m, LangTag::T_MIN, 10_000, 256)?;
    println!("  lock-step: {} source steps, {} target steps, failure {:?}", r.source_steps, r.target_steps, r.failure);

    let w = t_min_to_w(&m)?;
    println!("to w: {w}");
    println!("  value: {}", evaluate(&w, LangTag::W, 100_000)?.outcome);
    let back = w_to_t_min(&w)?;
    println!("back to t-min: {}", evaluate(&back, LangTag::T_MIN, 1_000_000)?.outcome);

    let p = parse("(fst ((lam (p (* nat nat)) (pair (snd p) (fst p))) (pair 3 4)))")?;
    let q = eliminate_products(&p)?;
    println!("with products: {p}");
    println!("product-free: {q}");
    println!("  values: {} / {}", evaluate(&p, LangTag::PCF, 1_000)?.outcome, evaluate(&q, LangTag::PCF, 10_000)?.outcome);
    Ok(())
}
