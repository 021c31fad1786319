//! Small-step evaluation with a recorded trace.
//!
//! `cargo run --example eval_trace`

use nsplab::lang::LangTag;
use nsplab::reduce::{evaluate, trace};
use nsplab::syntax::parse;

fn main() -> nsplab::Result<()> {
    let src = "((rec nat) 1 (lam (x nat) (k nat) (times x 2)) 3)";
    let m = parse(src)?;
    println!("{m}");
    let t = trace(&m, LangTag::T, 1_000)?;
    for (i, s) in t.steps.iter().enumerate() {
        println!("{:>3} {:<12} {}", i + 1, s.rule.to_string(), s.term);
    }
    println!("=> {}", t.outcome);

    let search = parse(include_str!("min5.term"))?;
    let r = evaluate(&search, LangTag::PCF, 100)?;
    println!("min5.term => {} in {} steps", r.outcome, r.consumed);

    let omega = parse("((Y nat) (lam (b nat) b))")?;
    println!("Y(λb.b) => {}", evaluate(&omega, LangTag::PCF, 500)?.outcome);
    Ok(())
}
