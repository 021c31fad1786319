//! Nested sequential procedures: denotation, application, order and LWF.
//!
//! `cargo run --example nsp_explore`

use nsplab::lang::LangTag;
use nsplab::nsp::{apply, denote, lwf_language, lwf_probe, pretty, syntactic_leq, to_json, ExplorationBudget, Procedure};
use nsplab::syntax::parse;

fn main() -> nsplab::Result<()> {
    let f = denote(&parse("(lam (f (-> nat nat)) (ifzero (f 0) (f 1) (suc (f 2))))")?)?;
    println!("{}", pretty(&f, 3, 3));
    println!("{}", serde_json::to_string_pretty(&to_json(&f, 2, 2)).unwrap());

    let inc = denote(&parse("(lam (x nat) (suc x))")?)?;
    println!("F(suc) = {:?}", apply(&f, &inc)?.ground());

    let budget = ExplorationBudget::new(100_000, 6, 4)?;
    let bot = Procedure::bottom(f.ty().clone());
    println!("⊥ ⊑ F: {:?}", syntactic_leq(&bot, &f, &budget));

    let loopy = denote(&parse("((Y nat) (lam (b nat) b))")?)?;
    println!("Y(λb.b) = {:?}", loopy.ground());

    let psi = parse(include_str!("psi_trunc2.term"))?;
    println!("psi_trunc2.term: in {:?}, in t: {}", lwf_language(&psi), LangTag::T.contains(&psi));
    let r = lwf_probe(&denote(&psi)?, 4, &budget);
    println!("lwf probe: {:?}, nesting {}, {} nodes", r.verdict, r.max_nesting, r.nodes);
    Ok(())
}
