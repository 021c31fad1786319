//! Seeded term corpora and the suites that run over them.
//!
//! `cargo run --example corpus [SEED]`

use nsplab::corpus::{adequacy_suite, faithfulness_suite, generate_corpus, lockstep_suite, Faithful, CORPUS_FUEL};
use nsplab::lang::LangTag;

fn main() -> nsplab::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    nsplab::with_big_stack(move || {
        for lang in [LangTag::B, LangTag::PCF_BYVAL, LangTag::T_MIN, LangTag::W] {
            println!("{lang}:");
            for t in generate_corpus(seed, 3, lang) {
                println!("  {t}");
            }
        }
        let pcf = generate_corpus(seed, 10, LangTag::PCF_BYVAL);
        println!("{:?}", adequacy_suite(&pcf, LangTag::PCF_BYVAL, CORPUS_FUEL)?);
        let w = generate_corpus(seed, 10, LangTag::W);
        println!("{:?}", lockstep_suite(&w, LangTag::W, 1_000, 256)?);
        println!("{:?}", faithfulness_suite(&w, Faithful::DoubleDagger, 20_000, 10)?);
        Ok(())
    })
}
