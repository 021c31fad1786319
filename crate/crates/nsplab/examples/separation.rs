//! Counterexample synthesis against a truncated candidate.
//!
//! `cargo run --example separation [DEPTH]`

use nsplab::barrec::{simplified_br, Flavor};
use nsplab::separation::{admit_term, make_truncated_candidate, synthesize, verify_separation, SeparationOptions};

fn main() -> nsplab::Result<()> {
    let depth = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let opts = SeparationOptions::default();
    let t = make_truncated_candidate(depth);
    println!("candidate: {t}");
    let cand = admit_term(&t, &opts)?;
    println!("admitted: {}", cand.evidence);
    let pkg = synthesize(&cand.procedure, &opts)?;
    let st = &pkg.state;
    println!("c = {}, d = {}", st.c, st.d);
    for (w, l) in st.levels.iter().enumerate() {
        println!("  level {w}: k = {}, m = {}, {} oracle calls", l.k, l.m, l.entries.len());
    }
    println!("path x = {:?}", pkg.path.x);
    println!("path y = {:?}", pkg.path.y);
    println!("G₁ = {}", pkg.g1.to_term());
    let r = verify_separation(&pkg, &opts)?;
    println!("{}", serde_json::to_string_pretty(&r).unwrap());

    match admit_term(&simplified_br(Flavor::Kohlenbach), &opts) {
        Ok(_) => println!("the genuine recursor was admitted"),
        Err(e) => println!("genuine recursor: {e}"),
    }
    Ok(())
}
