//! Bar trees, the reference recursor and conformance checking.
//!
//! `cargo run --example bar_recursion`

use nsplab::barrec::{
    conformance_caps, conformance_check, explore_tree, reference_phi, simplified_br, standard_battery, Flavor, TreeCaps,
};
use nsplab::nsp::denote;
use nsplab::seqcode::SeqCode;
use nsplab::syntax::parse;

fn main() -> nsplab::Result<()> {
    nsplab::with_big_stack(run)
}

fn run() -> nsplab::Result<()> {
    let f = denote(&parse(include_str!("fplus0.term"))?)?;
    let g = denote(&parse(include_str!("g0.term"))?)?;
    for flavor in [Flavor::Kohlenbach, Flavor::Spector] {
        let caps = TreeCaps { depth: 3, window: 4, ..TreeCaps::default() };
        let t = explore_tree(&f, flavor, caps)?;
        println!("{flavor} tree of F⁺₀: {:?}, {} internal, {} leaves", t.verdict, t.internal.len(), t.leaves.len());
    }
    for node in ["", "<3>", "<0,5>"] {
        let x: SeqCode = node.parse()?;
        match reference_phi(&f, &g, &x, Flavor::Kohlenbach) {
            Ok(v) => println!("Φ(F⁺₀, G₀, {x}) = {v}"),
            Err(e) => println!("Φ(F⁺₀, G₀, {x}): {e}"),
        }
    }
    let battery = standard_battery()?;
    for flavor in [Flavor::Kohlenbach, Flavor::Spector] {
        let br = denote(&simplified_br(flavor))?;
        let r = conformance_check(&br, &battery, flavor, conformance_caps(flavor))?;
        println!("BR^{flavor}: {} nodes checked, {} violations", r.checked, r.violations.len());
    }
    let fake = denote(&parse(include_str!("psi_trunc2.term"))?)?;
    let r = conformance_check(&fake, &battery, Flavor::Kohlenbach, conformance_caps(Flavor::Kohlenbach))?;
    println!("psi_trunc2: {} nodes checked, {} violations", r.checked, r.violations.len());
    if let Some(v) = r.violations.first() {
        println!("  first: {} at {:?}: expected {}, got {}", v.battery, v.node, v.expected, v.actual);
    }
    Ok(())
}
