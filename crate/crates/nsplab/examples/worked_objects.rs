//! The named functionals: F⁺₀, F₀, F_∞, G₀, G₁, BR^S and BR^K.
//!
//! `cargo run --example worked_objects`

use num_bigint::BigUint;
use nsplab::barrec::{canonical_br, reference_phi, simplified_br, Approximant, Flavor, GZero};
use nsplab::nsp::{denote, pretty};
use nsplab::separation::{make_truncated_candidate, synthesize, SeparationOptions};
use nsplab::seqcode::SeqCode;

fn main() -> nsplab::Result<()> {
    let f_plus0 = Approximant::plus(&[]);
    println!("F⁺₀ = {}", f_plus0.to_term());
    println!("    = {}", pretty(&f_plus0.to_procedure(), 2, 3));
    let f0 = Approximant::truncated(&[], &BigUint::from(2u32));
    println!("F₀ (cut 2) = {}", pretty(&f0.to_procedure(), 2, 3));
    println!("G₀ = {}", GZero.to_term());
    let c = reference_phi(&f_plus0, &GZero, &SeqCode::empty(), Flavor::Kohlenbach)?;
    println!("Φ(F⁺₀, G₀, ⟨⟩) = {c} = 4·⟨0⟩+2 with ⟨0⟩ = {}", SeqCode::from_u64s(&[0]).code());

    let psi = denote(&make_truncated_candidate(2))?;
    let pkg = synthesize(&psi, &SeparationOptions::default())?;
    println!("F_∞ for Ψ₂: moduli {:?}", pkg.state.f_inf.ks);
    println!("    = {}", pretty(&pkg.state.f_inf.to_procedure(), 3, 3));
    println!("G₁ for Ψ₂ = {}", pkg.g1.to_term());

    for flavor in [Flavor::Spector, Flavor::Kohlenbach] {
        println!("BR^{flavor} = {}", canonical_br(flavor));
        println!("  simplified: {}", simplified_br(flavor));
    }
    Ok(())
}
