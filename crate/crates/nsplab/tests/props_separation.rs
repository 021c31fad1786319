//! Counterexample synthesis over a random family of System T candidates.

use nsplab::barrec::GZero;
use nsplab::lang::LangTag;
use nsplab::separation::{admit_term, synthesize, verify_separation, RandomMember, SeparationOptions};
use nsplab::syntax::parse;
use proptest::prelude::*;

/// Bodies over `F`, `G`, `x` and, under an argument abstraction, `z`.
fn expr(with_z: bool) -> BoxedStrategy<String> {
    let mut leaves = vec![(0u32..5).prop_map(|n| n.to_string()).boxed(), Just("x".to_string()).boxed()];
    if with_z {
        leaves.push(Just("z".to_string()).boxed());
    }
    let leaf = prop::strategy::Union::new(leaves);
    leaf.prop_recursive(4, 14, 3, move |e| {
        let arg = if with_z { e.clone() } else { expr(true) };
        prop_oneof![
            arg.clone().prop_map(|b| format!("(F (lam (z nat) {b}))")),
            arg.prop_map(|b| format!("(G (lam (z nat) {b}))")),
            (e.clone(), e.clone()).prop_map(|(a, b)| format!("(plus {a} {b})")),
            (e.clone(), e.clone(), e).prop_map(|(a, b, c)| format!("(ifzero {a} {b} {c})")),
        ]
    })
    .boxed()
}

fn candidate() -> impl Strategy<Value = String> {
    expr(false).prop_map(|b| format!("(lam (F (-> (-> nat nat) nat)) (G (-> (-> nat nat) nat)) (x nat) {b})"))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn random_t_candidates_are_separated(src in candidate(), seed in any::<u64>()) {
        let opts = SeparationOptions::default();
        let t = parse(&src).unwrap();
        prop_assert!(LangTag::T.contains(&t));
        let cand = admit_term(&t, &opts).unwrap();
        let pkg = synthesize(&cand.procedure, &opts).unwrap();
        pkg.check_invariants().unwrap();
        pkg.state.check_invariants().unwrap();
        let r = verify_separation(&pkg, &opts).unwrap();
        prop_assert!(r.pass, "{}: {:?}", src, r);
        prop_assert_ne!(r.psi_result, r.phi_result);
        let st = &pkg.state;
        prop_assert!(st.secured_by(&GZero.to_procedure(), opts.steps).unwrap());
        prop_assert!(st.secured_by(&pkg.g1.to_procedure(), opts.steps).unwrap());
        prop_assert!(st.secured_by(&RandomMember::new(st, seed).to_procedure(), opts.steps).unwrap());
    }
}
