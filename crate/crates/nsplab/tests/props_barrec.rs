//! Sequence coding, bar conditions, bar trees and the reference recursor.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use nsplab::barrec::{
    bar_condition, bar_condition_host, bar_condition_term, explore_tree, leaf_value, reference_phi, Approximant, BarTree,
    Flavor, Functional, GZero, HostFn, NodeStatus, SpectorView, TreeCaps, TreeVerdict,
};
use nsplab::lang::LangTag;
use nsplab::nsp::denote;
use nsplab::reduce::evaluate;
use nsplab::seqcode::SeqCode;
use nsplab::syntax::parse;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn nums(xs: &[u64]) -> Vec<BigUint> {
    xs.iter().map(|&x| BigUint::from(x)).collect()
}

fn eval_lib(src: &str) -> BigUint {
    evaluate(&parse(src).unwrap(), LangTag::T, 100_000).unwrap().outcome.value().cloned().unwrap()
}

fn approximant() -> impl Strategy<Value = Approximant> {
    (prop::collection::vec(1u64..4, 0..3), prop::option::of(1u64..4)).prop_map(|(ks, cut)| match cut {
        None => Approximant::plus(&nums(&ks)),
        Some(k) => Approximant::truncated(&nums(&ks), &BigUint::from(k)),
    })
}

fn flavor() -> impl Strategy<Value = Flavor> {
    prop_oneof![Just(Flavor::Spector), Just(Flavor::Kohlenbach)]
}

fn small_seq() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..4, 0..4)
}

/// Total functionals that only read `f` below 4.
fn shallow_functional() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![(0u32..4).prop_map(|n| n.to_string()), (0u32..4).prop_map(|i| format!("(f {i})"))];
    let body = leaf.prop_recursive(3, 12, 3, |e| {
        prop_oneof![
            (e.clone(), e.clone()).prop_map(|(a, b)| format!("(plus {a} {b})")),
            (e.clone(), e.clone(), e).prop_map(|(a, b, c)| format!("(ifzero {a} {b} {c})")),
        ]
    });
    body.prop_map(|b| format!("(lam (f (-> nat nat)) {b})"))
}

#[test]
fn coding_is_a_bijection_below_ten_thousand() {
    for n in 0u64..10_000 {
        let s = SeqCode::from_code(BigUint::from(n));
        let xs = s.decode();
        assert_eq!(SeqCode::from_slice(&xs), s);
        assert_eq!(s.len(), xs.len());
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn coding_laws(xs in prop::collection::vec(0u64..1000, 0..8), z in 0u64..1000, j in 0u64..5, i in 0u64..12) {
        let s = SeqCode::from_u64s(&xs);
        prop_assert_eq!(s.decode(), nums(&xs));
        prop_assert_eq!(s.len(), xs.len());
        let mut longer = xs.clone();
        longer.push(z);
        prop_assert_eq!(s.add_u64(z), SeqCode::from_u64s(&longer));
        for (k, x) in xs.iter().enumerate() {
            prop_assert_eq!(s.index(k), Some(BigUint::from(*x)));
        }
        let expected = xs.get(i as usize).copied().unwrap_or(j);
        prop_assert_eq!(s.basic(&BigUint::from(j), &BigUint::from(i)), BigUint::from(expected));
        let c = s.code();
        prop_assert_eq!(eval_lib(&format!("(len {c})")), BigUint::from(xs.len()));
        prop_assert_eq!(eval_lib(&format!("(add {c} {z})")), s.add_u64(z).into_code());
        prop_assert_eq!(eval_lib(&format!("(basic {c} {j} {i})")), BigUint::from(expected));
    }

    #[test]
    fn bar_condition_agrees_across_representations(a in approximant(), xs in small_seq(), fl in flavor()) {
        let x = SeqCode::from_u64s(&xs);
        let term = a.to_term();
        let host = bar_condition_host(&a, &x, fl).ok();
        prop_assert_eq!(bar_condition(&denote(&term).unwrap(), &x, fl).ok(), host);
        // The truncated functional diverges above its cut; reduction then runs out of fuel.
        prop_assert_eq!(bar_condition_term(&term, &x, fl, 20_000).ok(), host);
    }
}

fn tree_sets(f: &dyn Functional, fl: Flavor, caps: TreeCaps) -> (BTreeSet<SeqCode>, BTreeSet<SeqCode>, TreeVerdict) {
    let e = explore_tree(f, fl, caps).unwrap();
    (e.leaves.into_iter().collect(), e.internal.into_iter().collect(), e.verdict)
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn tree_laws(ks in prop::collection::vec(1u64..4, 0..3), fl in flavor()) {
        let a = Approximant::plus(&nums(&ks));
        // Spector trees of these functionals run as deep as the codes they return.
        let caps = match fl {
            Flavor::Kohlenbach => TreeCaps { depth: 8, window: 4, nodes: 20_000 },
            Flavor::Spector => TreeCaps { depth: 4, window: 3, nodes: 2_000 },
        };
        let tree = BarTree::new(&a, fl, caps);
        let (leaves, internal, verdict) = tree_sets(&a, fl, caps);
        prop_assert!(leaves.is_disjoint(&internal));
        for x in leaves.iter().chain(&internal) {
            let ps = x.prefixes();
            for p in &ps[..ps.len() - 1] {
                prop_assert!(internal.contains(p), "prefix {} of {} is not internal", p, x);
            }
            let want = if leaves.contains(x) { NodeStatus::Leaf } else { NodeStatus::Internal };
            prop_assert_eq!(tree.status(x).unwrap(), want);
        }
        if fl == Flavor::Kohlenbach {
            prop_assert_eq!(verdict, TreeVerdict::WellFoundedUpToCaps);
        }
    }

    #[test]
    fn spector_tree_of_u_is_the_kohlenbach_tree(ks in prop::collection::vec(1u64..4, 0..3)) {
        let a = Approximant::plus(&nums(&ks));
        let caps = TreeCaps { depth: 8, window: 4, nodes: 20_000 };
        let u = SpectorView { f: &a, search_cap: 64 };
        prop_assert!(!bar_condition_host(&a, &SeqCode::empty(), Flavor::Kohlenbach).unwrap());
        prop_assert_eq!(tree_sets(&u, Flavor::Spector, caps), tree_sets(&a, Flavor::Kohlenbach, caps));
    }

    #[test]
    fn continuous_functionals_have_well_founded_trees(src in shallow_functional()) {
        let f = denote(&parse(&src).unwrap()).unwrap();
        let caps = TreeCaps { depth: 6, window: 3, nodes: 20_000 };
        let (_, _, verdict) = tree_sets(&f, Flavor::Kohlenbach, caps);
        prop_assert_eq!(verdict, TreeVerdict::WellFoundedUpToCaps);
    }

    #[test]
    fn reference_recursor_is_determined_by_its_equations(ks in prop::collection::vec(1u64..4, 0..3), xs in small_seq()) {
        let a = Approximant::plus(&nums(&ks));
        let proc = a.to_procedure();
        let x = SeqCode::from_u64s(&xs);
        let tree = BarTree::new(&a, Flavor::Kohlenbach, TreeCaps::default());
        let phi = |y: &SeqCode| reference_phi(&a, &GZero, y, Flavor::Kohlenbach);
        match tree.status(&x).unwrap() {
            NodeStatus::Outside => prop_assert!(phi(&x).is_err()),
            NodeStatus::Leaf => prop_assert_eq!(phi(&x).unwrap(), leaf_value(&x)),
            NodeStatus::Internal => {
                let child: HostFn<'_> = &|z| phi(&x.add(z));
                prop_assert_eq!(phi(&x).unwrap(), GZero.call(child).unwrap());
            }
        }
        prop_assert_eq!(phi(&x).ok(), reference_phi(&proc, &GZero, &x, Flavor::Kohlenbach).ok());
    }
}
