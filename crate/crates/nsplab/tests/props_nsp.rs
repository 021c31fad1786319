//! Properties of the procedure model: adequacy, β/η, monotonicity, LWF
//! closure and the context lemma.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use nsplab::barrec::GZero;
use nsplab::corpus::{adequacy_suite, generate_corpus, CORPUS_FUEL};
use nsplab::lang::LangTag;
use nsplab::nsp::{
    apply, apply_all, denote, extensional_leq_on_grid, lwf_language, lwf_probe, syntactic_leq, to_json, Branches,
    ExplorationBudget, Expr, Ground, LwfVerdict, Procedure, Tri,
};
use nsplab::reduce::evaluate;
use nsplab::separation::{analyze, make_truncated_candidate, SeparationOptions};
use nsplab::syntax::{parse, print};
use nsplab::Type;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

/// Closed type-1 bodies over the variable `f`.
fn body() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![(0u32..6).prop_map(|n| n.to_string()), Just("(f 1)".to_string())];
    leaf.prop_recursive(4, 24, 3, |e| {
        prop_oneof![
            e.clone().prop_map(|a| format!("(f {a})")),
            e.clone().prop_map(|a| format!("(suc {a})")),
            (e.clone(), e.clone()).prop_map(|(a, b)| format!("(plus {a} {b})")),
            (e.clone(), e.clone(), e).prop_map(|(a, b, c)| format!("(ifzero {a} {b} {c})")),
        ]
    })
}

fn functional() -> impl Strategy<Value = String> {
    body().prop_map(|b| format!("(lam (f (-> nat nat)) {b})"))
}

fn den(src: &str) -> Procedure {
    denote(&parse(src).unwrap()).unwrap()
}

fn json(p: &Procedure) -> serde_json::Value {
    to_json(p, 6, 4)
}

/// `λx. case x of (i ⇒ table(i) | _ ⇒ ⊥)`.
fn partial(table: &BTreeMap<u64, u64>) -> Procedure {
    let t: BTreeMap<BigUint, Expr> = table.iter().map(|(&k, &v)| (BigUint::from(k), Expr::num(v))).collect();
    Procedure::build(Type::pure(1), move |xs| Expr::case(&xs[0], Vec::new(), Branches::table(t, |_| Expr::Bot)))
}

fn budget() -> ExplorationBudget {
    ExplorationBudget::new(100_000, 8, 6).unwrap()
}

proptest! {
    #![proptest_config(config(4))]

    #[test]
    fn adequacy_over_seeds(seed in any::<u64>()) {
        for lang in [LangTag::PCF_BYVAL, LangTag::T, LangTag::W, LangTag::T0_STR_MIN] {
            let r = adequacy_suite(&generate_corpus(seed, 3, lang), lang, CORPUS_FUEL).unwrap();
            prop_assert!(r.passed(), "{:?}", r.failures);
        }
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn beta_and_eta(f in functional(), a in 0u32..5) {
        let beta = den(&format!("((lam (g (-> (-> nat nat) nat)) (g (lam (z nat) (plus z {a})))) {f})"));
        let direct = apply(&den(&f), &den(&format!("(lam (z nat) (plus z {a}))"))).unwrap();
        prop_assert_eq!(json(&beta), json(&direct));
        let eta = den(&format!("(lam (h (-> nat nat)) ({f} (lam (z nat) (h z))))"));
        prop_assert_eq!(json(&eta), json(&den(&f)));
    }

    #[test]
    fn bottom_is_least(f in functional()) {
        let p = den(&f);
        prop_assert_eq!(syntactic_leq(&Procedure::bottom(p.ty().clone()), &p, &budget()), Tri::True);
    }

    #[test]
    fn context_lemma(
        small in prop::collection::btree_map(0u64..8, 0u64..8, 0..6),
        extra in prop::collection::btree_map(0u64..8, 0u64..8, 0..6),
        a in 0u64..8,
        b in 0u64..8,
    ) {
        let mut big = extra;
        big.extend(small.iter().map(|(k, v)| (*k, *v)));
        let (p, q) = (partial(&small), partial(&big));
        let grid: Vec<Vec<Procedure>> = (0..10u64).map(|i| vec![Procedure::numeral(i)]).collect();
        prop_assert_ne!(extensional_leq_on_grid(&p, &q, &grid, 10_000), Tri::False);
        let r = den(&format!("(lam (f (-> nat nat)) (plus (f {a}) (f (f {b}))))"));
        let (rp, rq) = (apply(&r, &p).unwrap(), apply(&r, &q).unwrap());
        if let Ground::Value(v) = rp.ground() {
            prop_assert_eq!(rq.ground(), Ground::Value(v));
        }
        prop_assert_ne!(syntactic_leq(&rp, &rq, &budget()), Tri::False);
    }

    #[test]
    fn lwf_closure(seed in any::<u64>()) {
        for lang in [LangTag::T_MIN, LangTag::W] {
            // Divergent subterms are re-forced at every explored branch.
            let terms = generate_corpus(seed, 3, lang).into_iter().filter(|t| evaluate(t, lang, 20_000).unwrap().outcome.value().is_some());
            for t in terms {
                let src = format!("(lam (F (-> (-> nat nat) nat)) (plus (F (lam (z nat) (plus z {0}))) {0}))", print(&t));
                let wrapped = parse(&src).unwrap();
                prop_assert!(lwf_language(&wrapped).is_some());
                let r = lwf_probe(&denote(&wrapped).unwrap(), 4, &budget());
                prop_assert_eq!(r.verdict, LwfVerdict::CertifiedUpTo(4));
            }
        }
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn approximants_are_monotone_through_candidates(depth in 1u64..4, x in 0u64..4) {
        let psi = denote(&make_truncated_candidate(depth)).unwrap();
        let st = analyze(&psi, &SeparationOptions::default()).unwrap();
        let g0 = GZero.to_procedure();
        for w in 0..=st.d {
            let lo = apply_all(&psi, &[st.f_trunc(w).to_procedure(), g0.clone(), Procedure::numeral(x)]).unwrap();
            let hi = apply_all(&psi, &[st.f_plus(w).to_procedure(), g0.clone(), Procedure::numeral(x)]).unwrap();
            prop_assert_ne!(syntactic_leq(&lo, &hi, &budget()), Tri::False);
            if let Ground::Value(v) = lo.ground() {
                prop_assert_eq!(hi.ground(), Ground::Value(v));
            }
        }
    }
}
