use lcomplete::sample::{random_graded_module, random_rule, rng};
use lcomplete::towers::{
    completion_tower, hom_tower, idempotence_check_completion, middle_exactness_witness_with, ml_certificate,
    null_test, verify_certificate, CertificateKind, Component, ExpRule, GradedModule, Segment, SymbolicElement,
};
use proptest::prelude::*;

/// Finite-window reading of the null condition: for each level `k ≤ 20`,
/// `v(xₙ) ≥ min(k, e(n))` on the last stretch `n ∈ [L, H]` of a long window.
/// Rules are small enough that their tails are settled well before `L`.
fn brute_null(x: &SymbolicElement) -> bool {
    const L: u64 = 400;
    const H: u64 = 420;
    (1..=20).all(|k| {
        (L..=H).all(|n| {
            let v = x.valuation(n).unwrap_or(u64::MAX);
            let need = x.parent.exponent(n).map_or(k, |e| e.min(k));
            v >= need
        })
    })
}

fn random_parent(r: &mut impl rand::Rng) -> GradedModule {
    let tail = if r.gen_bool(0.3) { Component::Free } else { Component::Cyclic { exp: random_rule(r) } };
    GradedModule::new(2, vec![Segment { from: 1, component: tail }]).unwrap()
}

#[test]
fn null_test_agrees_with_brute_force() {
    let mut r = rng(2024);
    for _ in 0..200 {
        let parent = random_parent(&mut r);
        let s = random_rule(&mut r);
        let x = SymbolicElement::p_power(parent, 1, s).unwrap();
        assert_eq!(null_test(&x), brute_null(&x), "{x:?}");
    }
}

#[test]
fn half_valuation_brute_force() {
    // xₙ = p^{⌈n/2⌉} in ⊕ℤ/pⁿ, checked on k, n ≤ 20: eventually v ≥ min(k, n)
    let m = GradedModule::cyclic(2, ExpRule::linear(1, 0)).unwrap();
    let x = SymbolicElement::p_power(m, 1, ExpRule::new(1, 1, 2, None).unwrap()).unwrap();
    assert!(null_test(&x));
    for k in 1..=10 {
        // from n = 2k on, ⌈n/2⌉ ≥ k
        assert!((2 * k..=20).all(|n| x.valuation(n).unwrap() >= k.min(n)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn truncation_is_a_semilattice_action(seed in any::<u64>(), a in 0u64..8, b in 0u64..8) {
        let m = random_graded_module(&mut rng(seed), 3);
        prop_assert!(m.truncate(a).truncate(b).same_module(&m.truncate(a.min(b))));
        for n in 1..30 {
            let e = m.exponent(n);
            prop_assert_eq!(m.truncate(a).exponent(n), Some(e.map_or(a, |e| e.min(a))));
        }
    }

    #[test]
    fn completion_towers_satisfy_ml(seed in any::<u64>()) {
        let m = random_graded_module(&mut rng(seed), 2);
        let c = ml_certificate(&completion_tower(&m), 4).unwrap();
        prop_assert_eq!(c.kind, CertificateKind::MLStabilized);
        prop_assert!(verify_certificate(&c).unwrap().ok);
    }

    #[test]
    fn hom_towers_fail_ml_iff_unbounded(seed in any::<u64>()) {
        let m = random_graded_module(&mut rng(seed), 2);
        let c = ml_certificate(&hom_tower(&m).unwrap(), 3).unwrap();
        let unbounded = (0..m.segments.len()).any(|i| m.segment_sup(i) == Some(None));
        prop_assert_eq!(c.kind == CertificateKind::MLFailure, unbounded);
        let v = verify_certificate(&c).unwrap();
        prop_assert!(v.ok, "{:?}", v.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    }

    #[test]
    fn idempotence_holds_on_random_rule_modules(seed in any::<u64>()) {
        let m = random_graded_module(&mut rng(seed), 3);
        let c = idempotence_check_completion(&m, 6).unwrap();
        prop_assert!(verify_certificate(&c).unwrap().ok);
    }

    #[test]
    fn exactness_probe_matches_boundedness(a in 0u64..3, b in 0i64..4) {
        let d = ExpRule::linear(a, b);
        let probe = middle_exactness_witness_with(2, d).unwrap();
        prop_assert!(probe.maps_to_zero && probe.x_is_element);
        prop_assert_eq!(probe.certificate.is_some(), a > 0);
        if let Some(c) = probe.certificate {
            prop_assert!(verify_certificate(&c).unwrap().ok);
        }
    }
}
