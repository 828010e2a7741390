use lcomplete::monoidal::{CoherenceKind, MonoidalContext};
use lcomplete::reflection::{descend_to_integers, is_l0_complete, l0};
use lcomplete::sample::{random_finite_module, random_module, rng};
use lcomplete::{FpModule, Reflector, Ring};
use num_bigint::BigInt;
use proptest::prelude::*;

fn zmod(d: i64) -> FpModule {
    FpModule::cyclic(Ring::Integers, d)
}

/// Reflects `m` into the subcategory and reads it back as a ℤ-module.
fn into_d(f: &Reflector, m: &FpModule) -> FpModule {
    descend_to_integers(&l0(f, m).unwrap())
}

#[test]
fn tensor_of_cyclic_groups_oracle() {
    // ℤ/a ⊗_𝒟 ℤ/b = ℤ/gcd(a, b, pᴺ) for F = ModReduction(p, N)
    let ctx = MonoidalContext::new(Reflector::ModReduction { p: 3, n: 2 }, Ring::Integers).unwrap();
    let f = *ctx.reflector();
    for a in [1i64, 3, 9, 27, 6, 18, 0] {
        for b in [1i64, 3, 9, 2, 45, 0] {
            let expected = num_integer::gcd(num_integer::gcd(a, b), 9);
            let t = ctx.tensor_d(&into_d(&f, &zmod(a)), &into_d(&f, &zmod(b))).unwrap();
            assert_eq!(t.order(), Some(BigInt::from(expected)), "a={a} b={b}");
        }
    }
}

#[test]
fn coherence_on_small_tuples() {
    let ctx = MonoidalContext::new(Reflector::ModReduction { p: 2, n: 2 }, Ring::Integers).unwrap();
    let objects = [zmod(1), zmod(2), zmod(4), FpModule::from_factors(Ring::Integers, &[BigInt::from(2), BigInt::from(4)], 0)];
    for kind in CoherenceKind::ALL {
        let arity = kind.arity();
        let mut idx = vec![0; arity];
        loop {
            let tuple: Vec<FpModule> = idx.iter().map(|&i| objects[i].clone()).collect();
            assert!(ctx.coherence_check(kind, &tuple).unwrap().holds, "{kind} on {idx:?}");
            let mut i = 0;
            while i < arity {
                idx[i] += 1;
                if idx[i] < objects.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == arity {
                break;
            }
        }
    }
}

#[test]
fn torsion_free_quotient_structure() {
    let ctx = MonoidalContext::new(Reflector::TorsionFreeQuotient { p: 2 }, Ring::Integers).unwrap();
    let m = into_d(ctx.reflector(), &FpModule::from_factors(Ring::Integers, &[BigInt::from(2), BigInt::from(6)], 1));
    for kind in CoherenceKind::ALL {
        let tuple = vec![m.clone(); kind.arity()];
        assert!(ctx.coherence_check(kind, &tuple).unwrap().holds, "{kind}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tensor_matches_native(seed in any::<u64>()) {
        let ctx = MonoidalContext::new(Reflector::ModReduction { p: 2, n: 2 }, Ring::Integers).unwrap();
        let mut r = rng(seed);
        let x = into_d(ctx.reflector(), &random_module(&mut r, &Ring::Integers, 3, 3, 8));
        let y = into_d(ctx.reflector(), &random_module(&mut r, &Ring::Integers, 3, 3, 8));
        let (ours, native) = ctx.compare_with_native(&x, &y).unwrap();
        prop_assert_eq!(ours, native);
    }

    #[test]
    fn internal_hom_is_complete(seed in any::<u64>()) {
        let f = Reflector::ModReduction { p: 2, n: 3 };
        let ctx = MonoidalContext::new(f, Ring::Integers).unwrap();
        let mut r = rng(seed);
        let x = into_d(&f, &random_module(&mut r, &Ring::Integers, 2, 2, 8));
        let y = into_d(&f, &random_module(&mut r, &Ring::Integers, 2, 2, 8));
        let h = ctx.internal_hom_d(&x, &y).unwrap();
        prop_assert!(is_l0_complete(&f, &h.module).unwrap());
    }

    #[test]
    fn closedness(seed in any::<u64>()) {
        let f = Reflector::ModReduction { p: 2, n: 1 };
        let ctx = MonoidalContext::new(f, Ring::Integers).unwrap();
        let mut r = rng(seed);
        let mut obj = || into_d(&f, &random_finite_module(&mut r, &Ring::Integers, 2, 4));
        let (x, y, z) = (obj(), obj(), obj());
        let rep = ctx.closedness_check(&x, &y, &z).unwrap();
        prop_assert!(rep.bijective);
    }
}
