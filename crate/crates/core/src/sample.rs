//! Seeded generators of modules, morphisms and rules for exhaustive and
//! randomized checks.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fpmod::{hom_module, FpModule, FpMorphism, Ring};
use crate::linalg::IntMatrix;
use crate::towers::{Component, ExpRule, GradedModule, Segment};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Invariant factor chains `d₁ | d₂ | … | d_k`, `dᵢ > 1`, with product at
/// most `max_order` and every `dᵢ` accepted by `allowed`.
fn factor_chains(max_order: u64, allowed: &dyn Fn(u64) -> bool) -> Vec<Vec<u64>> {
    fn go(prefix: &mut Vec<u64>, product: u64, max: u64, allowed: &dyn Fn(u64) -> bool, out: &mut Vec<Vec<u64>>) {
        out.push(prefix.clone());
        let last = prefix.last().copied().unwrap_or(1);
        let mut d = if last == 1 { 2 } else { last };
        while product * d <= max {
            if d % last == 0 && allowed(d) {
                prefix.push(d);
                go(prefix, product * d, max, allowed, out);
                prefix.pop();
            }
            d += if last == 1 { 1 } else { last };
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 1, max_order, allowed, &mut out);
    out
}

/// One module per isomorphism class of finite modules of order at most
/// `max_order` over `ring` (ℤ or ℤ/pᴺ), including the zero module.
pub fn finite_modules_up_to(max_order: u64, ring: &Ring) -> Vec<FpModule> {
    let chains = match *ring {
        Ring::Integers => factor_chains(max_order, &|_| true),
        Ring::ModPrimePower { p, n } => {
            let top = p.checked_pow(n).unwrap_or(u64::MAX);
            factor_chains(max_order, &|d| top % d == 0)
        }
        Ring::PAdic { p } => factor_chains(max_order, &|d| {
            let mut d = d;
            while d % p == 0 {
                d /= p;
            }
            d == 1
        }),
    };
    chains
        .into_iter()
        .map(|c| {
            let factors: Vec<BigInt> = c.into_iter().map(BigInt::from).collect();
            FpModule::from_factors(ring.clone(), &factors, 0)
        })
        .collect()
}

/// `ℤ/pᵉ` over `ring` for `0 ≤ e ≤ max_exp`.
pub fn cyclic_p_groups(p: u64, max_exp: u32, ring: &Ring) -> Vec<FpModule> {
    (0..=max_exp).map(|e| FpModule::cyclic(ring.clone(), num_traits::pow(BigInt::from(p), e as usize))).collect()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(-bound..=bound)))
}

/// A unimodular matrix and its inverse, built from elementary operations.
pub fn random_unimodular(rng: &mut impl Rng, n: usize, steps: usize) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut v = IntMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            u.set(0, 0, -BigInt::one());
            v.set(0, 0, -BigInt::one());
        }
        return (u, v);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = BigInt::from(rng.gen_range(-2i64..=2));
        // row_i += c·row_j on u; col_j -= c·col_i on the inverse
        for col in 0..n {
            let x = u.get(i, col) + &c * u.get(j, col);
            u.set(i, col, x);
        }
        for row in 0..n {
            let x = v.get(row, j) - &c * v.get(row, i);
            v.set(row, j, x);
        }
    }
    (u, v)
}

/// A module with up to `max_gens` generators and small random relations.
pub fn random_module(rng: &mut impl Rng, ring: &Ring, max_gens: usize, max_rels: usize, bound: i64) -> FpModule {
    let g = rng.gen_range(0..=max_gens);
    let k = rng.gen_range(0..=max_rels);
    let rel = random_matrix(rng, g, k, bound);
    FpModule::new(ring.clone(), g, rel).expect("shape matches")
}

/// A finite module: random relations plus a nonzero diagonal block.
pub fn random_finite_module(rng: &mut impl Rng, ring: &Ring, max_gens: usize, bound: i64) -> FpModule {
    let g = rng.gen_range(0..=max_gens);
    let k = rng.gen_range(0..=2);
    let diag = IntMatrix::from_fn(g, g, |i, j| {
        if i == j {
            BigInt::from(rng.gen_range(1..=bound.max(1)))
        } else {
            BigInt::zero()
        }
    });
    let rel = diag.hcat(&random_matrix(rng, g, k, bound));
    FpModule::new(ring.clone(), g, rel).expect("shape matches")
}

/// The same module on scrambled generators, with the isomorphism from `m`.
pub fn scramble(rng: &mut impl Rng, m: &FpModule) -> (FpModule, FpMorphism) {
    let g = m.generators();
    let (u, _) = random_unimodular(rng, g, 3 * g);
    let rel = u.checked_mul(m.relations()).expect("conformable");
    let target = FpModule::new(m.ring().clone(), g, rel).expect("shape matches");
    let iso = FpMorphism::new_unchecked(m.clone(), target.clone(), u);
    (target, iso)
}

/// A uniformly chosen coordinate vector of `Hom(M, N)` turned into a map;
/// free coordinates are drawn from `[-bound, bound]`.
pub fn random_morphism(rng: &mut impl Rng, m: &FpModule, n: &FpModule, bound: i64) -> Result<FpMorphism> {
    let h = hom_module(m, n)?;
    let c: Vec<BigInt> = h
        .module
        .coordinate_moduli()
        .iter()
        .map(|d| {
            if d.is_zero() {
                BigInt::from(rng.gen_range(-bound..=bound))
            } else {
                let top = d.clone();
                BigInt::from(rng.gen_range(0..=u64::MAX)) % top
            }
        })
        .collect();
    h.to_morphism(&h.module.lift_coordinates(&c)?)
}

/// A small rule: slope `0..=2`, intercept `-2..=3`, denominator `1..=2`,
/// optional cap `≤ 6`.
pub fn random_rule(rng: &mut impl Rng) -> ExpRule {
    let a = rng.gen_range(0..=2);
    let b = rng.gen_range(-2..=3);
    let den = rng.gen_range(1..=2);
    let cap = rng.gen_bool(0.3).then(|| rng.gen_range(0..=6));
    ExpRule { a, b, den, cap }
}

/// Up to three segments, each cyclic with a random rule or free.
pub fn random_graded_module(rng: &mut impl Rng, p: u64) -> GradedModule {
    let count = rng.gen_range(1..=3);
    let mut from = 1;
    let mut segments = Vec::new();
    for _ in 0..count {
        let component = if rng.gen_bool(0.2) { Component::Free } else { Component::Cyclic { exp: random_rule(rng) } };
        segments.push(Segment { from, component });
        from += rng.gen_range(1..=4);
    }
    GradedModule::new(p, segments).expect("valid by construction")
}
