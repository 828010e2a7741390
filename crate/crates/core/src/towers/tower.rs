use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::graded::{Component, GradedModule};
use crate::error::{Error, Result};
use crate::fpmod::{hom_enumerate, hom_module, FpModule, FpMorphism, Ring};
use crate::linalg::IntMatrix;

/// How level `k+1` maps to level `k`, grade by grade.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    /// `ℤ/p^{min(k+1,e)} → ℤ/p^{min(k,e)}`, `1 ↦ 1`.
    Reduction,
    /// Precomposition with `ℤ/pᵏ → ℤ/p^{k+1}`, `1 ↦ p`, on
    /// `Hom(ℤ/p^{k+1}, Cₙ) → Hom(ℤ/pᵏ, Cₙ)`.
    HomShift,
}

/// A tower `… → T_{k+1} → T_k → … → T_1` of graded modules built from a
/// base module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tower {
    pub base: GradedModule,
    pub transition: Transition,
}

/// `{truncate(M, k)}ₖ` with the canonical reductions.
pub fn completion_tower(m: &GradedModule) -> Tower {
    Tower { base: m.clone(), transition: Transition::Reduction }
}

/// `{Hom(ℤ/pᵏ, M)}ₖ`. The transition rule is first re-derived from explicit
/// Hom computations on a small window.
pub fn hom_tower(m: &GradedModule) -> Result<Tower> {
    let d = derive_hom_transition(m.p, 6)?;
    if !d.rule_matches {
        return Err(Error::Invariant(format!("hom transition rule disagrees with explicit computation at p = {}", m.p)));
    }
    Ok(Tower { base: m.clone(), transition: Transition::HomShift })
}

impl Tower {
    pub fn p(&self) -> u64 {
        self.base.p
    }

    /// Exponent of the grade-`n` component of level `k`.
    pub fn level_exponent(&self, k: u64, n: u64) -> u64 {
        match (self.transition, self.base.exponent(n)) {
            (Transition::Reduction, None) => k,
            (Transition::HomShift, None) => 0,
            (_, Some(e)) => e.min(k),
        }
    }

    /// `t` such that the transition `k+1 → k` at grade `n` is `p^t` times a
    /// surjection onto the generator.
    pub fn step_power(&self, k: u64, n: u64) -> u64 {
        match (self.transition, self.base.exponent(n)) {
            (Transition::Reduction, _) | (Transition::HomShift, None) => 0,
            (Transition::HomShift, Some(e)) => u64::from(e <= k),
        }
    }

    /// Exponent of the image of level `k'` in level `k` at grade `n`.
    pub fn image_exponent(&self, k: u64, k_prime: u64, n: u64) -> u64 {
        assert!(k_prime >= k, "levels must satisfy k <= k'");
        let c = self.level_exponent(k, n);
        let shift = match (self.transition, self.base.exponent(n)) {
            (Transition::Reduction, _) | (Transition::HomShift, None) => 0,
            (Transition::HomShift, Some(e)) => k_prime.saturating_sub(k.max(e)),
        };
        c.saturating_sub(shift)
    }

    /// Supremum of the exponents that contribute nonzero components, or
    /// `None` if unbounded.
    pub fn contributing_bound(&self) -> Option<u64> {
        match self.transition {
            Transition::Reduction => self.base.sup_exponent(),
            Transition::HomShift => (0..self.base.segments.len()).try_fold(0, |acc, i| match self.base.segment_sup(i) {
                Some(b) => b.map(|b| acc.max(b)),
                None => Some(acc),
            }),
        }
    }

    /// Smallest grade `n ≥ from` whose exponent is at least `target`, if any.
    pub fn grade_reaching(&self, target: u64, from: u64) -> Option<u64> {
        let m = &self.base;
        for (i, s) in m.segments.iter().enumerate() {
            let start = s.from.max(from);
            let end = m.segments.get(i + 1).map(|t| t.from);
            if end.is_some_and(|e| start >= e) {
                continue;
            }
            let Component::Cyclic { exp } = s.component else {
                continue;
            };
            if exp.bound().is_some_and(|b| b < target) {
                continue;
            }
            // monotone on the segment: exponential then binary search
            let mut hi = start;
            let mut step = 1;
            while exp.value(hi) < target {
                hi = start + step;
                step *= 2;
                if end.is_some_and(|e| hi >= e) {
                    hi = end.unwrap() - 1;
                    break;
                }
            }
            if exp.value(hi) < target {
                continue;
            }
            let mut lo = start;
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if exp.value(mid) >= target {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            return Some(lo);
        }
        None
    }
}

/// One cell of the explicit Hom computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub k: u64,
    pub e: u64,
    /// `log_p |Hom(ℤ/pᵏ, ℤ/pᵉ)|`.
    pub level_exponent: u64,
    /// `log_p` of the image of `Hom(ℤ/p^{k+1}, ℤ/pᵉ)` under precomposition.
    pub image_exponent: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomTransitionDerivation {
    pub p: u64,
    pub window: u64,
    pub rows: Vec<TransitionRow>,
    /// Whether every row fits `level = min(k, e)` and
    /// `image = level − [e ≤ k]`.
    pub rule_matches: bool,
}

fn cyclic(p: u64, e: u64) -> FpModule {
    FpModule::cyclic(Ring::Integers, num_traits::pow(BigInt::from(p), e as usize))
}

fn log_p(p: u64, x: &BigInt) -> Option<u64> {
    let mut x = x.clone();
    let p = BigInt::from(p);
    let mut v = 0;
    while x > BigInt::from(1) {
        if !(&x % &p).is_zero() {
            return None;
        }
        x /= &p;
        v += 1;
    }
    Some(v)
}

/// Order exponent of `x` in a finite `p`-group.
pub(crate) fn element_order_exponent(p: u64, m: &FpModule, x: &[BigInt]) -> Result<u64> {
    let p = BigInt::from(p);
    let mut y = x.to_vec();
    let mut v = 0;
    while !m.is_zero_element(&y)? {
        y.iter_mut().for_each(|c| *c *= &p);
        v += 1;
        if v > 4096 {
            return Err(Error::Precondition("element of infinite order".into()));
        }
    }
    Ok(v)
}

/// Image exponent of precomposition with `ℤ/pᵏ → ℤ/p^{k'}`, `1 ↦ p^{k'−k}`,
/// computed from the Hom modules: the image in the cyclic group
/// `Hom(ℤ/pᵏ, ℤ/pᵉ)` is generated by the image of highest order.
pub(crate) fn explicit_hom_image(p: u64, k: u64, k_prime: u64, e: u64) -> Result<(u64, u64)> {
    let a = hom_module(&cyclic(p, k_prime), &cyclic(p, e))?;
    let b = hom_module(&cyclic(p, k), &cyclic(p, e))?;
    let level = log_p(p, &b.module.order().expect("finite"))
        .ok_or_else(|| Error::Invariant("hom group is not a p-group".into()))?;
    let iota = FpMorphism::new(
        cyclic(p, k),
        cyclic(p, k_prime),
        IntMatrix::scalar(1, num_traits::pow(BigInt::from(p), (k_prime - k) as usize)),
    )?;
    let mut image = 0;
    for i in 0..a.module.generators() {
        let mut unit = vec![BigInt::zero(); a.module.generators()];
        unit[i] = BigInt::from(1);
        let phi = a.to_morphism(&unit)?;
        let psi = phi.compose(&iota)?;
        image = image.max(element_order_exponent(p, &b.module, &b.from_morphism(&psi)?)?);
    }
    Ok((level, image))
}

/// Tabulates `Hom(ℤ/p^{k+1}, ℤ/pᵉ) → Hom(ℤ/pᵏ, ℤ/pᵉ)` for `k, e ≤ window`
/// and compares the table with the closed-form rule used by [`Tower`].
/// Small cases are cross-checked by listing every homomorphism.
pub fn derive_hom_transition(p: u64, window: u64) -> Result<HomTransitionDerivation> {
    if !crate::fpmod::is_prime(p) {
        return Err(Error::Malformed(format!("{p} is not prime")));
    }
    let mut rows = Vec::new();
    let mut ok = true;
    for k in 1..=window {
        for e in 1..=window {
            let (level, image) = explicit_hom_image(p, k, k + 1, e)?;
            if num_traits::pow(BigInt::from(p), e as usize) <= BigInt::from(4096) {
                let (src, dst) = (cyclic(p, k + 1), cyclic(p, e));
                let iota = FpMorphism::new(
                    cyclic(p, k),
                    src.clone(),
                    IntMatrix::scalar(1, BigInt::from(p)),
                )?;
                let keys: HashSet<_> = hom_enumerate(&src, &dst, 4096)?
                    .iter()
                    .map(|phi| phi.compose(&iota).map(|c| c.key()))
                    .collect::<Result<_>>()?;
                ok &= num_traits::pow(BigInt::from(p), image as usize) == BigInt::from(keys.len());
            }
            let rule_level = k.min(e);
            let rule_image = rule_level - u64::from(e <= k);
            ok &= level == rule_level && image == rule_image;
            rows.push(TransitionRow { k, e, level_exponent: level, image_exponent: image });
        }
    }
    Ok(HomTransitionDerivation { p, window, rows, rule_matches: ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::towers::rule::ExpRule;

    fn example(p: u64) -> GradedModule {
        GradedModule::cyclic(p, ExpRule::linear(1, 0)).unwrap()
    }

    #[test]
    fn derived_rule_matches_for_small_primes() {
        for p in [2, 3, 5] {
            let d = derive_hom_transition(p, 6).unwrap();
            assert!(d.rule_matches, "p = {p}");
            assert_eq!(d.rows.len(), 36);
        }
    }

    #[test]
    fn completion_levels() {
        let t = completion_tower(&example(2));
        assert_eq!(t.level_exponent(3, 5), 3);
        assert_eq!(t.level_exponent(3, 2), 2);
        assert_eq!(t.image_exponent(2, 9, 7), 2);
        let f = completion_tower(&GradedModule::free(2).unwrap());
        assert_eq!(f.level_exponent(4, 100), 4);
    }

    #[test]
    fn hom_images_match_explicit_composites() {
        let t = hom_tower(&example(2)).unwrap();
        for k in 1..=4 {
            for kp in k..=7 {
                for n in 1..=6 {
                    let (level, image) = explicit_hom_image(2, k, kp, n).unwrap();
                    assert_eq!(level, t.level_exponent(k, n));
                    assert_eq!(image, t.image_exponent(k, kp, n), "k={k} k'={kp} n={n}");
                }
            }
        }
    }

    #[test]
    fn reaching_grades() {
        let t = hom_tower(&example(3)).unwrap();
        assert_eq!(t.grade_reaching(5, 1), Some(5));
        assert_eq!(t.grade_reaching(5, 9), Some(9));
        let bounded = completion_tower(&GradedModule::cyclic(2, ExpRule::constant(3)).unwrap());
        assert_eq!(bounded.grade_reaching(4, 1), None);
        assert_eq!(bounded.contributing_bound(), Some(3));
    }
}
