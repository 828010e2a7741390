//! Re-checks certificates from their recorded data. Only truncation,
//! finite group arithmetic over `ℤ/pᴷ` and rule comparison are used; none of
//! the emitting code paths are called.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::certificate::{
    exactness_grades, Certificate, CertificateKind, CompletionReport, StabilizationReason, Witness,
};
use super::element::ElementRule;
use super::graded::{Component, GradedModule};
use super::tower::{derive_hom_transition, explicit_hom_image, Transition};
use crate::error::Result;
use crate::fpmod::{cokernel, is_epic, kernel, preimage, FpModule, FpMorphism, Ring};
use crate::linalg::IntMatrix;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub ok: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Verification {
    fn new() -> Verification {
        Verification { ok: true, checks: Vec::new() }
    }

    fn record(&mut self, name: impl Into<String>, passed: bool) {
        self.ok &= passed;
        self.checks.push(Check { name: name.into(), passed });
    }

    fn absorb(&mut self, prefix: &str, other: Verification) {
        for c in other.checks {
            self.record(format!("{prefix}: {}", c.name), c.passed);
        }
        self.ok &= other.ok;
    }
}

pub fn verify_certificate(c: &Certificate) -> Result<Verification> {
    let mut v = Verification::new();
    match &c.witness {
        Witness::MlFailure { .. } => v.record("kind matches witness", c.kind == CertificateKind::MLFailure),
        Witness::MlStabilized { .. } => v.record("kind matches witness", c.kind == CertificateKind::MLStabilized),
        Witness::MiddleExactnessFailure { .. } => {
            v.record("kind matches witness", c.kind == CertificateKind::MiddleExactnessFailure)
        }
        Witness::IdempotenceHolds { .. } => v.record("kind matches witness", c.kind == CertificateKind::IdempotenceHolds),
    }
    match &c.witness {
        Witness::MlFailure { tower, level, tail_rule, chain } => {
            v.record("prime matches", tower.base.p == c.p);
            v.record("hom tower", tower.transition == Transition::HomShift);
            let tail_ok = matches!(tower.base.tail(), Component::Cyclic { exp } if exp.same_values(tail_rule) || exp == *tail_rule);
            v.record("tail rule is the tail of the base", tail_ok);
            v.record("tail rule is unbounded", tail_rule.bound().is_none());
            v.record("chain is nonempty", !chain.is_empty());
            v.record("chain levels increase", chain.windows(2).all(|w| w[0].next_level == w[1].from_level));
            for s in chain {
                let e = tower.base.exponent(s.grade);
                v.record(format!("grade {} exponent", s.grade), e == Some(s.exponent));
                let (_, before) = explicit_hom_image(c.p, *level, s.from_level, s.exponent)?;
                let (_, after) = explicit_hom_image(c.p, *level, s.next_level, s.exponent)?;
                v.record(
                    format!("grade {}: strict drop from level {} to {}", s.grade, s.from_level, s.next_level),
                    before == s.image_exponent && after == s.next_image_exponent && before > after && s.from_level < s.next_level,
                );
            }
        }
        Witness::MlStabilized { tower, reason, bound, stabilization } => {
            v.record("prime matches", tower.base.p == c.p);
            match reason {
                StabilizationReason::SurjectiveTransitions => {
                    v.record("reduction tower", tower.transition == Transition::Reduction);
                    for k in 1..c.verifier.window {
                        let upper = tower.base.truncate(k + 1);
                        let lower = tower.base.truncate(k);
                        let pairs: BTreeSet<(u64, u64)> = sample_grades(&tower.base, c.verifier.window)
                            .into_iter()
                            .map(|n| (upper.exponent(n).unwrap(), lower.exponent(n).unwrap()))
                            .collect();
                        let onto = pairs.iter().map(|&(a, b)| reduction_is_onto(c.p, a, b)).collect::<Result<Vec<_>>>()?;
                        v.record(format!("transition {} -> {} onto in every sampled grade", k + 1, k), onto.iter().all(|&x| x));
                    }
                }
                StabilizationReason::BoundedExponents => {
                    v.record("hom tower", tower.transition == Transition::HomShift);
                    let sup = cyclic_sup(&tower.base);
                    v.record("recorded bound is the supremum of the exponents", sup.is_some() && sup == *bound);
                    let es: BTreeSet<u64> =
                        sample_grades(&tower.base, c.verifier.window).into_iter().filter_map(|n| tower.base.exponent(n)).collect();
                    for &(k, k0) in stabilization {
                        let mut ok = k0 >= k;
                        for &e in &es {
                            let at = explicit_hom_image(c.p, k, k0, e)?.1;
                            ok &= (1..=2).all(|j| explicit_hom_image(c.p, k, k0 + j, e).map(|r| r.1) == Ok(at));
                        }
                        v.record(format!("images in level {k} constant from level {k0}"), ok);
                    }
                }
            }
        }
        Witness::MiddleExactnessFailure { map_exponent: d, x, preimage: y } => {
            let (ElementRule::PPower { valuation: s, .. }, ElementRule::PPower { valuation: t, .. }) = (&x.rule, &y.rule) else {
                v.record("elements are p-power rules", false);
                return Ok(v);
            };
            let free = |m: &GradedModule| m.p == c.p && m.segments.len() == 1 && m.tail() == Component::Free;
            v.record("elements live in ⊕Z", free(&x.parent) && free(&y.parent));
            v.record("x has unbounded valuation", s.bound().is_none());
            v.record("v(x_n) >= d(n) for every n", s.ge_everywhere(d));
            v.record("preimage has bounded valuation", t.bound().is_some());
            let window = exactness_grades(c.verifier.levels);
            v.record("x_n = p^d(n) y_n on the window", (1..=window).all(|n| t.value(n) + d.value(n) == s.value(n)));
            v.absorb("stages", verify_stages(c, d, x, y)?);
        }
        Witness::IdempotenceHolds { module, rule_level, stages } => {
            v.record("prime matches", module.p == c.p);
            for st in stages {
                let stage = module.truncate(st.level);
                let recorded = (1..=st.exponents.len() as u64).all(|n| stage.exponent(n) == Some(st.exponents[(n - 1) as usize]));
                v.record(format!("stage {} exponents", st.level), recorded);
                let mut ok = true;
                for n in 1..=c.verifier.window {
                    ok &= completed_stage_exponent(module, n, st.level)? == Some(st.exponents[(n - 1) as usize]);
                    for kp in st.level..=c.verifier.window {
                        let e = module.truncate(kp).exponent(n).unwrap();
                        ok &= p_order_exponent(&cokernel_of_scalar(&cyclic(c.p, e), c.p, st.level)?)?
                            == Some(st.exponents[(n - 1) as usize]);
                    }
                }
                v.record(format!("stage {} of the completion of the completion", st.level), ok);
            }
            if *rule_level {
                let e = module.sup_exponent();
                v.record("bounded module equals its truncation", e.is_some_and(|e| module.truncate(e).same_module(module)));
            }
        }
    }
    Ok(v)
}

pub fn verify_report(r: &CompletionReport) -> Result<Verification> {
    let mut v = Verification::new();
    v.record("first certificate is an ML failure", r.ml_failure.kind == CertificateKind::MLFailure);
    v.record(
        "second certificate is a middle exactness failure",
        r.middle_exactness.kind == CertificateKind::MiddleExactnessFailure,
    );
    v.record("certificates use the report prime", r.ml_failure.p == r.p && r.middle_exactness.p == r.p);
    let again = derive_hom_transition(r.p, r.hom_transition.window)?;
    v.record("hom transition table reproduces", again == r.hom_transition && again.rule_matches);
    v.absorb("ml", verify_certificate(&r.ml_failure)?);
    v.absorb("exactness", verify_certificate(&r.middle_exactness)?);
    Ok(v)
}

fn cyclic(p: u64, e: u64) -> FpModule {
    FpModule::cyclic(Ring::Integers, num_traits::pow(BigInt::from(p), e as usize))
}

fn p_order_exponent(m: &FpModule) -> Result<Option<u64>> {
    let Some(mut o) = m.order() else { return Ok(None) };
    let p = BigInt::from(m.ring().prime().unwrap_or(0));
    let mut e = 0;
    while o > BigInt::one() {
        if p.is_zero() || !(&o % &p).is_zero() {
            return Ok(None);
        }
        o /= &p;
        e += 1;
    }
    Ok(Some(e))
}

fn cokernel_of_scalar(m: &FpModule, p: u64, k: u64) -> Result<FpModule> {
    let c = num_traits::pow(BigInt::from(p), k as usize);
    let f = FpMorphism::new(m.clone(), m.clone(), IntMatrix::scalar(m.generators(), c))?;
    let q = cokernel(&f).0;
    // read the cokernel over Z_p so its order is a p-power
    Ok(match q.ring() {
        Ring::Integers => q.with_ring(Ring::PAdic { p }),
        _ => q,
    })
}

/// `log_p` of `Ĉₙ / pᵏ`, where `Ĉₙ` is `ℤ_p` on free grades.
fn completed_stage_exponent(m: &GradedModule, n: u64, k: u64) -> Result<Option<u64>> {
    let component = match m.exponent(n) {
        None => FpModule::free(Ring::PAdic { p: m.p }, 1),
        Some(e) => cyclic(m.p, e).with_ring(Ring::PAdic { p: m.p }),
    };
    p_order_exponent(&cokernel_of_scalar(&component, m.p, k)?)
}

fn reduction_is_onto(p: u64, from: u64, to: u64) -> Result<bool> {
    let f = FpMorphism::new(cyclic(p, from), cyclic(p, to), IntMatrix::identity(1))?;
    Ok(is_epic(&f))
}

/// Grades `1..=window` plus each segment start and a point deep in the tail.
fn sample_grades(m: &GradedModule, window: u64) -> BTreeSet<u64> {
    let mut g: BTreeSet<u64> = (1..=window).collect();
    for (i, s) in m.segments.iter().enumerate() {
        g.insert(s.from);
        if let Some(next) = m.segments.get(i + 1) {
            g.insert(next.from - 1);
        }
    }
    g.insert(m.tail_start() + window);
    g
}

fn cyclic_sup(m: &GradedModule) -> Option<u64> {
    let mut sup = 0;
    for (i, s) in m.segments.iter().enumerate() {
        if let Component::Cyclic { exp } = s.component {
            let top = match m.segments.get(i + 1) {
                Some(next) => exp.value(next.from - 1),
                None => exp.bound()?,
            };
            sup = sup.max(top);
        }
    }
    Some(sup)
}

/// Finite linear algebra over `ℤ/pᴷ` for each recorded stage.
fn verify_stages(
    c: &Certificate,
    d: &super::rule::ExpRule,
    x: &super::element::SymbolicElement,
    y: &super::element::SymbolicElement,
) -> Result<Verification> {
    let mut v = Verification::new();
    let p = BigInt::from(c.p);
    let window = exactness_grades(c.verifier.levels);
    let expected = c.verifier.levels * window;
    v.record("all stages recorded", c.verifier.stage_matrices.len() as u64 == expected);
    let mut forced_at_top = 0;
    for st in &c.verifier.stage_matrices {
        let k = st.level;
        let modulus = p.pow(k as u32);
        let n = st.grade;
        let dn = d.value(n);
        let m = p.pow(dn.min(k) as u32) % &modulus;
        let xn = x.value(n) % &modulus;
        let recorded = st.matrix == vec![vec![m.clone()]] && st.vector == vec![xn.clone()];
        let ring = Ring::ModPrimePower { p: c.p, n: k as u32 };
        let line = FpModule::free(ring.clone(), 1);
        let g = FpMorphism::new(line.clone(), line.clone(), IntMatrix::scalar(1, st.matrix[0][0].clone()))?;
        // kernel membership: x vanishes in the stage-k quotient Z/p^min(d(n), k)
        let quotient = cokernel(&g).0;
        let in_kernel = quotient.is_zero_element(&st.vector)?;
        // image membership and forcing of the preimage
        let solution = preimage(&g, &st.vector)?;
        let mut ok = recorded && in_kernel && solution.is_some();
        if dn < k {
            let sol = solution.clone().unwrap_or_default();
            let unit = sol.first().is_some_and(|s| !(s % &p).is_zero());
            let (_, inc) = kernel(&g);
            let kernel_in_p = inc.matrix().columns().all(|col| col.iter().all(|e| (e % &p).is_zero()));
            let yn = y.value(n) % p.pow((k - dn) as u32);
            let agrees = sol.first().is_some_and(|s| (s - &yn) % p.pow((k - dn) as u32) == BigInt::zero());
            let forced_unit = unit && kernel_in_p;
            ok &= kernel_in_p && agrees;
            if k == c.verifier.levels && forced_unit {
                forced_at_top += 1;
            }
            if y.valuation(n) == Some(0) {
                ok &= forced_unit;
            }
        }
        v.record(format!("level {k} grade {n}"), ok);
    }
    let top_grades = (1..=window).filter(|&n| d.value(n) < c.verifier.levels).count();
    v.record(
        format!("every preimage is a unit at the {top_grades} grades constrained at level {}", c.verifier.levels),
        y.valuation(1) != Some(0) || forced_at_top == top_grades,
    );
    Ok(v)
}
