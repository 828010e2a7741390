use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::element::{null_test, SymbolicElement};
use super::graded::GradedModule;
use super::rule::ExpRule;
use super::tower::{derive_hom_transition, hom_tower, HomTransitionDerivation, Tower, Transition};
use crate::error::{Error, Result};
use crate::fpmod::is_prime;
use crate::linalg::{deserialize_vectors, int_vec, serialize_vectors};

/// Truncation levels at which exactness witnesses are re-checked.
pub const CHECK_LEVELS: u64 = 12;

/// Interpretation attached to Mittag-Leffler and exactness certificates.
/// It rests on outside results and is not checked here.
pub const LIM1_ANNOTATION: &str = "interpretation (external, not checked): for a tower of countable abelian \
groups lim^1 vanishes iff the Mittag-Leffler condition holds, and lim^1 of the Hom tower feeds the kernel of \
L0F(M) -> F(M); only the Mittag-Leffler and exactness facts themselves are certified";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CertificateKind {
    MLFailure,
    MLStabilized,
    MiddleExactnessFailure,
    IdempotenceHolds,
}

/// Level `k'` has image strictly larger in level `k` than level
/// `next_level` does, as seen at `grade`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub from_level: u64,
    pub grade: u64,
    pub exponent: u64,
    pub image_exponent: u64,
    pub next_level: u64,
    pub next_image_exponent: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizationReason {
    SurjectiveTransitions,
    BoundedExponents,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdempotenceStage {
    pub level: u64,
    /// `log_p` of the grade components of the stage, for grades `1..=window`.
    pub exponents: Vec<u64>,
}

/// The verifier's raw material for one grade at one truncation level: the
/// `1×1` matrix of `diag(p^{d(n)})` over `ℤ/p^K` and the entry `xₙ mod p^K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageMatrix {
    pub level: u64,
    pub grade: u64,
    #[serde(serialize_with = "serialize_vectors", deserialize_with = "deserialize_vectors")]
    pub matrix: Vec<Vec<BigInt>>,
    #[serde(with = "int_vec")]
    pub vector: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    MlFailure {
        tower: Tower,
        level: u64,
        /// The exponent rule of the tail, which is unbounded.
        tail_rule: ExpRule,
        chain: Vec<ChainStep>,
    },
    MlStabilized {
        tower: Tower,
        reason: StabilizationReason,
        /// Largest exponent, for bounded towers.
        bound: Option<u64>,
        /// `(k, k₀)`: images of all levels `≥ k₀` in level `k` agree.
        stabilization: Vec<(u64, u64)>,
    },
    MiddleExactnessFailure {
        map_exponent: ExpRule,
        x: SymbolicElement,
        preimage: SymbolicElement,
    },
    IdempotenceHolds {
        module: GradedModule,
        rule_level: bool,
        stages: Vec<IdempotenceStage>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierBlock {
    pub window: u64,
    pub levels: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stage_matrices: Vec<StageMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub p: u64,
    pub witness: Witness,
    pub trace: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
    pub verifier: VerifierBlock,
}

/// Decides the Mittag-Leffler condition of `t` from its rules; `window`
/// bounds the emitted chain and table only.
pub fn ml_certificate(t: &Tower, window: u64) -> Result<Certificate> {
    if window < 2 {
        return Err(Error::Precondition("window must be at least 2".into()));
    }
    t.base.validate()?;
    let p = t.p();
    let verifier = VerifierBlock { window, levels: window, stage_matrices: Vec::new() };
    let bound = t.contributing_bound();
    let stabilized = |reason, stabilization: Vec<(u64, u64)>, trace| Certificate {
        kind: CertificateKind::MLStabilized,
        p,
        witness: Witness::MlStabilized { tower: t.clone(), reason, bound, stabilization },
        trace,
        annotation: Some(LIM1_ANNOTATION.into()),
        verifier: verifier.clone(),
    };
    if t.transition == Transition::Reduction {
        let trace = vec![
            format!("tower of truncations of {}", t.base),
            "every transition 1 -> 1 is onto in each grade, so the image of level k' in level k is all of level k"
                .into(),
        ];
        return Ok(stabilized(StabilizationReason::SurjectiveTransitions, (1..=window).map(|k| (k, k)).collect(), trace));
    }
    if let Some(e) = bound {
        let trace = vec![
            format!("Hom tower of {}", t.base),
            format!("exponents are bounded by {e}"),
            format!("at grade n the image of level k' in level k is p^max(0, min(k,e) - max(0, k' - max(k,e))), zero once k' >= k + e(n)"),
            format!("hence images in level k are constant from level k + {e}"),
        ];
        return Ok(stabilized(StabilizationReason::BoundedExponents, (1..=window).map(|k| (k, k + e)).collect(), trace));
    }
    let tail_rule = match t.base.tail() {
        super::graded::Component::Cyclic { exp } if !exp.is_bounded() => exp,
        _ => return Err(Error::Unsupported("unbounded exponents outside a cyclic tail".into())),
    };
    let k = 1;
    let mut chain = Vec::new();
    let mut level = k;
    for _ in 0..window {
        let grade = t
            .grade_reaching(level, 1)
            .ok_or_else(|| Error::Invariant("unbounded tail reaches every level".into()))?;
        let e = t.base.exponent(grade).expect("cyclic grade");
        let next = k + e;
        chain.push(ChainStep {
            from_level: level,
            grade,
            exponent: e,
            image_exponent: t.image_exponent(k, level, grade),
            next_level: next,
            next_image_exponent: t.image_exponent(k, next, grade),
        });
        level = next;
    }
    let mut trace = vec![
        format!("Hom tower of {}", t.base),
        format!("tail exponent rule e(n) = {tail_rule} is unbounded"),
        "at grade n the image of level k' in level 1 is nonzero for k' <= e(n) and zero from k' = 1 + e(n) on".into(),
        "so for every k' some grade with e(n) >= k' shows a strict drop later: images in level 1 never stabilize".into(),
    ];
    for s in &chain {
        trace.push(format!(
            "grade {}: image from level {} has exponent {}, from level {} exponent {}",
            s.grade, s.from_level, s.image_exponent, s.next_level, s.next_image_exponent
        ));
    }
    Ok(Certificate {
        kind: CertificateKind::MLFailure,
        p,
        witness: Witness::MlFailure { tower: t.clone(), level: k, tail_rule, chain },
        trace,
        annotation: Some(LIM1_ANNOTATION.into()),
        verifier,
    })
}

/// The sequence `⊕ℤ →diag(p^{d(n)})→ ⊕ℤ → ⊕ℤ/p^{d(n)} → 0` after completion,
/// probed with one candidate kernel element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessProbe {
    pub map_exponent: ExpRule,
    pub x: SymbolicElement,
    pub preimage: SymbolicElement,
    pub x_is_element: bool,
    pub maps_to_zero: bool,
    pub preimage_is_element: bool,
    pub certificate: Option<Certificate>,
}

/// `x = (pⁿ)ₙ` refutes middle exactness of the completed `diag(pⁿ)` sequence.
pub fn middle_exactness_witness(p: u64) -> Result<Certificate> {
    middle_exactness_witness_with(p, ExpRule::linear(1, 0))?
        .certificate
        .ok_or_else(|| Error::Invariant("diag(p^n) failed to produce a witness".into()))
}

/// Probes the completed sequence for `diag(p^{d(n)})`. For unbounded `d` the
/// candidate is `xₙ = p^{d(n)}` with forced preimage `1`. For `d` constant
/// `D` it is `xₙ = p^{n+D−1}` with forced preimage `p^{n−1}`, which is null,
/// so no certificate is produced.
pub fn middle_exactness_witness_with(p: u64, d: ExpRule) -> Result<ExactnessProbe> {
    if !is_prime(p) {
        return Err(Error::Malformed(format!("{p} is not prime")));
    }
    d.validate()?;
    let middle = GradedModule::free(p)?;
    let (s, pre) = match d.bound() {
        None => (d, ExpRule::constant(0)),
        Some(b) if d.value(1) == b => (ExpRule::linear(1, b as i64 - 1), ExpRule::linear(1, -1)),
        Some(_) => return Err(Error::Unsupported("map exponents must be unbounded or constant".into())),
    };
    let x = SymbolicElement::p_power(middle.clone(), 1, s)?;
    let preimage = SymbolicElement::p_power(middle, 1, pre)?;
    let x_is_element = null_test(&x);
    let maps_to_zero = s.ge_everywhere(&d);
    let preimage_is_element = null_test(&preimage);
    let certificate = (x_is_element && maps_to_zero && !preimage_is_element).then(|| {
        let trace = vec![
            format!("map diag(p^d(n)) with d(n) = {d}"),
            format!("x_n = p^({s}): valuation rule unbounded, so x lies in the completion of the middle term"),
            format!("v(x_n) = {s} >= d(n) for all n, so x maps to 0 in the completion of the quotient"),
            "diag(p^d(n)) is injective grade-wise, so a preimage is forced to be y_n = x_n / p^d(n)".into(),
            format!("y_n = p^({pre}) has bounded valuation in free components, so y is not in the completion"),
            "hence the completed sequence is not exact at the middle term".into(),
        ];
        Certificate {
            kind: CertificateKind::MiddleExactnessFailure,
            p,
            witness: Witness::MiddleExactnessFailure { map_exponent: d, x: x.clone(), preimage: preimage.clone() },
            trace,
            annotation: Some(LIM1_ANNOTATION.into()),
            verifier: VerifierBlock {
                window: exactness_grades(CHECK_LEVELS),
                levels: CHECK_LEVELS,
                stage_matrices: stage_matrices(&d, &x, CHECK_LEVELS),
            },
        }
    });
    Ok(ExactnessProbe { map_exponent: d, x, preimage, x_is_element, maps_to_zero, preimage_is_element, certificate })
}

pub(crate) fn exactness_grades(levels: u64) -> u64 {
    levels + 4
}

fn stage_matrices(d: &ExpRule, x: &SymbolicElement, levels: u64) -> Vec<StageMatrix> {
    let p = BigInt::from(x.parent.p);
    let mut out = Vec::new();
    for level in 1..=levels {
        let modulus = p.pow(level as u32);
        for grade in 1..=exactness_grades(levels) {
            let m = p.pow(d.value(grade).min(level) as u32) % &modulus;
            let v = x.value(grade) % &modulus;
            out.push(StageMatrix { level, grade, matrix: vec![vec![m]], vector: vec![v] });
        }
    }
    out
}

/// Stage-wise check that completing `M` twice agrees with completing once,
/// for stages `k ≤ window`.
pub fn idempotence_check_completion(m: &GradedModule, window: u64) -> Result<Certificate> {
    m.validate()?;
    if window < 1 {
        return Err(Error::Precondition("window must be positive".into()));
    }
    let mut stages = Vec::new();
    for k in 1..=window {
        let stage = m.truncate(k);
        for kp in k..=window {
            if !m.truncate(kp).truncate(k).same_module(&stage) {
                return Err(Error::Invariant(format!("stage {kp} does not reduce to stage {k}")));
            }
        }
        stages.push(IdempotenceStage { level: k, exponents: (1..=window).map(|n| stage.exponent(n).unwrap()).collect() });
    }
    let rule_level = m.sup_exponent().is_some_and(|e| m.truncate(e).same_module(m));
    let mut trace = vec![
        format!("module {m}"),
        format!("stage k of the completion is truncate(M, k); stage k of its completion is truncate(truncate(M, k'), k) for k' >= k"),
        format!("checked truncate(truncate(M, k'), k) = truncate(M, k) as rules for 1 <= k <= k' <= {window}"),
    ];
    if rule_level {
        trace.push(format!("exponents bounded by {}: M equals its own truncation, so it is already complete", m.sup_exponent().unwrap()));
    }
    Ok(Certificate {
        kind: CertificateKind::IdempotenceHolds,
        p: m.p,
        witness: Witness::IdempotenceHolds { module: m.clone(), rule_level, stages },
        trace,
        annotation: None,
        verifier: VerifierBlock { window, levels: window, stage_matrices: Vec::new() },
    })
}

/// The two certificates separating naive completion from `L₀F`, with the
/// transition derivation they rely on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionReport {
    pub p: u64,
    pub hom_transition: HomTransitionDerivation,
    pub ml_failure: Certificate,
    pub middle_exactness: Certificate,
    pub conclusion: Vec<String>,
    pub annotation: String,
}

pub fn l0_vs_completion_report(p: u64) -> Result<CompletionReport> {
    let m = GradedModule::cyclic(p, ExpRule::linear(1, 0))?;
    let ml_failure = ml_certificate(&hom_tower(&m)?, 6)?;
    let middle_exactness = middle_exactness_witness(p)?;
    let conclusion = vec![
        format!("the Hom tower of ⊕ Z/{p}^n violates Mittag-Leffler"),
        format!("completing ⊕Z -diag({p}^n)-> ⊕Z -> ⊕ Z/{p}^n -> 0 is not exact in the middle"),
        "so the image of naive completion is not an abelian subcategory in which cokernels are computed as in \
the ambient category, and it cannot be the reflective abelian approximation"
            .into(),
        "on finitely generated modules the derived reflector L0F of the reflection layer is exact where required and \
idempotent, and its complete objects form the abelian approximation"
            .into(),
    ];
    Ok(CompletionReport {
        p,
        hom_transition: derive_hom_transition(p, 6)?,
        ml_failure,
        middle_exactness,
        conclusion,
        annotation: LIM1_ANNOTATION.into(),
    })
}
