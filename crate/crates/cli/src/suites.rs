//! Property suites behind the `check-*` commands. Each returns a summary of
//! counts plus the first counterexample, if any.
//!
//! Exhaustive loops run on rayon; results are reduced in input order so the
//! summaries do not depend on scheduling.

use std::collections::BTreeSet;

use lcomplete::fpmod::{cokernel, hom_enumerate, is_epic, kernel, NormalForm};
use lcomplete::monoidal::{CoherenceKind, CoherenceOutcome, MonoidalContext};
use lcomplete::reflection::{
    adjunction_roundtrip, cokernel_in_d, criterion_check, derived_idempotence_check, descend_to_integers,
    eta_factorization_check, is_l0_complete, kernel_in_d, l0, projective_check, CriterionVerdict,
};
use lcomplete::sample::{cyclic_p_groups, finite_modules_up_to, random_finite_module, random_module, random_morphism, rng};
use lcomplete::{FpModule, FpMorphism, Reflector, Ring};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::CliResult;

/// Hom sets larger than this are not enumerated.
pub const ENUMERATION_LIMIT: usize = 1 << 16;

/// `L₀F(M)` read back as a module over the base ring of `M`.
pub fn into_d(f: &Reflector, m: &FpModule) -> CliResult<FpModule> {
    Ok(descend_to_integers(&l0(f, m)?))
}

/// Objects of `𝒟` among the abelian groups of order at most `max_order`.
pub fn d_objects_up_to(f: &Reflector, max_order: u64) -> CliResult<Vec<FpModule>> {
    let mut out = Vec::new();
    for m in finite_modules_up_to(max_order, &Ring::Integers) {
        if is_l0_complete(f, &m)? {
            out.push(m);
        }
    }
    Ok(out)
}

/// Every morphism between every ordered pair of `objects`.
pub fn all_morphisms(objects: &[FpModule]) -> CliResult<Vec<FpMorphism>> {
    let pairs: Vec<(&FpModule, &FpModule)> = objects.iter().flat_map(|a| objects.iter().map(move |b| (a, b))).collect();
    let sets: Vec<Vec<FpMorphism>> =
        pairs.par_iter().map(|(a, b)| hom_enumerate(a, b, ENUMERATION_LIMIT)).collect::<lcomplete::Result<_>>()?;
    Ok(sets.into_iter().flatten().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportSummary {
    pub native_ring: Ring,
    pub kernels_compared: usize,
    pub cokernels_compared: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<TransportMismatch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportMismatch {
    pub morphism: FpMorphism,
    pub which: String,
    pub in_d: NormalForm,
    pub native: NormalForm,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionSummary {
    pub functor: Reflector,
    pub exhaustive_order: u64,
    pub objects: usize,
    pub exhaustive_morphisms: usize,
    pub random_morphisms: usize,
    pub non_monic: usize,
    pub first_non_monic: Option<CriterionVerdict>,
    pub transport: Option<TransportSummary>,
}

impl CriterionSummary {
    pub fn holds(&self) -> bool {
        self.non_monic == 0 && self.transport.as_ref().is_none_or(|t| t.mismatches == 0)
    }
}

/// Per-morphism outcome, reduced afterwards.
struct CriterionCase {
    verdict: CriterionVerdict,
    mismatch: Option<TransportMismatch>,
}

fn criterion_case(f: &Reflector, native: Option<&Ring>, g: &FpMorphism) -> CliResult<CriterionCase> {
    let verdict = criterion_check(f, g)?;
    let mut mismatch = None;
    if let Some(ring) = native {
        let lifted = FpMorphism::new(
            g.source().with_ring(ring.clone()),
            g.target().with_ring(ring.clone()),
            g.matrix().clone(),
        )?;
        let k_d = kernel_in_d(f, g)?.0.normal_form();
        let k_n = kernel(&lifted).0.normal_form();
        let c_d = cokernel_in_d(f, g)?.0.normal_form();
        let c_n = cokernel(&lifted).0.normal_form();
        if k_d != k_n {
            mismatch = Some(TransportMismatch { morphism: g.clone(), which: "kernel".into(), in_d: k_d, native: k_n });
        } else if c_d != c_n {
            mismatch = Some(TransportMismatch { morphism: g.clone(), which: "cokernel".into(), in_d: c_d, native: c_n });
        }
    }
    Ok(CriterionCase { verdict, mismatch })
}

/// Random morphisms between random objects of `𝒟`, each reflected from a
/// module with up to four generators.
pub fn random_d_morphisms(f: &Reflector, count: usize, seed: u64) -> CliResult<Vec<FpMorphism>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = into_d(f, &random_module(&mut r, &Ring::Integers, 4, 4, 16))?;
        let b = into_d(f, &random_module(&mut r, &Ring::Integers, 4, 4, 16))?;
        if *a.ring() != Ring::Integers || *b.ring() != Ring::Integers {
            return Err(lcomplete::Error::Unsupported(format!("{f} does not keep the base ring")).into());
        }
        out.push(random_morphism(&mut r, &a, &b, 8)?);
    }
    Ok(out)
}

/// Monicity of `coker g → L₀F(coker g)` for every morphism between
/// `𝒟`-objects of order at most `max_order`, plus `samples` random ones.
/// For `ModReduction(p, N)` the transported kernels and cokernels are also
/// compared with those of the native `ℤ/pᴺ`-module category.
pub fn criterion_suite(f: &Reflector, max_order: u64, samples: usize, seed: u64) -> CliResult<CriterionSummary> {
    let objects = d_objects_up_to(f, max_order)?;
    let exhaustive = all_morphisms(&objects)?;
    let random = random_d_morphisms(f, samples, seed)?;
    let native = match *f {
        Reflector::ModReduction { p, n } => Some(Ring::mod_prime_power(p, n)?),
        _ => None,
    };
    let cases: Vec<CriterionCase> = exhaustive
        .par_iter()
        .chain(random.par_iter())
        .map(|g| criterion_case(f, native.as_ref(), g))
        .collect::<CliResult<_>>()?;
    let non_monic: Vec<&CriterionCase> = cases.iter().filter(|c| !c.verdict.is_monic).collect();
    let mismatches: Vec<&TransportMismatch> = cases.iter().filter_map(|c| c.mismatch.as_ref()).collect();
    let total = cases.len();
    Ok(CriterionSummary {
        functor: *f,
        exhaustive_order: max_order,
        objects: objects.len(),
        exhaustive_morphisms: exhaustive.len(),
        random_morphisms: random.len(),
        non_monic: non_monic.len(),
        first_non_monic: non_monic.first().map(|c| c.verdict.clone()),
        transport: native.map(|ring| TransportSummary {
            native_ring: ring,
            kernels_compared: total,
            cokernels_compared: total,
            mismatches: mismatches.len(),
            first_mismatch: mismatches.first().map(|&m| m.clone()),
        }),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceTally {
    pub kind: CoherenceKind,
    pub exhaustive: usize,
    pub random: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonoidalSummary {
    pub functor: Reflector,
    pub small_objects: Vec<NormalForm>,
    pub coherence: Vec<CoherenceTally>,
    pub first_counterexample: Option<CoherenceOutcome>,
    pub native_pairs: usize,
    pub native_mismatches: usize,
    pub internal_homs: usize,
    pub internal_homs_not_complete: usize,
    pub closedness_triples: usize,
    pub closedness_failures: usize,
}

impl MonoidalSummary {
    pub fn holds(&self) -> bool {
        self.coherence.iter().all(|t| t.failures == 0)
            && self.native_mismatches == 0
            && self.internal_homs_not_complete == 0
            && self.closedness_failures == 0
    }
}

fn tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

/// Cyclic `p`-groups of order at most `p³`, reflected into `𝒟` and
/// deduplicated up to isomorphism.
pub fn small_cyclic_objects(f: &Reflector) -> CliResult<Vec<FpModule>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in cyclic_p_groups(f.prime(), 3, &Ring::Integers) {
        let d = into_d(f, &m)?;
        if seen.insert(format!("{:?}", d.normal_form())) {
            out.push(d);
        }
    }
    Ok(out)
}

/// Coherence diagrams exhaustively on small cyclic tuples and on `samples`
/// random tuples; `tensor_D` against the native `ℤ/pᴺ` tensor product; and
/// `L₀F`-completeness of internal homs, on `samples` random pairs each.
pub fn monoidal_suite(f: &Reflector, samples: usize, seed: u64) -> CliResult<MonoidalSummary> {
    let ctx = MonoidalContext::new(*f, Ring::Integers)?;
    let small = small_cyclic_objects(f)?;
    let mut r = rng(seed);
    let mut random_tuples: Vec<(CoherenceKind, Vec<FpModule>)> = Vec::with_capacity(samples);
    for i in 0..samples {
        let kind = CoherenceKind::ALL[i % CoherenceKind::ALL.len()];
        let objs = (0..kind.arity())
            .map(|_| into_d(f, &random_finite_module(&mut r, &Ring::Integers, 2, 16)))
            .collect::<CliResult<Vec<_>>>()?;
        random_tuples.push((kind, objs));
    }
    let mut jobs: Vec<(CoherenceKind, bool, Vec<FpModule>)> = Vec::new();
    for kind in CoherenceKind::ALL {
        for t in tuples(small.len(), kind.arity()) {
            jobs.push((kind, true, t.iter().map(|&i| small[i].clone()).collect()));
        }
    }
    jobs.extend(random_tuples.into_iter().map(|(k, o)| (k, false, o)));
    let outcomes: Vec<CoherenceOutcome> =
        jobs.par_iter().map(|(k, _, objs)| ctx.coherence_check(*k, objs)).collect::<lcomplete::Result<_>>()?;
    let mut coherence: Vec<CoherenceTally> = CoherenceKind::ALL
        .iter()
        .map(|&kind| CoherenceTally { kind, exhaustive: 0, random: 0, failures: 0 })
        .collect();
    for ((kind, exhaustive, _), out) in jobs.iter().zip(&outcomes) {
        let t = coherence.iter_mut().find(|t| t.kind == *kind).expect("all kinds tallied");
        if *exhaustive {
            t.exhaustive += 1;
        } else {
            t.random += 1;
        }
        t.failures += usize::from(!out.holds);
    }
    let first_counterexample = outcomes.iter().find(|o| !o.holds).cloned();

    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = into_d(f, &random_module(&mut r, &Ring::Integers, 3, 3, 16))?;
        let y = into_d(f, &random_module(&mut r, &Ring::Integers, 3, 3, 16))?;
        pairs.push((x, y));
    }
    let native = matches!(f, Reflector::ModReduction { .. });
    let native_mismatches = if native {
        let diffs: Vec<bool> = pairs
            .par_iter()
            .map(|(x, y)| ctx.compare_with_native(x, y).map(|(a, b)| a != b))
            .collect::<lcomplete::Result<_>>()?;
        diffs.into_iter().filter(|&d| d).count()
    } else {
        0
    };
    let incomplete: Vec<bool> = pairs
        .par_iter()
        .map(|(x, y)| {
            let h = ctx.internal_hom_d(x, y)?;
            Ok(!is_l0_complete(f, &h.module)?)
        })
        .collect::<lcomplete::Result<_>>()?;

    let triples = tuples(small.len(), 3);
    let closed: Vec<bool> = triples
        .par_iter()
        .map(|t| ctx.closedness_check(&small[t[0]], &small[t[1]], &small[t[2]]).map(|c| c.bijective))
        .collect::<lcomplete::Result<_>>()?;

    Ok(MonoidalSummary {
        functor: *f,
        small_objects: small.iter().map(|m| m.normal_form()).collect(),
        coherence,
        first_counterexample,
        native_pairs: if native { pairs.len() } else { 0 },
        native_mismatches,
        internal_homs: pairs.len(),
        internal_homs_not_complete: incomplete.into_iter().filter(|&b| b).count(),
        closedness_triples: triples.len(),
        closedness_failures: closed.into_iter().filter(|&b| !b).count(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjunctionSummary {
    pub functor: Reflector,
    pub exhaustive_order: u64,
    /// `None` when the reflector changes the base ring, so that `L₀F X`
    /// and `Y` do not live in the same category.
    pub adjunction_pairs: Option<usize>,
    pub adjunction_failures: usize,
    pub unit_samples: usize,
    pub eta_factorization_failures: usize,
    pub derived_idempotence_failures: usize,
    pub projective_epis: Option<usize>,
    pub projective_failures: usize,
}

impl AdjunctionSummary {
    pub fn holds(&self) -> bool {
        self.adjunction_failures == 0
            && self.eta_factorization_failures == 0
            && self.derived_idempotence_failures == 0
            && self.projective_failures == 0
    }
}

/// Epimorphisms of `𝒟` between objects of order at most `max_order`,
/// obtained as transported cokernels of random maps between such objects.
pub fn sampled_epis(f: &Reflector, objects: &[FpModule], count: usize, seed: u64) -> CliResult<Vec<FpMorphism>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 20 * count.max(1) && !objects.is_empty() {
        attempts += 1;
        let a = &objects[r.gen_range(0..objects.len())];
        let c = &objects[r.gen_range(0..objects.len())];
        let g = random_morphism(&mut r, c, a, 8)?;
        let e = cokernel_in_d(f, &g)?.1;
        if is_epic(&e) {
            out.push(e);
        }
    }
    Ok(out)
}

/// The adjunction bijection on all pairs of groups of order at most
/// `max_order`, unit factorization and derived idempotence on `samples`
/// random modules, and the lifting property of reflected free modules
/// against sampled epimorphisms of `𝒟`.
pub fn adjunction_suite(f: &Reflector, max_order: u64, samples: usize, seed: u64) -> CliResult<AdjunctionSummary> {
    let keeps_ring = f.preserves_ring();
    let small = finite_modules_up_to(max_order, &Ring::Integers);
    let (adjunction_pairs, adjunction_failures) = if keeps_ring {
        let mut pairs = Vec::new();
        for x in &small {
            for y in &small {
                if is_l0_complete(f, y)? {
                    pairs.push((x, y));
                }
            }
        }
        let ok: Vec<bool> = pairs
            .par_iter()
            .map(|(x, y)| adjunction_roundtrip(f, x, y).map(|r| r.roundtrips && r.hom_c == r.hom_d))
            .collect::<lcomplete::Result<_>>()?;
        (Some(pairs.len()), ok.into_iter().filter(|&b| !b).count())
    } else {
        (None, 0)
    };

    let mut r = rng(seed);
    let modules: Vec<FpModule> = (0..samples).map(|_| random_module(&mut r, &Ring::Integers, 3, 3, 12)).collect();
    let unit_checks: Vec<(bool, bool)> = modules
        .par_iter()
        .map(|m| Ok((eta_factorization_check(f, m)?, derived_idempotence_check(f, m)?)))
        .collect::<lcomplete::Result<_>>()?;

    let (projective_epis, projective_failures) = if keeps_ring {
        let objects: Vec<FpModule> = small.iter().filter(|m| is_l0_complete(f, m).unwrap_or(false)).cloned().collect();
        let epis = sampled_epis(f, &objects, samples, seed.wrapping_add(1))?;
        let mut failures = 0;
        for rank in 1..=2 {
            if !projective_check(f, &FpModule::free(Ring::Integers, rank), &epis)? {
                failures += 1;
            }
        }
        (Some(epis.len()), failures)
    } else {
        (None, 0)
    };

    Ok(AdjunctionSummary {
        functor: *f,
        exhaustive_order: max_order,
        adjunction_pairs,
        adjunction_failures,
        unit_samples: modules.len(),
        eta_factorization_failures: unit_checks.iter().filter(|c| !c.0).count(),
        derived_idempotence_failures: unit_checks.iter().filter(|c| !c.1).count(),
        projective_epis,
        projective_failures,
    })
}
