use num_bigint::BigInt;
use serde::Serialize;

use super::l0::{descend_to_integers, is_l0_complete, l0_unit};
use super::Reflector;
use crate::error::{Error, Result};
use crate::fpmod::{biproduct, cokernel, is_iso, kernel, lift_through_mono, FpModule, FpMorphism};

fn require_in_d(f: &Reflector, m: &FpModule, what: &str) -> Result<()> {
    if !is_l0_complete(f, m)? {
        return Err(Error::Precondition(format!("{what} {m} is not L0{f}-complete")));
    }
    Ok(())
}

fn require_endpoints(f: &Reflector, g: &FpMorphism) -> Result<()> {
    require_in_d(f, g.source(), "source")?;
    require_in_d(f, g.target(), "target")
}

/// Kernels in `𝒟` are kernels in `𝒞`.
pub fn kernel_in_d(f: &Reflector, g: &FpMorphism) -> Result<(FpModule, FpMorphism)> {
    require_endpoints(f, g)?;
    Ok(kernel(g))
}

/// `L₀F` of the `𝒞`-cokernel, with the composite projection.
pub fn cokernel_in_d(f: &Reflector, g: &FpMorphism) -> Result<(FpModule, FpMorphism)> {
    require_endpoints(f, g)?;
    let (c, pi) = cokernel(g);
    reflect_colimit(f, &c, &pi)
}

/// Applies `L₀F` to a `𝒞`-colimit `c` with leg `leg: X → c`, returning the
/// reflected object and the composite leg.
fn reflect_colimit(f: &Reflector, c: &FpModule, leg: &FpMorphism) -> Result<(FpModule, FpMorphism)> {
    let unit = l0_unit(f, c)?;
    let object = descend_to_integers(unit.target());
    let unit = FpMorphism::new(c.clone(), object.clone(), unit.matrix().clone())?;
    let composite = unit.compose(leg)?;
    Ok((object, composite))
}

/// Outcome of the monicity test for `coker f → L₀F(coker f)`.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionVerdict {
    pub morphism: FpMorphism,
    pub comparison_map: FpMorphism,
    pub is_monic: bool,
    /// A nonzero element of the kernel of the comparison map, as a vector
    /// on the generators of `coker f`.
    #[serde(with = "opt_vec")]
    pub witness: Option<Vec<BigInt>>,
}

mod opt_vec {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct W<'a>(#[serde(with = "crate::linalg::int_vec")] &'a [BigInt]);
        match v {
            Some(v) => s.serialize_some(&W(v)),
            None => s.serialize_none(),
        }
    }
}

/// Builds `coker f` in `𝒞` and tests whether its map to `L₀F(coker f)` is
/// monic.
pub fn criterion_check(f: &Reflector, g: &FpMorphism) -> Result<CriterionVerdict> {
    require_endpoints(f, g)?;
    let (c, _) = cokernel(g);
    let comparison_map = l0_unit(f, &c)?;
    let (k, iota) = kernel(&comparison_map);
    let is_monic = k.is_zero();
    let witness = if is_monic {
        None
    } else {
        iota.matrix().columns().find(|col| !c.is_zero_element(col).expect("length"))
    };
    Ok(CriterionVerdict { morphism: g.clone(), comparison_map, is_monic, witness })
}

/// Finite colimit shapes.
#[derive(Clone, Debug)]
pub enum ColimitDiagram {
    /// Parallel pair `f, g: A → B`.
    Coequalizer(FpMorphism, FpMorphism),
    /// Span `B ← A → C`.
    Pushout(FpMorphism, FpMorphism),
}

/// Finite limit shapes.
#[derive(Clone, Debug)]
pub enum LimitDiagram {
    /// Parallel pair `f, g: A → B`.
    Equalizer(FpMorphism, FpMorphism),
    /// Cospan `B → D ← C`.
    Pullback(FpMorphism, FpMorphism),
}

/// A colimit together with its legs (one per non-initial vertex).
#[derive(Clone, Debug)]
pub struct Cone {
    pub object: FpModule,
    pub legs: Vec<FpMorphism>,
}

/// Colimit in `𝒞` followed by `L₀F`.
pub fn colimit_in_d(f: &Reflector, diagram: &ColimitDiagram) -> Result<Cone> {
    match diagram {
        ColimitDiagram::Coequalizer(a, b) => {
            require_endpoints(f, a)?;
            require_endpoints(f, b)?;
            let (c, pi) = cokernel(&a.sub(b)?);
            let (object, leg) = reflect_colimit(f, &c, &pi)?;
            Ok(Cone { object, legs: vec![leg] })
        }
        ColimitDiagram::Pushout(a, b) => {
            require_endpoints(f, a)?;
            require_endpoints(f, b)?;
            if a.source() != b.source() {
                return Err(Error::Precondition("pushout legs must share a source".into()));
            }
            let sum = biproduct(a.target(), b.target())?;
            let diff = sum.inj1.compose(a)?.sub(&sum.inj2.compose(b)?)?;
            let (c, pi) = cokernel(&diff);
            let (object, leg) = reflect_colimit(f, &c, &pi)?;
            let legs = vec![leg.compose(&sum.inj1)?, leg.compose(&sum.inj2)?];
            Ok(Cone { object, legs })
        }
    }
}

/// Limits in `𝒟` are computed in `𝒞`.
pub fn limit_in_d(f: &Reflector, diagram: &LimitDiagram) -> Result<Cone> {
    match diagram {
        LimitDiagram::Equalizer(a, b) => {
            require_endpoints(f, a)?;
            require_endpoints(f, b)?;
            let (k, iota) = kernel(&a.sub(b)?);
            Ok(Cone { object: k, legs: vec![iota] })
        }
        LimitDiagram::Pullback(a, b) => {
            require_endpoints(f, a)?;
            require_endpoints(f, b)?;
            if a.target() != b.target() {
                return Err(Error::Precondition("pullback legs must share a target".into()));
            }
            let sum = biproduct(a.source(), b.source())?;
            let diff = a.compose(&sum.proj1)?.sub(&b.compose(&sum.proj2)?)?;
            let (k, iota) = kernel(&diff);
            let legs = vec![sum.proj1.compose(&iota)?, sum.proj2.compose(&iota)?];
            Ok(Cone { object: k, legs })
        }
    }
}

/// Whether `𝒟_F ⊆ ℰ` is known to hold for the pair, so that membership is a
/// meaningful test.
pub fn is_catalog_pair(f: &Reflector, e: &Reflector) -> bool {
    use Reflector::*;
    match (*f, *e) {
        _ if f == e => true,
        (ModReduction { p, n }, ModReduction { p: q, n: m }) => p == q && n <= m,
        (ModReduction { p, .. }, CompleteFg { p: q }) => p == q,
        (_, TorsionFreeQuotient { .. }) => f.preserves_ring(),
        _ => false,
    }
}

/// Checks that `L₀F(M)` is `L₀E`-complete.
pub fn best_approx_membership(f: &Reflector, e: &Reflector, m: &FpModule) -> Result<bool> {
    if !is_catalog_pair(f, e) {
        return Err(Error::Precondition(format!("({f}, {e}) is not a cataloged approximation pair")));
    }
    let x = descend_to_integers(&super::l0(f, m)?);
    is_l0_complete(e, &x)
}

/// Whether `f` is monic in `𝒟`, decided through `kernel_in_d`.
pub fn is_monic_in_d(f: &Reflector, g: &FpMorphism) -> Result<bool> {
    Ok(kernel_in_d(f, g)?.0.is_zero())
}

/// Whether `f` is epic in `𝒟`, decided through `cokernel_in_d`.
pub fn is_epic_in_d(f: &Reflector, g: &FpMorphism) -> Result<bool> {
    Ok(cokernel_in_d(f, g)?.0.is_zero())
}

/// Image and coimage computed with `𝒟`-kernels and `𝒟`-cokernels, and
/// whether the comparison between them is an isomorphism.
pub fn image_coimage_in_d(f: &Reflector, g: &FpMorphism) -> Result<bool> {
    let (_, pi) = cokernel_in_d(f, g)?;
    let (_, iota) = kernel_in_d(f, &pi)?;
    let (_, kappa) = kernel_in_d(f, g)?;
    let (coimage, proj) = cokernel_in_d(f, &kappa)?;
    if !proj.matrix().is_identity() {
        return Err(Error::Invariant("coimage projection does not preserve generators".into()));
    }
    let through = FpMorphism::new(coimage, g.target().clone(), g.matrix().clone())
        .map_err(|e| Error::Invariant(format!("map does not descend to its coimage: {e}")))?;
    let comparison = lift_through_mono(&through, &iota)?
        .ok_or_else(|| Error::Invariant("map does not factor through its image".into()))?;
    Ok(is_iso(&comparison))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMatrix;
    use crate::fpmod::Ring;

    const M22: Reflector = Reflector::ModReduction { p: 2, n: 2 };

    fn zmod(d: i64) -> FpModule {
        FpModule::cyclic(Ring::Integers, d)
    }

    fn times(m: &FpModule, c: i64) -> FpMorphism {
        FpMorphism::new(m.clone(), m.clone(), IntMatrix::scalar(m.generators(), BigInt::from(c))).unwrap()
    }

    #[test]
    fn kernels_and_cokernels() {
        let g = times(&zmod(4), 2);
        assert_eq!(kernel_in_d(&M22, &g).unwrap().0.order(), Some(BigInt::from(2)));
        assert_eq!(cokernel_in_d(&M22, &g).unwrap().0.order(), Some(BigInt::from(2)));
        let id = FpMorphism::identity(&zmod(4));
        assert!(kernel_in_d(&M22, &id).unwrap().0.is_zero());
        assert!(cokernel_in_d(&M22, &id).unwrap().0.is_zero());
        let zero = FpMorphism::zero(&zmod(2), &zmod(4));
        assert!(kernel_in_d(&M22, &zero).unwrap().0.is_isomorphic(&zmod(2)));
        assert!(cokernel_in_d(&M22, &zero).unwrap().0.is_isomorphic(&zmod(4)));
        let z = FpModule::free(Ring::Integers, 1);
        assert!(matches!(kernel_in_d(&M22, &times(&z, 2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn criterion_on_small_maps() {
        let v = criterion_check(&M22, &times(&zmod(4), 2)).unwrap();
        assert!(v.is_monic && v.witness.is_none());
        let v = criterion_check(&M22, &FpMorphism::identity(&zmod(4))).unwrap();
        assert!(v.is_monic);
        let t = Reflector::TorsionFreeQuotient { p: 2 };
        let z = FpModule::free(Ring::Integers, 1);
        assert!(criterion_check(&t, &times(&z, 2)).unwrap().is_monic);
    }

    #[test]
    fn colimits() {
        let g = times(&zmod(4), 2);
        let c = colimit_in_d(&M22, &ColimitDiagram::Coequalizer(g.clone(), g.clone())).unwrap();
        assert!(c.object.is_isomorphic(&zmod(4)));
        let id = FpMorphism::identity(&zmod(4));
        let zero = FpMorphism::zero(&zmod(4), &zmod(4));
        let c = colimit_in_d(&M22, &ColimitDiagram::Coequalizer(id, zero)).unwrap();
        assert!(c.object.is_zero());
        // pushout of Z/4 <- Z/4 -> Z/4 along 2, 2: (Z/4 + Z/4)/<(2,-2)> has order 8
        let c = colimit_in_d(&M22, &ColimitDiagram::Pushout(g.clone(), g.clone())).unwrap();
        assert_eq!(c.object.order(), Some(BigInt::from(8)));
        assert!(c.legs[0].compose(&g).unwrap().equals(&c.legs[1].compose(&g).unwrap()));
    }

    #[test]
    fn limits() {
        let g = times(&zmod(4), 2);
        let l = limit_in_d(&M22, &LimitDiagram::Pullback(g.clone(), g.clone())).unwrap();
        assert_eq!(l.object.order(), Some(BigInt::from(8)));
        let l = limit_in_d(&M22, &LimitDiagram::Equalizer(g.clone(), g)).unwrap();
        assert!(l.object.is_isomorphic(&zmod(4)));
    }

    #[test]
    fn approximations() {
        let m1 = Reflector::ModReduction { p: 2, n: 1 };
        let z = FpModule::free(Ring::Integers, 2);
        assert!(best_approx_membership(&m1, &M22, &z).unwrap());
        assert!(best_approx_membership(&M22, &M22, &z).unwrap());
        assert!(best_approx_membership(&M22, &Reflector::CompleteFg { p: 2 }, &z).unwrap());
        assert!(best_approx_membership(&M22, &m1, &z).is_err());
    }

    #[test]
    fn image_coimage_inside_d() {
        assert!(image_coimage_in_d(&M22, &times(&zmod(4), 2)).unwrap());
        assert!(image_coimage_in_d(&M22, &FpMorphism::zero(&zmod(4), &zmod(2))).unwrap());
    }
}
