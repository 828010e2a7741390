//! The closed symmetric monoidal structure that `𝒟` inherits from `𝒞`:
//! `X ⊗_𝒟 Y = L₀F(X ⊗ Y)`, unit `L₀F(R)`, and structure maps obtained by
//! applying `L₀F` to those of `𝒞` and cancelling the units `u: A → L₀F A`.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpmod::{self, hom_enumerate, hom_module, inverse, FpModule, FpMorphism, HomModule, NormalForm, Ring};
use crate::linalg::IntMatrix;
use crate::reflection::{is_l0_complete, l0, l0_on_morphism, l0_unit, Reflector, HOM_LIMIT};

/// A reflector together with the base ring it acts on, and a cache of
/// inverted structure isomorphisms.
pub struct MonoidalContext {
    reflector: Reflector,
    ring: Ring,
    unit: FpModule,
    inverses: RwLock<HashMap<FpMorphism, FpMorphism>>,
}

/// The coherence diagrams that are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoherenceKind {
    Pentagon,
    Triangle,
    Hexagon1,
    Hexagon2,
    Symmetry,
}

impl CoherenceKind {
    pub const ALL: [CoherenceKind; 5] = [
        CoherenceKind::Pentagon,
        CoherenceKind::Triangle,
        CoherenceKind::Hexagon1,
        CoherenceKind::Hexagon2,
        CoherenceKind::Symmetry,
    ];

    /// Number of objects the diagram takes.
    pub fn arity(&self) -> usize {
        match self {
            CoherenceKind::Pentagon => 4,
            CoherenceKind::Hexagon1 | CoherenceKind::Hexagon2 => 3,
            CoherenceKind::Triangle | CoherenceKind::Symmetry => 2,
        }
    }
}

impl fmt::Display for CoherenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CoherenceKind::Pentagon => "pentagon",
            CoherenceKind::Triangle => "triangle",
            CoherenceKind::Hexagon1 => "hexagon1",
            CoherenceKind::Hexagon2 => "hexagon2",
            CoherenceKind::Symmetry => "symmetry",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for CoherenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CoherenceKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown coherence diagram {s:?}")))
    }
}

/// Both paths of a diagram that failed to commute.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub kind: CoherenceKind,
    pub objects: Vec<FpModule>,
    pub path_a: IntMatrix,
    pub path_b: IntMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceOutcome {
    pub kind: CoherenceKind,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

/// Both sides of the currying bijection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosednessReport {
    pub hom_tensor: usize,
    pub hom_curried: usize,
    pub bijective: bool,
}

impl MonoidalContext {
    /// Only reflectors that keep the base ring give an endofunctor whose
    /// image is a subcategory of the same `𝒞`.
    pub fn new(reflector: Reflector, ring: Ring) -> Result<MonoidalContext> {
        if !reflector.preserves_ring() {
            return Err(Error::Unsupported(format!("{reflector} changes the base ring")));
        }
        if let Ring::PAdic { .. } = ring {
            return Err(Error::Unsupported("monoidal structure over Z_p presentations".into()));
        }
        let unit = l0(&reflector, &FpModule::free(ring.clone(), 1))?;
        if !is_l0_complete(&reflector, &unit)? {
            return Err(Error::Invariant("reflected unit is not complete".into()));
        }
        Ok(MonoidalContext { reflector, ring, unit, inverses: RwLock::new(HashMap::new()) })
    }

    pub fn reflector(&self) -> &Reflector {
        &self.reflector
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// `1_𝒟 = L₀F(R)`.
    pub fn unit(&self) -> &FpModule {
        &self.unit
    }

    fn require(&self, x: &FpModule) -> Result<()> {
        if x.ring() != &self.ring {
            return Err(Error::RingMismatch(x.ring().to_string(), self.ring.to_string()));
        }
        if !is_l0_complete(&self.reflector, x)? {
            return Err(Error::Precondition(format!("{x} is not in the subcategory")));
        }
        Ok(())
    }

    /// Inverse of a structure isomorphism, memoized.
    fn inv(&self, f: &FpMorphism) -> Result<FpMorphism> {
        if let Some(g) = self.inverses.read().expect("cache lock").get(f) {
            return Ok(g.clone());
        }
        let g = inverse(f).map_err(|e| Error::Invariant(format!("structure map is not invertible: {e}")))?;
        self.inverses.write().expect("cache lock").insert(f.clone(), g.clone());
        Ok(g)
    }

    fn u(&self, a: &FpModule) -> Result<FpMorphism> {
        l0_unit(&self.reflector, a)
    }

    fn lf(&self, f: &FpMorphism) -> Result<FpMorphism> {
        l0_on_morphism(&self.reflector, f)
    }

    /// `X ⊗_𝒟 Y`.
    pub fn tensor_d(&self, x: &FpModule, y: &FpModule) -> Result<FpModule> {
        self.require(x)?;
        self.require(y)?;
        l0(&self.reflector, &fpmod::tensor(x, y)?)
    }

    /// `f ⊗_𝒟 g = L₀F(f ⊗ g)`.
    pub fn tensor_morphisms_d(&self, f: &FpMorphism, g: &FpMorphism) -> Result<FpMorphism> {
        self.lf(&fpmod::tensor_morphisms(f, g)?)
    }

    fn id(&self, x: &FpModule) -> FpMorphism {
        FpMorphism::identity(x)
    }

    /// `(X ⊗_𝒟 Y) ⊗_𝒟 Z → X ⊗_𝒟 (Y ⊗_𝒟 Z)`, as
    /// `L₀F(id ⊗ u) ∘ L₀F(α) ∘ L₀F(u ⊗ id)⁻¹`.
    pub fn associator_d(&self, x: &FpModule, y: &FpModule, z: &FpModule) -> Result<FpMorphism> {
        for o in [x, y, z] {
            self.require(o)?;
        }
        let xy = fpmod::tensor(x, y)?;
        let yz = fpmod::tensor(y, z)?;
        let left = self.lf(&fpmod::tensor_morphisms(&self.u(&xy)?, &self.id(z))?)?;
        let assoc_c = associator_c(x, y, z)?;
        let right = self.lf(&fpmod::tensor_morphisms(&self.id(x), &self.u(&yz)?)?)?;
        right.compose(&self.lf(&assoc_c)?)?.compose(&self.inv(&left)?)
    }

    /// `ρ: X ⊗_𝒟 1_𝒟 → X`, as `u_X⁻¹ ∘ L₀F(ρ) ∘ L₀F(id ⊗ u_1)⁻¹`.
    pub fn right_unitor_d(&self, x: &FpModule) -> Result<FpMorphism> {
        self.require(x)?;
        let one = FpModule::free(self.ring.clone(), 1);
        let collapse = self.lf(&fpmod::tensor_morphisms(&self.id(x), &self.u(&one)?)?)?;
        let rho = self.lf(&right_unitor_c(x)?)?;
        self.inv(&self.u(x)?)?.compose(&rho)?.compose(&self.inv(&collapse)?)
    }

    /// `λ: 1_𝒟 ⊗_𝒟 X → X`, mirroring the right unitor.
    pub fn left_unitor_d(&self, x: &FpModule) -> Result<FpMorphism> {
        self.require(x)?;
        let one = FpModule::free(self.ring.clone(), 1);
        let collapse = self.lf(&fpmod::tensor_morphisms(&self.u(&one)?, &self.id(x))?)?;
        let lambda = self.lf(&left_unitor_c(x)?)?;
        self.inv(&self.u(x)?)?.compose(&lambda)?.compose(&self.inv(&collapse)?)
    }

    /// `L₀F(χ): X ⊗_𝒟 Y → Y ⊗_𝒟 X`.
    pub fn braiding_d(&self, x: &FpModule, y: &FpModule) -> Result<FpMorphism> {
        self.require(x)?;
        self.require(y)?;
        self.lf(&fpmod::braiding(x, y)?)
    }

    fn t(&self, a: &FpModule, b: &FpModule) -> Result<FpModule> {
        self.tensor_d(a, b)
    }

    fn a(&self, x: &FpModule, y: &FpModule, z: &FpModule) -> Result<FpMorphism> {
        self.associator_d(x, y, z)
    }

    fn a_inv(&self, x: &FpModule, y: &FpModule, z: &FpModule) -> Result<FpMorphism> {
        self.inv(&self.associator_d(x, y, z)?)
    }

    fn tm(&self, f: &FpMorphism, g: &FpMorphism) -> Result<FpMorphism> {
        self.tensor_morphisms_d(f, g)
    }

    /// Evaluates both paths of a diagram and compares them as maps.
    pub fn coherence_check(&self, kind: CoherenceKind, objects: &[FpModule]) -> Result<CoherenceOutcome> {
        if objects.len() != kind.arity() {
            return Err(Error::Precondition(format!(
                "{kind} takes {} objects, got {}",
                kind.arity(),
                objects.len()
            )));
        }
        for o in objects {
            self.require(o)?;
        }
        let o = objects;
        let (a, b) = match kind {
            CoherenceKind::Pentagon => {
                let (w, x, y, z) = (&o[0], &o[1], &o[2], &o[3]);
                let wx = self.t(w, x)?;
                let yz = self.t(y, z)?;
                let xy = self.t(x, y)?;
                let a = self.a(w, x, &yz)?.compose(&self.a(&wx, y, z)?)?;
                let b = self
                    .tm(&self.id(w), &self.a(x, y, z)?)?
                    .compose(&self.a(w, &xy, z)?)?
                    .compose(&self.tm(&self.a(w, x, y)?, &self.id(z))?)?;
                (a, b)
            }
            CoherenceKind::Triangle => {
                let (x, y) = (&o[0], &o[1]);
                let a = self.tm(&self.right_unitor_d(x)?, &self.id(y))?;
                let b = self
                    .tm(&self.id(x), &self.left_unitor_d(y)?)?
                    .compose(&self.a(x, &self.unit, y)?)?;
                (a, b)
            }
            CoherenceKind::Hexagon1 => {
                let (x, y, z) = (&o[0], &o[1], &o[2]);
                let yz = self.t(y, z)?;
                let a = self
                    .a(y, z, x)?
                    .compose(&self.braiding_d(x, &yz)?)?
                    .compose(&self.a(x, y, z)?)?;
                let b = self
                    .tm(&self.id(y), &self.braiding_d(x, z)?)?
                    .compose(&self.a(y, x, z)?)?
                    .compose(&self.tm(&self.braiding_d(x, y)?, &self.id(z))?)?;
                (a, b)
            }
            CoherenceKind::Hexagon2 => {
                let (x, y, z) = (&o[0], &o[1], &o[2]);
                let xy = self.t(x, y)?;
                let a = self
                    .a_inv(z, x, y)?
                    .compose(&self.braiding_d(&xy, z)?)?
                    .compose(&self.a_inv(x, y, z)?)?;
                let b = self
                    .tm(&self.braiding_d(x, z)?, &self.id(y))?
                    .compose(&self.a_inv(x, z, y)?)?
                    .compose(&self.tm(&self.id(x), &self.braiding_d(y, z)?)?)?;
                (a, b)
            }
            CoherenceKind::Symmetry => {
                let (x, y) = (&o[0], &o[1]);
                let a = self.braiding_d(y, x)?.compose(&self.braiding_d(x, y)?)?;
                let b = self.id(&self.t(x, y)?);
                (a, b)
            }
        };
        let holds = a.equals(&b);
        let counterexample = (!holds).then(|| Counterexample {
            kind,
            objects: objects.to_vec(),
            path_a: a.matrix().clone(),
            path_b: b.matrix().clone(),
        });
        Ok(CoherenceOutcome { kind, holds, counterexample })
    }

    /// `[X, Y]`, computed in `𝒞`; an error if it fails to lie in `𝒟`.
    pub fn internal_hom_d(&self, x: &FpModule, y: &FpModule) -> Result<HomModule> {
        self.require(x)?;
        self.require(y)?;
        let h = hom_module(x, y)?;
        if !is_l0_complete(&self.reflector, &h.module)? {
            return Err(Error::Invariant(format!("[{x}, {y}] is not in the subcategory")));
        }
        Ok(h)
    }

    /// Sends `g: Y ⊗_𝒟 X → Z` to `y ↦ (x ↦ g(y ⊗ x))`.
    pub fn curry(&self, g: &FpMorphism, x: &FpModule, y: &FpModule, h: &HomModule) -> Result<FpMorphism> {
        let yx = fpmod::tensor(y, x)?;
        let gu = g.compose(&self.u(&yx)?)?;
        let (gx, gz) = (x.generators(), h.target.generators());
        let mut cols = Vec::with_capacity(y.generators());
        for j in 0..y.generators() {
            let a = IntMatrix::from_fn(gz, gx, |r, i| gu.matrix().get(r, j * gx + i).clone());
            let f = FpMorphism::new(x.clone(), h.target.clone(), a)?;
            cols.push(h.from_morphism(&f)?);
        }
        FpMorphism::new(y.clone(), h.module.clone(), IntMatrix::from_columns(h.module.generators(), &cols)?)
    }

    /// Inverse of [`curry`](Self::curry).
    pub fn uncurry(&self, c: &FpMorphism, x: &FpModule, y: &FpModule, h: &HomModule) -> Result<FpMorphism> {
        let (gx, gz) = (x.generators(), h.target.generators());
        let maps: Vec<FpMorphism> = c.matrix().columns().map(|col| h.to_morphism(&col)).collect::<Result<_>>()?;
        let m = IntMatrix::from_fn(gz, y.generators() * gx, |r, k| maps[k / gx].matrix().get(r, k % gx).clone());
        FpMorphism::new(self.t(y, x)?, h.target.clone(), m)
    }

    /// Enumerates `Hom_𝒟(Y ⊗_𝒟 X, Z)` and `Hom(Y, [X, Z])` and checks that
    /// currying is a bijection between them.
    pub fn closedness_check(&self, x: &FpModule, y: &FpModule, z: &FpModule) -> Result<ClosednessReport> {
        for o in [x, y, z] {
            if !o.is_finite() {
                return Err(Error::Unsupported("closedness check needs finite modules".into()));
            }
        }
        let h = self.internal_hom_d(x, z)?;
        let yx = self.t(y, x)?;
        let left = hom_enumerate(&yx, z, HOM_LIMIT)?;
        let right = hom_enumerate(y, &h.module, HOM_LIMIT)?;
        let mut ok = left.len() == right.len();
        for g in &left {
            ok &= self.uncurry(&self.curry(g, x, y, &h)?, x, y, &h)?.equals(g);
        }
        for c in &right {
            ok &= self.curry(&self.uncurry(c, x, y, &h)?, x, y, &h)?.equals(c);
        }
        Ok(ClosednessReport { hom_tensor: left.len(), hom_curried: right.len(), bijective: ok })
    }

    /// For `F = ModReduction(p, N)` over `ℤ`: the normal forms of
    /// `X ⊗_𝒟 Y` and of the tensor product of `X`, `Y` read as
    /// `ℤ/pᴺ`-modules.
    pub fn compare_with_native(&self, x: &FpModule, y: &FpModule) -> Result<(NormalForm, NormalForm)> {
        let Reflector::ModReduction { p, n } = self.reflector else {
            return Err(Error::Unsupported("native comparison needs a mod p^N reduction".into()));
        };
        let ring = Ring::mod_prime_power(p, n)?;
        let ours = self.tensor_d(x, y)?.normal_form();
        let native = fpmod::tensor(&x.with_ring(ring.clone()), &y.with_ring(ring))?.normal_form();
        Ok((ours, native))
    }
}

/// `α: (X ⊗ Y) ⊗ Z → X ⊗ (Y ⊗ Z)`. Both sides index generators by
/// `(i, j, k)` in the same order, so the matrix is the identity.
pub fn associator_c(x: &FpModule, y: &FpModule, z: &FpModule) -> Result<FpMorphism> {
    let s = fpmod::tensor(&fpmod::tensor(x, y)?, z)?;
    let t = fpmod::tensor(x, &fpmod::tensor(y, z)?)?;
    FpMorphism::new(s.clone(), t, IntMatrix::identity(s.generators()))
}

/// `ρ: X ⊗ R → X`.
pub fn right_unitor_c(x: &FpModule) -> Result<FpMorphism> {
    let s = fpmod::tensor(x, &FpModule::free(x.ring().clone(), 1))?;
    FpMorphism::new(s, x.clone(), IntMatrix::identity(x.generators()))
}

/// `λ: R ⊗ X → X`.
pub fn left_unitor_c(x: &FpModule) -> Result<FpMorphism> {
    let s = fpmod::tensor(&FpModule::free(x.ring().clone(), 1), x)?;
    FpMorphism::new(s, x.clone(), IntMatrix::identity(x.generators()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn zmod(d: i64) -> FpModule {
        FpModule::cyclic(Ring::Integers, d)
    }

    fn ctx(n: u32) -> MonoidalContext {
        MonoidalContext::new(Reflector::ModReduction { p: 2, n }, Ring::Integers).unwrap()
    }

    #[test]
    fn tensor_examples() {
        let c = ctx(2);
        assert!(c.tensor_d(&zmod(4), &zmod(4)).unwrap().is_isomorphic(&zmod(4)));
        assert!(c.tensor_d(c.unit(), &zmod(2)).unwrap().is_isomorphic(&zmod(2)));
        assert!(c.tensor_d(&zmod(4), &FpModule::zero(Ring::Integers)).unwrap().is_zero());
        assert!(c.tensor_d(&FpModule::free(Ring::Integers, 1), &zmod(2)).is_err());
    }

    #[test]
    fn structure_maps() {
        let c = ctx(1);
        let b = c.braiding_d(&zmod(2), &zmod(2)).unwrap();
        assert!(b.matrix().is_identity());
        let c = ctx(2);
        let u = c.unit().clone();
        assert!(fpmod::is_iso(&c.right_unitor_d(&u).unwrap()));
        assert!(c.right_unitor_d(&u).unwrap().equals(&c.left_unitor_d(&u).unwrap()));
        assert!(fpmod::is_iso(&c.associator_d(&zmod(2), &zmod(4), &zmod(4)).unwrap()));
    }

    #[test]
    fn coherence_small() {
        let c = ctx(2);
        let objs = [zmod(4), zmod(2), c.unit().clone(), zmod(4)];
        for kind in CoherenceKind::ALL {
            let out = c.coherence_check(kind, &objs[..kind.arity()]).unwrap();
            assert!(out.holds, "{kind}");
        }
        assert!(c.coherence_check(CoherenceKind::Pentagon, &objs[..2]).is_err());
    }

    #[test]
    fn internal_hom_and_closedness() {
        let c = ctx(2);
        let h = c.internal_hom_d(&zmod(2), &zmod(4)).unwrap();
        assert_eq!(h.module.order(), Some(BigInt::from(2)));
        assert!(c.internal_hom_d(c.unit(), &zmod(2)).unwrap().module.is_isomorphic(&zmod(2)));
        let r = c.closedness_check(&zmod(2), &zmod(2), &zmod(4)).unwrap();
        assert_eq!(r, ClosednessReport { hom_tensor: 2, hom_curried: 2, bijective: true });
    }

    #[test]
    fn native_tensor_agrees() {
        let c = ctx(3);
        let (a, b) = c.compare_with_native(&zmod(4), &zmod(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn completion_has_no_monoidal_context() {
        assert!(MonoidalContext::new(Reflector::CompleteFg { p: 2 }, Ring::Integers).is_err());
    }
}
