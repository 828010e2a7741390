use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fpmod::{is_iso, is_prime, FpModule, FpMorphism, Ring};
use crate::linalg::{saturate, IntMatrix, Saturation};

/// An idempotent additive endofunctor `F` with unit `η: id → F`.
///
/// `F` never changes generators: `F M` is a quotient presentation of `M`
/// (or `M` read over `ℤ_p`), so `η_M` and `F f` reuse the input matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reflector {
    /// `M ↦ M/pᴺM`.
    ModReduction { p: u64, n: u32 },
    /// `M ↦ M/(p-power torsion)`.
    TorsionFreeQuotient { p: u64 },
    /// `M ↦ M ⊗ ℤ_p` on finitely generated abelian groups.
    CompleteFg { p: u64 },
}

impl Reflector {
    pub fn prime(&self) -> u64 {
        match *self {
            Reflector::ModReduction { p, .. }
            | Reflector::TorsionFreeQuotient { p }
            | Reflector::CompleteFg { p } => p,
        }
    }

    /// Whether `F` keeps the base ring (so `η` is an endo-map of `𝒞`).
    pub fn preserves_ring(&self) -> bool {
        !matches!(self, Reflector::CompleteFg { .. })
    }

    /// Ring of `F M` for `M` over `ring`.
    pub fn output_ring(&self, ring: &Ring) -> Result<Ring> {
        match (*self, ring) {
            (Reflector::CompleteFg { p }, Ring::Integers) => Ring::p_adic(p),
            (Reflector::CompleteFg { p }, Ring::PAdic { p: q }) if p == *q => Ok(ring.clone()),
            (Reflector::CompleteFg { .. }, _) => Err(Error::Unsupported(format!(
                "completion is only defined here on modules over Z, not {ring}"
            ))),
            _ => Ok(ring.clone()),
        }
    }

    fn p_power(&self) -> BigInt {
        match *self {
            Reflector::ModReduction { p, n } => num_traits::pow(BigInt::from(p), n as usize),
            _ => BigInt::from(self.prime()),
        }
    }

    /// `F M`. Objects already fixed by `F` are returned unchanged.
    pub fn on_object(&self, m: &FpModule) -> Result<FpModule> {
        let ring = self.output_ring(m.ring())?;
        let g = m.generators();
        match *self {
            Reflector::ModReduction { .. } => {
                let q = self.p_power();
                let killed = (0..g).all(|i| {
                    let mut e = vec![BigInt::from(0); g];
                    e[i] = q.clone();
                    m.is_zero_element(&e).expect("length")
                });
                if killed {
                    return Ok(m.clone());
                }
                FpModule::new(ring, g, m.relations().hcat(&IntMatrix::scalar(g, q)))
            }
            Reflector::TorsionFreeQuotient { p } => {
                let nf = m.normal_form();
                if nf.invariant_factors.iter().all(|d| !d.is_multiple_of(&BigInt::from(p))) {
                    return Ok(m.clone());
                }
                FpModule::new(ring, g, saturate(m.ext_relations(), p, Saturation::AtP))
            }
            Reflector::CompleteFg { .. } => {
                if *m.ring() == ring {
                    Ok(m.clone())
                } else {
                    Ok(m.with_ring(ring))
                }
            }
        }
    }

    /// `F f`, on the same matrix.
    pub fn on_morphism(&self, f: &FpMorphism) -> Result<FpMorphism> {
        let s = self.on_object(f.source())?;
        let t = self.on_object(f.target())?;
        FpMorphism::new(s, t, f.matrix().clone())
            .map_err(|e| Error::Invariant(format!("functor image of a morphism is ill-defined: {e}")))
    }

    /// `η_M: M → F M`.
    pub fn eta(&self, m: &FpModule) -> Result<FpMorphism> {
        let fm = self.on_object(m)?;
        Ok(FpMorphism::new_unchecked(m.clone(), fm, IntMatrix::identity(m.generators())))
    }

    /// `F(f + g) = F f + F g`.
    pub fn check_additivity(&self, f: &FpMorphism, g: &FpMorphism) -> Result<bool> {
        let lhs = self.on_morphism(&f.add(g)?)?;
        let rhs = self.on_morphism(f)?.add(&self.on_morphism(g)?)?;
        Ok(lhs.equals(&rhs))
    }

    /// `F(g ∘ f) = F g ∘ F f`.
    pub fn check_functoriality(&self, g: &FpMorphism, f: &FpMorphism) -> Result<bool> {
        let lhs = self.on_morphism(&g.compose(f)?)?;
        let rhs = self.on_morphism(g)?.compose(&self.on_morphism(f)?)?;
        Ok(lhs.equals(&rhs))
    }

    /// `F f ∘ η_M = η_N ∘ f`.
    pub fn check_naturality(&self, f: &FpMorphism) -> Result<bool> {
        let lhs = self.on_morphism(f)?.compose(&self.eta(f.source())?)?;
        let rhs = self.eta(f.target())?.compose(f)?;
        Ok(lhs.equals(&rhs))
    }

    /// `F(η_M): F M → F F M` is an isomorphism.
    pub fn check_idempotent(&self, m: &FpModule) -> Result<bool> {
        Ok(is_iso(&self.on_morphism(&self.eta(m)?)?))
    }
}

impl fmt::Display for Reflector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Reflector::ModReduction { p, n } => write!(f, "mod:{p}:{n}"),
            Reflector::TorsionFreeQuotient { p } => write!(f, "tfq:{p}"),
            Reflector::CompleteFg { p } => write!(f, "complete:{p}"),
        }
    }
}

impl FromStr for Reflector {
    type Err = Error;

    /// `mod:p:N`, `tfq:p` or `complete:p`.
    fn from_str(s: &str) -> Result<Reflector> {
        let bad = || Error::Malformed(format!("unrecognized functor {s:?}; expected mod:p:N, tfq:p or complete:p"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<u64>().map_err(|_| bad());
        let r = match parts.as_slice() {
            ["mod", p, n] => Reflector::ModReduction {
                p: num(p)?,
                n: u32::try_from(num(n)?).map_err(|_| bad())?,
            },
            ["tfq", p] => Reflector::TorsionFreeQuotient { p: num(p)? },
            ["complete", p] => Reflector::CompleteFg { p: num(p)? },
            _ => return Err(bad()),
        };
        if !is_prime(r.prime()) {
            return Err(Error::Malformed(format!("{} is not prime", r.prime())));
        }
        if let Reflector::ModReduction { n: 0, .. } = r {
            return Err(Error::Malformed("exponent N must be at least 1".into()));
        }
        Ok(r)
    }
}

impl Serialize for Reflector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Reflector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
