use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Ring;
use crate::error::{Error, Result};
use crate::linalg::{self, deserialize_vectors, serialize_vectors, smith_normal_form, IntMatrix};

/// Isomorphism invariants: `M ≅ Rʳ ⊕ R/d₁ ⊕ … ⊕ R/dₖ` with `d₁ | d₂ | …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    pub free_rank: usize,
    #[serde(with = "linalg::int_vec")]
    pub invariant_factors: Vec<BigInt>,
}

impl NormalForm {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Cardinality, or `None` for modules with a free part.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("R/{d}")).collect();
        if self.free_rank > 0 {
            parts.insert(0, format!("R^{}", self.free_rank));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Coordinates adapted to the Smith form of the full relation lattice.
/// Coordinate `i` of `x` is `(U·x)ᵢ`, read modulo `moduli[i]`
/// (`1`: always zero, `0`: free).
#[derive(Debug)]
pub(crate) struct Basis {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub moduli: Vec<BigInt>,
    /// Indices with modulus other than one, in order.
    pub nontrivial: Vec<usize>,
}

/// A finitely presented module `R^g / ⟨relations⟩`.
#[derive(Clone)]
pub struct FpModule {
    ring: Ring,
    generators: usize,
    relations: IntMatrix,
    ext: IntMatrix,
    basis: Arc<Basis>,
}

impl FpModule {
    /// Relation columns must have `generators` entries.
    pub fn new(ring: Ring, generators: usize, relations: IntMatrix) -> Result<FpModule> {
        if relations.rows() != generators {
            return Err(Error::Malformed(format!(
                "relation matrix has {} rows but module has {} generators",
                relations.rows(),
                generators
            )));
        }
        let relations = if relations.cols() == 0 {
            IntMatrix::zeros(generators, 0)
        } else {
            relations
        };
        let ext = match ring {
            Ring::Integers => relations.clone(),
            Ring::ModPrimePower { p, n } => {
                let pn = num_traits::pow(BigInt::from(p), n as usize);
                relations.hcat(&IntMatrix::scalar(generators, pn))
            }
            Ring::PAdic { p } => {
                // A finite ℤ_p-module is killed by pᴷ; adjoining pᴷ·I makes the
                // integer span of the relations agree with the p-adic one.
                let s = smith_normal_form(&relations);
                let r = s.rank();
                if r == generators && generators > 0 {
                    let k = s.diagonal[..r]
                        .iter()
                        .map(|d| linalg::valuation(d, p).expect("nonzero pivot"))
                        .max()
                        .unwrap_or(0);
                    let pk = num_traits::pow(BigInt::from(p), k as usize);
                    relations.hcat(&IntMatrix::scalar(generators, pk))
                } else {
                    relations.clone()
                }
            }
        };
        let basis = Arc::new(Self::adapted_basis(&ring, generators, &ext));
        Ok(FpModule { ring, generators, relations, ext, basis })
    }

    fn adapted_basis(ring: &Ring, g: usize, ext: &IntMatrix) -> Basis {
        let s = smith_normal_form(ext);
        let r = s.rank();
        let moduli: Vec<BigInt> = (0..g)
            .map(|i| if i < r { ring.normalize_factor(&s.diagonal[i]) } else { BigInt::zero() })
            .collect();
        let nontrivial = (0..g).filter(|&i| !moduli[i].is_one()).collect();
        Basis { u: s.u, u_inv: s.u_inv, moduli, nontrivial }
    }

    pub fn free(ring: Ring, rank: usize) -> FpModule {
        FpModule::new(ring, rank, IntMatrix::zeros(rank, 0)).expect("valid shape")
    }

    pub fn zero(ring: Ring) -> FpModule {
        FpModule::free(ring, 0)
    }

    /// `R/d` on one generator; `d = 0` gives `R`.
    pub fn cyclic(ring: Ring, d: impl Into<BigInt>) -> FpModule {
        let d = d.into();
        if d.is_zero() {
            return FpModule::free(ring, 1);
        }
        FpModule::new(ring, 1, IntMatrix::from_rows(vec![vec![d]], 1).expect("1x1")).expect("valid shape")
    }

    /// `R^free_rank ⊕ R/d₁ ⊕ …`, generators ordered factors first.
    pub fn from_factors(ring: Ring, factors: &[BigInt], free_rank: usize) -> FpModule {
        let g = factors.len() + free_rank;
        let cols: Vec<Vec<BigInt>> = factors
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut c = vec![BigInt::zero(); g];
                c[i] = d.clone();
                c
            })
            .collect();
        FpModule::new(ring, g, IntMatrix::from_columns(g, &cols).expect("matching length")).expect("valid shape")
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Relations together with the ones implied by the ring.
    pub fn ext_relations(&self) -> &IntMatrix {
        &self.ext
    }

    pub(crate) fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Same presentation read over another ring.
    pub fn with_ring(&self, ring: Ring) -> FpModule {
        FpModule::new(ring, self.generators, self.relations.clone()).expect("shape unchanged")
    }

    pub fn normal_form(&self) -> NormalForm {
        let b = &self.basis;
        let mut factors = Vec::new();
        let mut free_rank = 0;
        for &i in &b.nontrivial {
            if b.moduli[i].is_zero() {
                free_rank += 1;
            } else {
                factors.push(b.moduli[i].clone());
            }
        }
        NormalForm { free_rank, invariant_factors: factors }
    }

    pub fn is_zero(&self) -> bool {
        self.basis.nontrivial.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.basis.nontrivial.iter().all(|&i| !self.basis.moduli[i].is_zero())
    }

    pub fn order(&self) -> Option<BigInt> {
        self.normal_form().order()
    }

    pub fn is_isomorphic(&self, other: &FpModule) -> bool {
        self.ring == other.ring && self.normal_form() == other.normal_form()
    }

    fn check_len(&self, x: &[BigInt]) -> Result<()> {
        if x.len() != self.generators {
            return Err(Error::Malformed(format!(
                "element has {} coordinates but module has {} generators",
                x.len(),
                self.generators
            )));
        }
        Ok(())
    }

    /// Canonical coordinates of the class of `x`: equal exactly when the
    /// classes are equal.
    pub fn reduce(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_len(x)?;
        let b = &self.basis;
        Ok(b.nontrivial
            .iter()
            .map(|&i| {
                let c: BigInt = (0..self.generators).map(|j| b.u.get(i, j) * &x[j]).sum();
                if b.moduli[i].is_zero() {
                    c
                } else {
                    c.mod_floor(&b.moduli[i])
                }
            })
            .collect())
    }

    /// Inverse of [`reduce`](Self::reduce): a representative of the class
    /// with the given canonical coordinates.
    pub fn lift_coordinates(&self, c: &[BigInt]) -> Result<Vec<BigInt>> {
        let b = &self.basis;
        if c.len() != b.nontrivial.len() {
            return Err(Error::Malformed("coordinate vector has the wrong length".into()));
        }
        let mut x = vec![BigInt::zero(); self.generators];
        for (k, &i) in b.nontrivial.iter().enumerate() {
            for (j, xj) in x.iter_mut().enumerate() {
                *xj += b.u_inv.get(j, i) * &c[k];
            }
        }
        Ok(x)
    }

    /// Orders of the canonical coordinates (`0` for free ones).
    pub fn coordinate_moduli(&self) -> Vec<BigInt> {
        self.basis.nontrivial.iter().map(|&i| self.basis.moduli[i].clone()).collect()
    }

    pub fn is_zero_element(&self, x: &[BigInt]) -> Result<bool> {
        Ok(self.reduce(x)?.iter().all(Zero::is_zero))
    }

    /// Every element, as canonical representatives. Finite modules only.
    pub fn elements(&self, limit: usize) -> Result<Vec<Vec<BigInt>>> {
        if !self.is_finite() {
            return Err(Error::Unsupported("cannot enumerate an infinite module".into()));
        }
        let moduli = self.coordinate_moduli();
        let order: BigInt = moduli.iter().product();
        if order > BigInt::from(limit) {
            return Err(Error::Unsupported(format!("module of order {order} exceeds enumeration limit {limit}")));
        }
        let mut out = Vec::new();
        let mut c = vec![BigInt::zero(); moduli.len()];
        loop {
            out.push(self.lift_coordinates(&c)?);
            let mut k = 0;
            loop {
                if k == c.len() {
                    return Ok(out);
                }
                c[k] += 1;
                if c[k] < moduli[k] {
                    break;
                }
                c[k] = BigInt::zero();
                k += 1;
            }
        }
    }
}

impl PartialEq for FpModule {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.generators == other.generators && self.relations == other.relations
    }
}

impl Eq for FpModule {}

impl Hash for FpModule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ring.hash(state);
        self.generators.hash(state);
        self.relations.hash(state);
    }
}

impl fmt::Debug for FpModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FpModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self
            .relations
            .columns()
            .map(|c| format!("[{}]", c.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "<{} | {}> over {}", self.generators, cols.join(" "), self.ring)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleRepr {
    ring: Ring,
    generators: usize,
    #[serde(serialize_with = "serialize_vectors", deserialize_with = "deserialize_vectors", default)]
    relations: Vec<Vec<BigInt>>,
}

impl Serialize for FpModule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModuleRepr {
            ring: self.ring.clone(),
            generators: self.generators,
            relations: self.relations.columns().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FpModule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ModuleRepr::deserialize(d)?;
        let rel = IntMatrix::from_columns(r.generators, &r.relations).map_err(D::Error::custom)?;
        FpModule::new(r.ring, r.generators, rel).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn normal_forms() {
        let m = FpModule::new(Ring::Integers, 2, IntMatrix::from_rows_i64(&[vec![2, 0], vec![0, 3]])).unwrap();
        assert_eq!(m.normal_form(), NormalForm { free_rank: 0, invariant_factors: big(&[6]) });
        assert_eq!(FpModule::free(Ring::Integers, 1).normal_form().free_rank, 1);
        assert!(FpModule::zero(Ring::Integers).normal_form().is_zero());
    }

    #[test]
    fn implicit_ring_relations() {
        let r = Ring::ModPrimePower { p: 2, n: 2 };
        let free = FpModule::free(r.clone(), 1);
        assert_eq!(free.normal_form(), NormalForm { free_rank: 0, invariant_factors: big(&[4]) });
        assert!(free.is_finite());
        assert!(free.is_zero_element(&big(&[8])).unwrap());
        assert!(!free.is_zero_element(&big(&[2])).unwrap());
    }

    #[test]
    fn p_adic_drops_prime_to_p_torsion() {
        let m = FpModule::cyclic(Ring::PAdic { p: 2 }, 12);
        assert_eq!(m.normal_form().invariant_factors, big(&[4]));
        assert!(m.is_zero_element(&big(&[4])).unwrap());
        let m = FpModule::cyclic(Ring::PAdic { p: 2 }, 3);
        assert!(m.is_zero());
    }

    #[test]
    fn coordinates_round_trip() {
        let m = FpModule::new(Ring::Integers, 2, IntMatrix::from_rows_i64(&[vec![2, 0], vec![0, 3]])).unwrap();
        let els = m.elements(100).unwrap();
        assert_eq!(els.len(), 6);
        let mut keys: Vec<_> = els.iter().map(|e| m.reduce(e).unwrap()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 6);
    }

    #[test]
    fn rejects_bad_shape() {
        assert!(FpModule::new(Ring::Integers, 2, IntMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"ring":{"base":"Z"},"generators":2,"relations":[[2,0],[0,3]]}"#;
        let m: FpModule = serde_json::from_str(s).unwrap();
        assert_eq!(m.relations(), &IntMatrix::from_rows_i64(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(serde_json::to_string(&m).unwrap(), s);
        assert!(serde_json::from_str::<FpModule>(r#"{"ring":{"base":"Z"},"generators":2,"relations":[[2]]}"#).is_err());
    }
}
