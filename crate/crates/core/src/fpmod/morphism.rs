use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{FpModule, Ring};
use crate::error::{Error, Result};
use crate::linalg::{deserialize_vectors, serialize_vectors, IntMatrix};

/// A module map given by the images of the source generators (columns).
///
/// `PartialEq` and `Hash` compare presentations; use [`equals`](Self::equals)
/// for equality as maps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMorphism {
    source: FpModule,
    target: FpModule,
    matrix: IntMatrix,
}

/// Rings between which a matrix map makes sense: equal rings, or base
/// change from `ℤ` to `ℤ_p`.
pub(crate) fn compatible_rings(source: &Ring, target: &Ring) -> bool {
    source == target || matches!((source, target), (Ring::Integers, Ring::PAdic { .. }))
}

impl FpMorphism {
    /// Checks shape, rings and well-definedness.
    pub fn new(source: FpModule, target: FpModule, matrix: IntMatrix) -> Result<FpMorphism> {
        if matrix.rows() != target.generators() || matrix.cols() != source.generators() {
            return Err(Error::Malformed(format!(
                "matrix is {}x{} but map needs {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generators(),
                source.generators()
            )));
        }
        if !compatible_rings(source.ring(), target.ring()) {
            return Err(Error::RingMismatch(source.ring().to_string(), target.ring().to_string()));
        }
        for (j, r) in source.relations().columns().enumerate() {
            if !target.is_zero_element(&matrix.mul_vec(&r))? {
                return Err(Error::IllDefined(format!("relation {j} of the source is not sent to zero")));
            }
        }
        Ok(FpMorphism { source, target, matrix })
    }

    /// Caller guarantees the invariants of [`new`](Self::new).
    pub(crate) fn new_unchecked(source: FpModule, target: FpModule, matrix: IntMatrix) -> FpMorphism {
        debug_assert_eq!((matrix.rows(), matrix.cols()), (target.generators(), source.generators()));
        FpMorphism { source, target, matrix }
    }

    pub fn identity(m: &FpModule) -> FpMorphism {
        FpMorphism::new_unchecked(m.clone(), m.clone(), IntMatrix::identity(m.generators()))
    }

    pub fn zero(source: &FpModule, target: &FpModule) -> FpMorphism {
        FpMorphism::new_unchecked(
            source.clone(),
            target.clone(),
            IntMatrix::zeros(target.generators(), source.generators()),
        )
    }

    pub fn source(&self) -> &FpModule {
        &self.source
    }

    pub fn target(&self) -> &FpModule {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Image of an element of the source.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    /// Whether the map is zero, i.e. every column is a relation of the target.
    pub fn is_zero(&self) -> bool {
        self.matrix
            .columns()
            .all(|c| self.target.is_zero_element(&c).expect("column length matches target"))
    }

    /// Equality as maps between the same objects.
    pub fn equals(&self, other: &FpMorphism) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.matrix.columns().zip(other.matrix.columns()).all(|(a, b)| {
                self.target.reduce(&a).expect("length") == self.target.reduce(&b).expect("length")
            })
    }

    /// Canonical coordinates of each generator image; equal keys mean equal maps.
    pub fn key(&self) -> Vec<Vec<BigInt>> {
        self.matrix.columns().map(|c| self.target.reduce(&c).expect("length")).collect()
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &FpMorphism) -> Result<FpMorphism> {
        if f.target != self.source {
            return Err(Error::Precondition(format!(
                "cannot compose: {} is not {}",
                f.target, self.source
            )));
        }
        Ok(FpMorphism::new_unchecked(
            f.source.clone(),
            self.target.clone(),
            self.matrix.checked_mul(&f.matrix)?,
        ))
    }

    fn check_parallel(&self, other: &FpMorphism) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Precondition("maps are not parallel".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &FpMorphism) -> Result<FpMorphism> {
        self.check_parallel(other)?;
        Ok(FpMorphism::new_unchecked(self.source.clone(), self.target.clone(), &self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &FpMorphism) -> Result<FpMorphism> {
        self.check_parallel(other)?;
        Ok(FpMorphism::new_unchecked(self.source.clone(), self.target.clone(), &self.matrix - &other.matrix))
    }

    pub fn neg(&self) -> FpMorphism {
        FpMorphism::new_unchecked(self.source.clone(), self.target.clone(), -&self.matrix)
    }

    pub fn scale(&self, c: &BigInt) -> FpMorphism {
        FpMorphism::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.scale(c))
    }

    /// Same matrix between other presentations of the same generators.
    pub fn retarget(&self, source: FpModule, target: FpModule) -> Result<FpMorphism> {
        FpMorphism::new(source, target, self.matrix.clone())
    }
}

impl fmt::Debug for FpMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FpMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} by {:?}", self.source, self.target, self.matrix)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismRepr {
    source: FpModule,
    target: FpModule,
    /// Rows of the matrix.
    #[serde(serialize_with = "serialize_vectors", deserialize_with = "deserialize_vectors")]
    matrix: Vec<Vec<BigInt>>,
}

impl Serialize for FpMorphism {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MorphismRepr {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FpMorphism {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MorphismRepr::deserialize(d)?;
        let m = IntMatrix::from_rows(r.matrix, r.source.generators()).map_err(D::Error::custom)?;
        FpMorphism::new(r.source, r.target, m).map_err(D::Error::custom)
    }
}
