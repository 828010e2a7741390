use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};

/// Base ring of a module category.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Integers,
    /// `ℤ/pᴺ`; the relations `pᴺ·eᵢ` are implicit in every module.
    ModPrimePower { p: u64, n: u32 },
    /// `ℤ_p`. Presentations are integer matrices read `p`-adically, so only
    /// `p`-adic valuations of pivots matter.
    PAdic { p: u64 },
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Ring {
    pub fn mod_prime_power(p: u64, n: u32) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::Malformed(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::Malformed("exponent N must be at least 1".into()));
        }
        Ok(Ring::ModPrimePower { p, n })
    }

    pub fn p_adic(p: u64) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::Malformed(format!("{p} is not prime")));
        }
        Ok(Ring::PAdic { p })
    }

    /// Residue characteristic, when there is one.
    pub fn prime(&self) -> Option<u64> {
        match *self {
            Ring::Integers => None,
            Ring::ModPrimePower { p, .. } | Ring::PAdic { p } => Some(p),
        }
    }

    /// Whether `b` lies in the span of the columns of `gens`, with scalars
    /// from this ring. `gens` must already contain any implicit relations.
    pub fn in_span(&self, gens: &IntMatrix, b: &[BigInt]) -> Result<bool> {
        match *self {
            Ring::Integers | Ring::ModPrimePower { .. } => {
                Ok(linalg::solve_integer(gens, b)?.is_some())
            }
            Ring::PAdic { p } => linalg::solvable_locally(gens, b, p),
        }
    }

    /// Integer coefficients `x` with `gens·x = b`. Over `ℤ_p` an integer
    /// solution need not exist even when a `p`-adic one does; that case is
    /// reported as unsupported rather than approximated.
    pub fn solve(&self, gens: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        let x = linalg::solve_integer(gens, b)?;
        if x.is_some() {
            return Ok(x);
        }
        if let Ring::PAdic { p } = *self {
            if linalg::solvable_locally(gens, b, p)? {
                return Err(Error::Unsupported(
                    "p-adic solution requires denominators prime to p".into(),
                ));
            }
        }
        Ok(None)
    }

    /// Canonical representative of a Smith diagonal entry up to units of the
    /// ring; `None` marks entries that kill nothing (units).
    pub(crate) fn normalize_factor(&self, d: &BigInt) -> BigInt {
        match *self {
            Ring::PAdic { p } => linalg::p_part(d, p),
            _ => d.clone(),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::ModPrimePower { p, n } => write!(f, "Z/{p}^{n}"),
            Ring::PAdic { p } => write!(f, "Z_{p}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RingRepr {
    base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
}

impl Serialize for Ring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = match *self {
            Ring::Integers => RingRepr { base: "Z".into(), p: None, n: None },
            Ring::ModPrimePower { p, n } => RingRepr { base: "Z/p^N".into(), p: Some(p), n: Some(n) },
            Ring::PAdic { p } => RingRepr { base: "Z_p".into(), p: Some(p), n: None },
        };
        r.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = RingRepr::deserialize(d)?;
        let need_p = || r.p.ok_or_else(|| D::Error::custom("ring needs field `p`"));
        match r.base.as_str() {
            "Z" => Ok(Ring::Integers),
            "Z/p^N" => {
                let n = r.n.ok_or_else(|| D::Error::custom("ring Z/p^N needs field `N`"))?;
                Ring::mod_prime_power(need_p()?, n).map_err(D::Error::custom)
            }
            "Z_p" => Ring::p_adic(need_p()?).map_err(D::Error::custom),
            other => Err(D::Error::custom(format!("unknown base ring {other:?}"))),
        }
    }
}
