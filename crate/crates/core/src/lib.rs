//! Exact computations with finitely presented modules over `ℤ`, `ℤ/pᴺ` and
//! `ℤ_p`, reflective subcategories cut out by idempotent functors, the
//! zeroth left derived functor `L₀F`, the transported closed symmetric
//! monoidal structure, and rule-based towers certifying the failure of
//! naive `p`-adic completion to be exact.
//!
//! Everything is exact: matrices carry arbitrary precision integers and every
//! categorical claim reduces to a linear system over the integers.

pub mod error;
pub mod fpmod;
pub mod linalg;
pub mod monoidal;
pub mod reflection;
pub mod sample;
pub mod towers;

pub use error::{Error, Result};
pub use fpmod::{FpModule, FpMorphism, NormalForm, Ring};
pub use linalg::{IntMatrix, SmithForm};
pub use reflection::Reflector;
