//! Exact integer linear algebra: Smith and Hermite normal forms, integer
//! solving, null-space bases and lattice saturation.

mod hermite;
mod matrix;
mod smith;

pub use hermite::{column_span_basis, hermite_normal_form};
pub use matrix::{int_vec, IntMatrix};
pub(crate) use matrix::{deserialize_vectors, serialize_vectors};
pub use smith::{smith_normal_form, smith_normal_form_bigint, SmithForm};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Some `x` with `A·x = b` over the integers, or `None` when no integer
/// solution exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows() {
        return Err(Error::Malformed(format!(
            "right-hand side has length {} but matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let s = smith_normal_form(a);
    Ok(solve_with(&s, b))
}

/// Solves against a precomputed Smith form of `A`.
pub fn solve_with(s: &SmithForm, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let c = s.u.mul_vec(b);
    let r = s.rank();
    let mut y = vec![BigInt::zero(); s.v.rows()];
    for (i, ci) in c.iter().enumerate() {
        if i < r {
            let (q, rem) = ci.div_rem(&s.diagonal[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// `p`-adic valuation; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// `p`-part of a nonzero integer (`p^{v_p(x)}`), zero for zero.
pub fn p_part(x: &BigInt, p: u64) -> BigInt {
    match valuation(x, p) {
        None => BigInt::zero(),
        Some(v) => num_traits::pow(BigInt::from(p), v as usize),
    }
}

/// Whether `A·x = b` is solvable with `x` in the localization `ℤ_(p)`
/// (equivalently over `ℤ_p`).
pub fn solvable_locally(a: &IntMatrix, b: &[BigInt], p: u64) -> Result<bool> {
    if b.len() != a.rows() {
        return Err(Error::Malformed("right-hand side length mismatch".into()));
    }
    let s = smith_normal_form(a);
    let c = s.u.mul_vec(b);
    let r = s.rank();
    Ok(c.iter().enumerate().all(|(i, ci)| {
        if i < r {
            match valuation(ci, p) {
                None => true,
                Some(v) => v >= valuation(&s.diagonal[i], p).expect("nonzero pivot"),
            }
        } else {
            ci.is_zero()
        }
    }))
}

/// Columns form a basis of `{x : A·x = 0}`; there are `cols − rank` of them.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    let r = s.rank();
    let idx: Vec<usize> = (r..a.cols()).collect();
    s.v.select_cols(&idx)
}

pub fn rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// Which primes a lattice saturation divides out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Saturation {
    /// `{x : pᵏx ∈ L for some k}`.
    AtP,
    /// `{x : u·x ∈ L for some u prime to p}`.
    AwayFromP,
}

/// Generators of the saturation of the column lattice of `a`.
pub fn saturate(a: &IntMatrix, p: u64, mode: Saturation) -> IntMatrix {
    let s = smith_normal_form(a);
    let cols: Vec<Vec<BigInt>> = s.diagonal[..s.rank()]
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let pp = p_part(d, p);
            let scale = match mode {
                Saturation::AtP => d / &pp,
                Saturation::AwayFromP => pp,
            };
            s.u_inv.col(i).into_iter().map(|x| x * &scale).collect()
        })
        .collect();
    IntMatrix::from_columns(a.rows(), &cols).expect("columns have matching length")
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse(u: &IntMatrix) -> Result<IntMatrix> {
    if u.rows() != u.cols() || !u.determinant()?.abs().is_one() {
        return Err(Error::Precondition("matrix is not unimodular".into()));
    }
    // U_s·u·V_s = I, so u⁻¹ = V_s·U_s
    let s = smith_normal_form(u);
    s.v.checked_mul(&s.u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn scalar_solves() {
        let a = IntMatrix::from_rows_i64(&[vec![2]]);
        assert_eq!(solve_integer(&a, &v(&[4])).unwrap(), Some(v(&[2])));
        assert_eq!(solve_integer(&a, &v(&[3])).unwrap(), None);
    }

    #[test]
    fn two_by_two_solve() {
        let a = IntMatrix::from_rows_i64(&[vec![2, 4], vec![6, 8]]);
        let x = solve_integer(&a, &v(&[2, 6])).unwrap().unwrap();
        assert_eq!(a.mul_vec(&x), v(&[2, 6]));
        assert_eq!(x, v(&[1, 0]));
    }

    #[test]
    fn solve_rejects_bad_length() {
        let a = IntMatrix::from_rows_i64(&[vec![2]]);
        assert!(matches!(solve_integer(&a, &v(&[1, 2])), Err(Error::Malformed(_))));
    }

    #[test]
    fn kernels() {
        assert_eq!(kernel_basis(&IntMatrix::identity(2)).cols(), 0);
        let k = kernel_basis(&IntMatrix::from_rows_i64(&[vec![1, 1]]));
        assert_eq!(k.cols(), 1);
        let c = k.col(0);
        assert!(c == v(&[1, -1]) || c == v(&[-1, 1]));
        let k = kernel_basis(&IntMatrix::from_rows_i64(&[vec![2, 4], vec![6, 8]]));
        assert_eq!((k.rows(), k.cols()), (2, 0));
    }

    #[test]
    fn local_solvability() {
        let a = IntMatrix::from_rows_i64(&[vec![3]]);
        assert!(solvable_locally(&a, &v(&[1]), 2).unwrap());
        assert!(!solvable_locally(&a, &v(&[1]), 3).unwrap());
        let a = IntMatrix::from_rows_i64(&[vec![12]]);
        assert!(solvable_locally(&a, &v(&[4]), 2).unwrap());
        assert!(!solvable_locally(&a, &v(&[2]), 2).unwrap());
    }

    #[test]
    fn saturations() {
        // lattice 12ℤ: saturated at 2 gives 3ℤ, away from 2 gives 4ℤ
        let a = IntMatrix::from_rows_i64(&[vec![12]]);
        assert_eq!(saturate(&a, 2, Saturation::AtP).col(0)[0].abs(), BigInt::from(3));
        assert_eq!(saturate(&a, 2, Saturation::AwayFromP).col(0)[0].abs(), BigInt::from(4));
    }

    #[test]
    fn inverse_of_unimodular() {
        let u = IntMatrix::from_rows_i64(&[vec![2, 1], vec![1, 1]]);
        let w = unimodular_inverse(&u).unwrap();
        assert!((&u * &w).is_identity());
        assert!(unimodular_inverse(&IntMatrix::from_rows_i64(&[vec![2]])).is_err());
    }
}
