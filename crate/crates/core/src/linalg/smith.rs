//! Smith normal form with transformation matrices.
//!
//! Elimination runs on checked `i128` first and restarts over `BigInt` the
//! moment any intermediate overflows, so results are always exact.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    /// Inverse of `u`, tracked during elimination.
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// `min(rows, cols)` nonnegative diagonal entries, each dividing the next
    /// nonzero one; zeros trail.
    pub diagonal: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !Zero::is_zero(*d)).count()
    }
}

trait Scalar: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    /// Truncated quotient.
    fn quot(&self, d: &Self) -> Option<Self>;
    fn is_multiple_of(&self, d: &Self) -> bool;
    fn mul_sub(&self, q: &Self, b: &Self) -> Option<Self>; // self - q*b
    fn mul_add(&self, q: &Self, b: &Self) -> Option<Self>; // self + q*b
    fn negate(&self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        self.checked_div(*d)
    }
    fn is_multiple_of(&self, d: &Self) -> bool {
        self.checked_rem(*d) == Some(0)
    }
    fn mul_sub(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn mul_add(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_add(q.checked_mul(*b)?)
    }
    fn negate(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        Some(self / d)
    }
    fn is_multiple_of(&self, d: &Self) -> bool {
        Zero::is_zero(&(self % d))
    }
    fn mul_sub(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn mul_add(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self + q * b)
    }
    fn negate(&self) -> Option<Self> {
        Some(-self)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Dense<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Dense { rows: n, cols: n, data }
    }
    #[inline]
    fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
    /// row[dst] -= q * row[src]
    fn row_sub(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        for j in 0..self.cols {
            let s = self.at(src, j).clone();
            if s.is_zero() {
                continue;
            }
            let v = self.at(dst, j).mul_sub(q, &s)?;
            self.data[dst * self.cols + j] = v;
        }
        Some(())
    }
    /// col[dst] -= q * col[src]
    fn col_sub(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        for i in 0..self.rows {
            let s = self.at(i, src).clone();
            if s.is_zero() {
                continue;
            }
            let v = self.at(i, dst).mul_sub(q, &s)?;
            self.data[i * self.cols + dst] = v;
        }
        Some(())
    }
    /// col[dst] += q * col[src]
    fn col_add(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        for i in 0..self.rows {
            let s = self.at(i, src).clone();
            if s.is_zero() {
                continue;
            }
            let v = self.at(i, dst).mul_add(q, &s)?;
            self.data[i * self.cols + dst] = v;
        }
        Some(())
    }
    fn negate_row(&mut self, r: usize) -> Option<()> {
        for j in 0..self.cols {
            let v = self.at(r, j).negate()?;
            self.data[r * self.cols + j] = v;
        }
        Some(())
    }
    fn negate_col(&mut self, c: usize) -> Option<()> {
        for i in 0..self.rows {
            let v = self.at(i, c).negate()?;
            self.data[i * self.cols + c] = v;
        }
        Some(())
    }
    fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).to_big())
    }
}

/// Row operations are mirrored on `u` (left) and, inversely, on `u_inv`
/// (right); column operations on `v`.
struct Elimination<T> {
    a: Dense<T>,
    u: Dense<T>,
    u_inv: Dense<T>,
    v: Dense<T>,
}

impl<T: Scalar> Elimination<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }
    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }
    /// row[dst] -= q row[src]
    fn row_sub(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        self.a.row_sub(dst, src, q)?;
        self.u.row_sub(dst, src, q)?;
        // (I - q E_{dst,src})^{-1} = I + q E_{dst,src}: col[src] += q col[dst]
        self.u_inv.col_add(src, dst, q)
    }
    fn col_sub(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        self.a.col_sub(dst, src, q)?;
        self.v.col_sub(dst, src, q)
    }
    fn negate_row(&mut self, r: usize) -> Option<()> {
        self.a.negate_row(r)?;
        self.u.negate_row(r)?;
        self.u_inv.negate_col(r)
    }

    fn run(&mut self) -> Option<()> {
        let (m, n) = (self.a.rows, self.a.cols);
        for t in 0..m.min(n) {
            let Some((pi, pj)) = self.smallest_in_block(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let pivot = self.a.at(t, t).clone();
                for i in t + 1..m {
                    if !self.a.at(i, t).is_zero() {
                        let q = self.a.at(i, t).quot(&pivot)?;
                        self.row_sub(i, t, &q)?;
                    }
                }
                for j in t + 1..n {
                    if !self.a.at(t, j).is_zero() {
                        let q = self.a.at(t, j).quot(&pivot)?;
                        self.col_sub(j, t, &q)?;
                    }
                }
                // Remainders left in row/column t become the next pivot.
                let mut best: Option<(usize, usize)> = None;
                for i in t + 1..m {
                    let x = self.a.at(i, t);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs_lt(self.a.at(bi, bj))) {
                        best = Some((i, t));
                    }
                }
                for j in t + 1..n {
                    let x = self.a.at(t, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs_lt(self.a.at(bi, bj))) {
                        best = Some((t, j));
                    }
                }
                if let Some((bi, bj)) = best {
                    self.swap_rows(t, bi);
                    self.swap_cols(t, bj);
                    continue;
                }
                // Pivot must divide the whole trailing block.
                let offender = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !self.a.at(i, j).is_multiple_of(&pivot));
                match offender {
                    Some((i, _)) => {
                        // row[t] += row[i]
                        let minus_one = T::one().negate()?;
                        self.row_sub(t, i, &minus_one)?;
                    }
                    None => break,
                }
            }
            if self.a.at(t, t).is_negative() {
                self.negate_row(t)?;
            }
        }
        Some(())
    }

    fn smallest_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                let x = self.a.at(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs_lt(self.a.at(bi, bj))) {
                    best = Some((i, j));
                }
            }
        }
        best
    }
}

fn eliminate<T: Scalar>(a: Dense<T>) -> Option<SmithForm> {
    let (m, n) = (a.rows, a.cols);
    let mut e = Elimination {
        a,
        u: Dense::identity(m),
        u_inv: Dense::identity(m),
        v: Dense::identity(n),
    };
    e.run()?;
    let d = e.a.to_int_matrix();
    let diagonal = (0..m.min(n)).map(|i| d.get(i, i).clone()).collect();
    Some(SmithForm {
        u: e.u.to_int_matrix(),
        u_inv: e.u_inv.to_int_matrix(),
        d,
        v: e.v.to_int_matrix(),
        diagonal,
    })
}

/// Smith normal form of any integer matrix. Total: empty matrices give empty
/// diagonals and identity transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let small: Option<Vec<i128>> = (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .map(|(i, j)| i64::try_from(a.get(i, j)).ok().map(i128::from))
        .collect();
    if let Some(data) = small {
        let dense = Dense { rows: a.rows(), cols: a.cols(), data };
        if let Some(s) = eliminate(dense) {
            return s;
        }
    }
    let dense = Dense {
        rows: a.rows(),
        cols: a.cols(),
        data: (0..a.rows())
            .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).clone())
            .collect(),
    };
    eliminate(dense).expect("BigInt elimination cannot overflow")
}

/// Forces the `BigInt` path; used to cross-check the fast path.
#[doc(hidden)]
pub fn smith_normal_form_bigint(a: &IntMatrix) -> SmithForm {
    let dense = Dense {
        rows: a.rows(),
        cols: a.cols(),
        data: (0..a.rows())
            .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).clone())
            .collect(),
    };
    eliminate(dense).expect("BigInt elimination cannot overflow")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn check(a: &IntMatrix, s: &SmithForm) {
        assert_eq!(&(&s.u * a) * &s.v, s.d);
        assert!((&s.u * &s.u_inv).is_identity());
        assert_eq!(s.u.determinant().unwrap().abs(), <BigInt as One>::one());
        assert_eq!(s.v.determinant().unwrap().abs(), <BigInt as One>::one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(Zero::is_zero(s.d.get(i, j)));
                }
            }
        }
        let r = s.rank();
        assert!(s.diagonal[r..].iter().all(Zero::is_zero));
        for w in s.diagonal[..r].windows(2) {
            assert!(Zero::is_zero(&(&w[1] % &w[0])));
        }
    }

    #[test]
    fn two_by_two_example() {
        // determinant-divisor oracle: d1 = gcd(2,4,6,8) = 2, d1*d2 = |det| = 8
        let a = IntMatrix::from_rows_i64(&[vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&a);
        check(&a, &s);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn identity_and_zero() {
        let a = IntMatrix::identity(3);
        let s = smith_normal_form(&a);
        check(&a, &s);
        assert_eq!(s.diagonal, vec![<BigInt as One>::one(); 3]);
        let z = IntMatrix::zeros(1, 1);
        let s = smith_normal_form(&z);
        assert_eq!(s.diagonal, vec![<BigInt as Zero>::zero()]);
    }

    #[test]
    fn empty_shapes() {
        for (m, n) in [(0, 0), (0, 3), (2, 0)] {
            let a = IntMatrix::zeros(m, n);
            let s = smith_normal_form(&a);
            check(&a, &s);
            assert!(s.diagonal.is_empty());
        }
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = BigInt::from(i64::MAX);
        let a = IntMatrix::from_fn(3, 3, |i, j| &big - BigInt::from((i * 7 + j * 3) as i64));
        let s = smith_normal_form(&a);
        check(&a, &s);
        let t = smith_normal_form_bigint(&a);
        assert_eq!(s.diagonal, t.diagonal);
    }

    #[test]
    fn nondivisible_diagonal_gets_fixed() {
        let a = IntMatrix::from_rows_i64(&[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&a);
        check(&a, &s);
        assert_eq!(s.diagonal, vec![<BigInt as One>::one(), BigInt::from(6)]);
    }
}
