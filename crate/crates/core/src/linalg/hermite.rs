use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Row-style Hermite normal form: returns `(H, U)` with `U·A = H`, `U`
/// unimodular, `H` in row echelon form with positive pivots and entries above
/// each pivot reduced into `[0, pivot)`. Zero rows trail.
pub fn hermite_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.to_rows();
    let mut u = IntMatrix::identity(m).to_rows();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        // gcd-combine every row below into row r
        for i in r + 1..m {
            if h[i][c].is_zero() {
                continue;
            }
            let (x, y) = (h[r][c].clone(), h[i][c].clone());
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (xg, yg) = (&x / &g, &y / &g);
            // [s t; -y/g x/g] has determinant 1
            combine(&mut h, r, i, &s, &t, &yg, &xg);
            combine(&mut u, r, i, &s, &t, &yg, &xg);
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate(&mut h[r]);
            negate(&mut u[r]);
        }
        let pivot = h[r][c].clone();
        for i in 0..r {
            let q = h[i][c].div_floor(&pivot);
            if !q.is_zero() {
                sub_row(&mut h, i, r, &q);
                sub_row(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    let h = IntMatrix::from_rows(h, n).expect("shape preserved");
    let u = IntMatrix::from_rows(u, m).expect("shape preserved");
    (h, u)
}

fn combine(rows: &mut [Vec<BigInt>], r: usize, i: usize, s: &BigInt, t: &BigInt, yg: &BigInt, xg: &BigInt) {
    let (top, bottom) = (rows[r].clone(), rows[i].clone());
    for j in 0..top.len() {
        rows[r][j] = s * &top[j] + t * &bottom[j];
        rows[i][j] = xg * &bottom[j] - yg * &top[j];
    }
}

fn negate(row: &mut [BigInt]) {
    for x in row {
        *x = -&*x;
    }
}

fn sub_row(rows: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    let s = rows[src].clone();
    for (x, y) in rows[dst].iter_mut().zip(&s) {
        *x -= q * y;
    }
}

/// A basis (as columns) of the lattice spanned by the columns of `a`, read off
/// the Hermite form of `aᵀ`. Deterministic, so presentations built from it are
/// reproducible.
pub fn column_span_basis(a: &IntMatrix) -> IntMatrix {
    let (h, _) = hermite_normal_form(&a.transpose());
    let keep: Vec<usize> = (0..h.rows())
        .filter(|&i| (0..h.cols()).any(|j| !h.get(i, j).is_zero()))
        .collect();
    h.select_rows(&keep).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_of_small_matrix() {
        let a = IntMatrix::from_rows_i64(&[vec![2, 4], vec![6, 8]]);
        let (h, u) = hermite_normal_form(&a);
        assert_eq!(&u * &a, h);
        assert_eq!(u.determinant().unwrap().abs(), BigInt::from(1));
        assert_eq!(h, IntMatrix::from_rows_i64(&[vec![2, 0], vec![0, 4]]));
    }

    #[test]
    fn span_basis_drops_dependent_columns() {
        let a = IntMatrix::from_rows_i64(&[vec![2, 4, 6], vec![0, 0, 0]]);
        let b = column_span_basis(&a);
        assert_eq!(b, IntMatrix::from_rows_i64(&[vec![2], vec![0]]));
        assert_eq!(column_span_basis(&IntMatrix::zeros(3, 0)).cols(), 0);
    }
}
