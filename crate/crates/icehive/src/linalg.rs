//! Exact dense linear algebra over the integers and the rationals.
//!
//! Matrices are plain `Vec<Vec<_>>` in row-major order. Integer rank and
//! determinant use fraction-free (Bareiss) elimination; integer systems are
//! solved through a column Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

fn width<T>(m: &[Vec<T>]) -> usize {
    m.first().map_or(0, |r| r.len())
}

/// Rank over Q by fraction-free elimination. Every intermediate entry is a
/// minor of the input, so all divisions are exact.
pub fn bareiss_rank(m: &[Vec<BigInt>]) -> usize {
    let mut a = m.to_vec();
    let (rows, cols) = (a.len(), width(m));
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division not exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    if negate {
        -prev
    } else {
        prev
    }
}

pub fn to_rat(m: &[Vec<BigInt>]) -> RatMatrix {
    m.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(a: &mut RatMatrix) -> Vec<usize> {
    let (rows, cols) = (a.len(), width(a));
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rat_rank(m: &[Vec<BigRational>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Determinant over Q by Gaussian elimination.
pub fn rat_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            a.swap(k, p);
            det = -det;
        }
        det *= &a[k][k];
        let inv = a[k][k].recip();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] * &inv;
            for j in k..n {
                let d = &f * &a[k][j];
                a[i][j] -= d;
            }
        }
    }
    det
}

pub fn rat_inverse(m: &[Vec<BigRational>]) -> Option<RatMatrix> {
    let n = m.len();
    let mut aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn rat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> RatMatrix {
    let (n, k, m) = (a.len(), b.len(), width(b));
    assert!(a.iter().all(|r| r.len() == k), "inner dimensions differ");
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for t in 0..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            s += &a[i][t] * &b[t][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn int_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let (n, k, m) = (a.len(), b.len(), width(b));
    assert!(a.iter().all(|r| r.len() == k), "inner dimensions differ");
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| &a[i][t] * &b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn rat_identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

/// Solve `A X = B` over Q. Free unknowns are set to zero. `None` when the
/// system is inconsistent.
pub fn rat_solve(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Option<RatMatrix> {
    let (rows, n) = (a.len(), width(a));
    let k = width(b);
    if rows == 0 {
        return Some(vec![vec![BigRational::zero(); k]; n]);
    }
    let mut aug: RatMatrix = a.iter().zip(b).map(|(ra, rb)| ra.iter().chain(rb).cloned().collect()).collect();
    let piv = rref(&mut aug);
    if piv.last().is_some_and(|&c| c >= n) {
        return None;
    }
    let mut x = vec![vec![BigRational::zero(); k]; n];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = aug[r][n..].to_vec();
    }
    Some(x)
}

/// Column Hermite-style echelon form: returns `(H, U)` with `A U = H`,
/// `U` unimodular, and `H` in column echelon form. The second component of
/// the result lists the pivot row of each nonzero column of `H`.
pub fn column_echelon(a: &[Vec<BigInt>]) -> (IntMatrix, IntMatrix, Vec<usize>) {
    let (rows, cols) = (a.len(), width(a));
    let mut h = a.to_vec();
    let mut u: IntMatrix = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivot_rows = Vec::new();
    let mut pc = 0;
    for r in 0..rows {
        if pc == cols {
            break;
        }
        for j in pc + 1..cols {
            if h[r][j].is_zero() {
                continue;
            }
            let (x, y) = (h[r][pc].clone(), h[r][j].clone());
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let (xg, yg) = (&x / &g, &y / &g);
            // [col_pc, col_j] <- [s col_pc + t col_j, -yg col_pc + xg col_j]
            for m in [&mut h, &mut u] {
                for row in m.iter_mut() {
                    let (cp, cj) = (row[pc].clone(), row[j].clone());
                    row[pc] = &s * &cp + &t * &cj;
                    row[j] = &xg * &cj - &yg * &cp;
                }
            }
        }
        if h[r][pc].is_zero() {
            continue;
        }
        if h[r][pc].is_negative() {
            for m in [&mut h, &mut u] {
                for row in m.iter_mut() {
                    row[pc] = -row[pc].clone();
                }
            }
        }
        pivot_rows.push(r);
        pc += 1;
    }
    (h, u, pivot_rows)
}

/// Solve `A X = B` over Z via the column echelon form of `A`. Coordinates of
/// the solution in the kernel directions of the echelon basis are zero.
pub fn int_solve(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Result<IntMatrix> {
    let (rows, n) = (a.len(), width(a));
    if b.len() != rows {
        return Err(Error::DimensionMismatch(format!("{} rows vs {} right-hand rows", rows, b.len())));
    }
    let k = width(b);
    let (h, u, pivot_rows) = column_echelon(a);
    let rank = pivot_rows.len();
    let mut y = vec![vec![BigRational::zero(); k]; n];
    for col in 0..k {
        for (p, &r) in pivot_rows.iter().enumerate() {
            let mut s = BigRational::from_integer(b[r][col].clone());
            for (q, yq) in y.iter().enumerate().take(p) {
                s -= BigRational::from_integer(h[r][q].clone()) * &yq[col];
            }
            y[p][col] = s / BigRational::from_integer(h[r][p].clone());
        }
        for r in 0..rows {
            let mut s = BigRational::zero();
            for (q, yq) in y.iter().enumerate().take(rank) {
                s += BigRational::from_integer(h[r][q].clone()) * &yq[col];
            }
            if s != BigRational::from_integer(b[r][col].clone()) {
                return Err(Error::NoRationalSolution);
            }
        }
    }
    if y.iter().flatten().any(|v| !v.is_integer()) {
        return Err(Error::NoIntegerSolution);
    }
    let yi: IntMatrix = y.iter().map(|r| r.iter().map(|v| v.to_integer()).collect()).collect();
    Ok(int_mul(&u, &yi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(bareiss_rank(&im(&[])), 0);
        assert_eq!(bareiss_rank(&im(&[&[0, 1]])), 1);
        assert_eq!(bareiss_rank(&im(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]])), 2);
        assert_eq!(bareiss_rank(&im(&[&[0, 0, 1], &[0, 0, 2]])), 1);
        assert_eq!(bareiss_rank(&im(&[&[0, 2, 1], &[0, 4, 3], &[5, 0, 0]])), 3);
    }

    #[test]
    fn determinants_agree() {
        let m = im(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        assert_eq!(bareiss_det(&m), BigInt::from(-54));
        assert_eq!(rat_det(&to_rat(&m)), BigRational::from_integer(BigInt::from(-54)));
        assert_eq!(bareiss_det(&im(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
    }

    #[test]
    fn integer_solve_distinguishes_failures() {
        let a = im(&[&[2, 0], &[0, 1]]);
        assert_eq!(int_solve(&a, &im(&[&[4], &[3]])).unwrap(), im(&[&[2], &[3]]));
        assert_eq!(int_solve(&a, &im(&[&[3], &[1]])), Err(Error::NoIntegerSolution));
        let a = im(&[&[1, 1], &[1, 1]]);
        assert_eq!(int_solve(&a, &im(&[&[1], &[2]])), Err(Error::NoRationalSolution));
    }

    #[test]
    fn echelon_is_unimodular() {
        let a = im(&[&[4, 6, 10], &[3, 5, 7]]);
        let (h, u, piv) = column_echelon(&a);
        assert_eq!(int_mul(&a, &u), h);
        assert_eq!(bareiss_det(&u).abs(), BigInt::one());
        assert_eq!(piv, vec![0, 1]);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = to_rat(&im(&[&[1, 2], &[3, 4]]));
        let inv = rat_inverse(&m).unwrap();
        assert_eq!(rat_mul(&m, &inv), rat_identity(2));
        assert!(rat_inverse(&to_rat(&im(&[&[1, 2], &[2, 4]]))).is_none());
    }
}
