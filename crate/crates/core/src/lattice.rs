// SPDX-License-Identifier: MIT OR Apache-2.0
//! Integer lattices: Smith normal form, saturated kernels and coset representatives.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::{common_denominator, Mat, Q, QVec};

pub type ZMat = Vec<Vec<BigInt>>;

fn identity(n: usize) -> ZMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// `U·B·V = D` with `U`, `V` unimodular and `D` diagonal, `d_i | d_{i+1}`, `d_i ≥ 0`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: ZMat,
    pub v: ZMat,
    pub diag: Vec<BigInt>,
    pub rank: usize,
}

pub fn smith(b: &ZMat, cols: usize) -> Smith {
    let m = b.len();
    let n = cols;
    let mut a = b.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // Pivot: smallest nonzero entry in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let f = a[i][t].div_floor(&a[t][t]);
                    row_axpy(&mut a, i, t, &f);
                    row_axpy(&mut u, i, t, &f);
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        u.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let f = a[t][j].div_floor(&a[t][t]);
                    col_axpy(&mut a, j, t, &f);
                    col_axpy(&mut v, j, t, &f);
                    if !a[t][j].is_zero() {
                        swap_cols(&mut a, t, j);
                        swap_cols(&mut v, t, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Divisibility: fold a non-divisible entry into row t.
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    let one = -BigInt::one();
                    row_axpy(&mut a, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        t += 1;
    }
    let rank = (0..m.min(n)).take_while(|&i| !a[i][i].is_zero()).count();
    let diag = (0..m.min(n)).map(|i| a[i][i].clone()).collect();
    Smith { u, v, diag, rank }
}

/// row_i -= f·row_k
fn row_axpy(a: &mut ZMat, i: usize, k: usize, f: &BigInt) {
    let src = a[k].clone();
    for (x, y) in a[i].iter_mut().zip(src.iter()) {
        *x -= f * y;
    }
}

/// col_j -= f·col_k
fn col_axpy(a: &mut ZMat, j: usize, k: usize, f: &BigInt) {
    for row in a.iter_mut() {
        let y = row[k].clone();
        row[j] -= f * y;
    }
}

fn swap_cols(a: &mut ZMat, i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

pub fn zmat_from_i64(rows: &[Vec<i64>]) -> ZMat {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn zmat_to_mat(a: &ZMat, cols: usize) -> Mat {
    let rows: Vec<QVec> = a.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect();
    if rows.is_empty() {
        Mat::zeros(0, cols)
    } else {
        Mat::from_rows(&rows)
    }
}

/// Scales each row of a rational matrix to an integer row.
fn clear_denominators(a: &Mat) -> ZMat {
    (0..a.rows)
        .map(|i| {
            let row = a.row(i);
            let den = common_denominator(&row);
            row.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect()
        })
        .collect()
}

/// Saturated integer basis of `{x ∈ ℤⁿ : a·x = 0}`.
pub fn integer_kernel(a: &Mat) -> Vec<QVec> {
    let n = a.cols;
    if a.rows == 0 {
        return (0..n).map(|i| crate::linalg::unit(n, i)).collect();
    }
    let s = smith(&clear_denominators(a), n);
    (s.rank..n)
        .map(|j| (0..n).map(|i| Q::from_integer(s.v[i][j].clone())).collect())
        .collect()
}

/// Representatives of `ℤⁿ / B·ℤⁿ` for square nondegenerate integer `B`.
pub fn coset_representatives(b: &ZMat) -> Result<Vec<Vec<BigInt>>, crate::Error> {
    let n = b.len();
    let s = smith(b, n);
    if s.rank < n {
        return Err(crate::Error::Singular("coset representatives need a nondegenerate matrix".into()));
    }
    // B·ℤⁿ = U⁻¹·D·ℤⁿ, so x ↦ U·x identifies the quotient with ∏ ℤ/d_i.
    let u_inv = zmat_to_mat(&s.u, n).inverse().expect("unimodular");
    let mut out = Vec::new();
    let mut r = vec![BigInt::zero(); n];
    loop {
        let rq: QVec = r.iter().map(|x| Q::from_integer(x.clone())).collect();
        out.push(u_inv.mul_vec(&rq).iter().map(|x| x.to_integer()).collect());
        let mut k = 0;
        loop {
            if k == n {
                return Ok(out);
            }
            r[k] += 1;
            if r[k] < s.diag[k] {
                break;
            }
            r[k] = BigInt::zero();
            k += 1;
        }
    }
}

/// Whether `x` lies in the ℤ-span of `basis` (columns need not be independent).
pub fn in_lattice(basis: &[QVec], x: &[Q]) -> bool {
    let n = x.len();
    if basis.is_empty() {
        return x.iter().all(Zero::is_zero);
    }
    // Clear a common denominator so the test becomes integral.
    let mut all: Vec<Q> = basis.iter().flatten().cloned().collect();
    all.extend_from_slice(x);
    let den = Q::from_integer(common_denominator(&all));
    let bm: ZMat = (0..n).map(|i| basis.iter().map(|c| (&c[i] * &den).to_integer()).collect()).collect();
    let xz: Vec<BigInt> = x.iter().map(|v| (v * &den).to_integer()).collect();
    let s = smith(&bm, basis.len());
    // U·B·V = D; B·y = x iff D·(V⁻¹y) = U·x.
    let ux: Vec<BigInt> =
        s.u.iter().map(|row| row.iter().zip(&xz).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)).collect();
    ux.iter().enumerate().all(|(i, val)| {
        if i < s.rank {
            (val % &s.diag[i]).is_zero()
        } else {
            val.is_zero()
        }
    })
}

/// Reduces each coordinate into `[0, 1)`.
pub fn frac_vec(v: &[Q]) -> QVec {
    v.iter().map(|x| x - x.floor()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_zero_vec, qvec};

    fn det_abs(b: &ZMat) -> BigInt {
        zmat_to_mat(b, b.len()).det().to_integer().abs()
    }

    #[test]
    fn smith_identity_holds() {
        let b = zmat_from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&b, 3);
        let prod = zmat_to_mat(&s.u, 3).mul(&zmat_to_mat(&b, 3)).mul(&zmat_to_mat(&s.v, 3));
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { Q::from_integer(s.diag[i].clone()) } else { Q::zero() };
                assert_eq!(prod[(i, j)], want);
            }
        }
        assert_eq!(s.diag.iter().map(|d| d.to_string()).collect::<Vec<_>>(), ["2", "6", "12"]);
    }

    #[test]
    fn cosets_of_three() {
        let reps = coset_representatives(&zmat_from_i64(&[vec![3]])).unwrap();
        let mut vals: Vec<i64> = reps.iter().map(|r| r[0].clone().try_into().unwrap()).collect();
        vals.sort();
        assert_eq!(vals, vec![0, 1, 2]);
    }

    #[test]
    fn cosets_of_2i() {
        let b = zmat_from_i64(&[vec![2, 0], vec![0, 2]]);
        assert_eq!(coset_representatives(&b).unwrap().len(), 4);
        assert_eq!(det_abs(&b), BigInt::from(4));
    }

    #[test]
    fn singular_cosets_error() {
        assert!(coset_representatives(&zmat_from_i64(&[vec![1, 2], vec![2, 4]])).is_err());
    }

    #[test]
    fn kernel_is_saturated() {
        let a = Mat::from_i64(&[vec![2, 4]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 1);
        assert!(is_zero_vec(&a.mul_vec(&k[0])));
        assert!(in_lattice(&k, &qvec(&[-2, 1])));
    }

    #[test]
    fn lattice_membership() {
        let basis = vec![qvec(&[2, 0]), qvec(&[0, 3])];
        assert!(in_lattice(&basis, &qvec(&[4, 3])));
        assert!(!in_lattice(&basis, &qvec(&[1, 3])));
    }
}
