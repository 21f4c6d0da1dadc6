// SPDX-License-Identifier: MIT OR Apache-2.0
//! Exact polyhedral primitives: strict feasibility, sign vectors of an arrangement,
//! and extreme rays of a closed cone. Sizes here are small, so everything is enumerative.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::linalg::{common_denominator, dot, is_zero_vec, Mat, Q, QVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(x: &Q) -> Sign {
        if x.is_positive() {
            Sign::Pos
        } else if x.is_negative() {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    pub const ALL: [Sign; 3] = [Sign::Neg, Sign::Zero, Sign::Pos];

    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Pos => Sign::Neg,
            Sign::Zero => Sign::Zero,
        }
    }
}

/// Scales a nonzero vector to a primitive integer vector with the same direction.
pub fn primitive(v: &[Q]) -> QVec {
    let den = Q::from_integer(common_denominator(v));
    let ints: Vec<_> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
    if g.is_zero() {
        return v.to_vec();
    }
    ints.iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// Whether some `y` satisfies `e·y = 0` for all `eqs` and `g·y > 0` for all `strict`.
pub fn strictly_feasible(eqs: &[QVec], strict: &[QVec], n: usize) -> bool {
    let basis = if eqs.is_empty() {
        (0..n).map(|i| crate::linalg::unit(n, i)).collect()
    } else {
        Mat::from_rows(eqs).nullspace()
    };
    let k = basis.len();
    // Constraints in the coordinates of the equality solution space.
    let mut cons: BTreeSet<QVec> = BTreeSet::new();
    for g in strict {
        let c: QVec = basis.iter().map(|b| dot(g, b)).collect();
        if is_zero_vec(&c) {
            return false;
        }
        cons.insert(primitive(&c));
    }
    for var in 0..k {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for c in cons {
            match Sign::of(&c[var]) {
                Sign::Pos => pos.push(c),
                Sign::Neg => neg.push(c),
                Sign::Zero => {
                    rest.insert(c);
                }
            }
        }
        if pos.is_empty() || neg.is_empty() {
            // This variable can be pushed far enough to satisfy the one-sided rows.
            cons = rest;
            continue;
        }
        for p in &pos {
            for m in &neg {
                let a = -&m[var];
                let b = p[var].clone();
                let c: QVec = p.iter().zip(m).map(|(x, y)| x * &a + y * &b).collect();
                if is_zero_vec(&c) {
                    return false;
                }
                rest.insert(primitive(&c));
            }
        }
        cons = rest;
    }
    cons.is_empty()
}

/// All realizable sign vectors of the functionals `hyps` on `ℚⁿ`, each position
/// restricted to `allowed(i)`, in lexicographic order.
pub fn sign_vectors(hyps: &[QVec], allowed: &dyn Fn(usize) -> Vec<Sign>, n: usize) -> Vec<Vec<Sign>> {
    let mut partial: Vec<Vec<Sign>> = vec![vec![]];
    for i in 0..hyps.len() {
        let mut next = Vec::new();
        for p in &partial {
            for s in allowed(i) {
                let mut cand = p.clone();
                cand.push(s);
                if feasible_signs(&hyps[..=i], &cand, n) {
                    next.push(cand);
                }
            }
        }
        partial = next;
    }
    partial.sort();
    partial
}

pub fn feasible_signs(hyps: &[QVec], signs: &[Sign], n: usize) -> bool {
    let mut eqs = Vec::new();
    let mut strict = Vec::new();
    for (h, s) in hyps.iter().zip(signs) {
        match s {
            Sign::Zero => eqs.push(h.clone()),
            Sign::Pos => strict.push(h.clone()),
            Sign::Neg => strict.push(crate::linalg::vneg(h)),
        }
    }
    strictly_feasible(&eqs, &strict, n)
}

/// Generators of the closed cone `{x : e·x = 0, h·x ≥ 0}`: extreme rays of its
/// pointed part plus a basis of the lineality space (returned separately).
pub fn cone_generators(eqs: &[QVec], ineqs: &[QVec], n: usize) -> (Vec<QVec>, Vec<QVec>) {
    let s = if eqs.is_empty() {
        (0..n).map(|i| crate::linalg::unit(n, i)).collect::<Vec<_>>()
    } else {
        Mat::from_rows(eqs).nullspace()
    };
    let k = s.len();
    if k == 0 {
        return (vec![], vec![]);
    }
    let to_x = |y: &QVec| -> QVec {
        let mut x = vec![Q::zero(); n];
        for (b, c) in s.iter().zip(y) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += bi * c;
            }
        }
        x
    };
    let h: Vec<QVec> = ineqs
        .iter()
        .map(|g| s.iter().map(|b| dot(g, b)).collect::<QVec>())
        .filter(|r: &QVec| !is_zero_vec(r))
        .collect();
    let lin = if h.is_empty() {
        (0..k).map(|i| crate::linalg::unit(k, i)).collect::<Vec<_>>()
    } else {
        Mat::from_rows(&h).nullspace()
    };
    let l = lin.len();
    let lineality: Vec<QVec> = lin.iter().map(|y| primitive(&to_x(y))).collect();
    let pointed_dim = k - l;
    if pointed_dim == 0 {
        return (vec![], lineality);
    }
    let mut rays: BTreeSet<QVec> = BTreeSet::new();
    let choose = pointed_dim - 1;
    for subset in subsets(h.len(), choose) {
        let mut rows: Vec<QVec> = subset.iter().map(|&i| h[i].clone()).collect();
        rows.extend(lin.iter().cloned());
        let ns = if rows.is_empty() {
            (0..k).map(|i| crate::linalg::unit(k, i)).collect()
        } else {
            Mat::from_rows(&rows).nullspace()
        };
        if ns.len() != 1 {
            continue;
        }
        for cand in [ns[0].clone(), crate::linalg::vneg(&ns[0])] {
            if h.iter().all(|r| !dot(r, &cand).is_negative()) {
                rays.insert(primitive(&to_x(&cand)));
            }
        }
    }
    (rays.into_iter().collect(), lineality)
}

/// All `k`-subsets of `0..m` in lexicographic order.
pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// A central hyperplane arrangement given by pairwise non-parallel primitive functionals.
#[derive(Clone, Debug, Default)]
pub struct Arrangement {
    pub hyps: Vec<QVec>,
}

impl Arrangement {
    /// Index of `w`'s line and whether `w` points against the stored orientation.
    pub fn locate(&self, w: &[Q]) -> Option<(usize, bool)> {
        if is_zero_vec(w) {
            return None;
        }
        let p = primitive(w);
        let m = crate::linalg::vneg(&p);
        self.hyps.iter().enumerate().find_map(|(i, h)| {
            if *h == p {
                Some((i, false))
            } else if *h == m {
                Some((i, true))
            } else {
                None
            }
        })
    }

    /// Adds the line of `w` if new; returns its index.
    pub fn insert(&mut self, w: &[Q]) -> Option<usize> {
        if is_zero_vec(w) {
            return None;
        }
        if let Some((i, _)) = self.locate(w) {
            return Some(i);
        }
        self.hyps.push(primitive(w));
        Some(self.hyps.len() - 1)
    }

    /// Sign of `w` on the face with sign vector `face`.
    pub fn sign_of(&self, face: &[Sign], w: &[Q]) -> Sign {
        match self.locate(w) {
            None => Sign::Zero,
            Some((i, flipped)) => {
                let s = face[i];
                if flipped {
                    s.flip()
                } else {
                    s
                }
            }
        }
    }

    pub fn signs_of_point(&self, v: &[Q]) -> Vec<Sign> {
        self.hyps.iter().map(|h| Sign::of(&dot(h, v))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;

    #[test]
    fn strict_feasibility() {
        assert!(strictly_feasible(&[], &[qvec(&[1, 0]), qvec(&[0, 1])], 2));
        assert!(!strictly_feasible(&[], &[qvec(&[1, 0]), qvec(&[-1, 0])], 2));
        assert!(!strictly_feasible(&[qvec(&[1, 0])], &[qvec(&[1, 0])], 2));
        assert!(!strictly_feasible(&[], &[qvec(&[1, 1]), qvec(&[-1, 0]), qvec(&[0, -1])], 2));
    }

    #[test]
    fn line_arrangement_has_three_faces() {
        let v = sign_vectors(&[qvec(&[1])], &|_| Sign::ALL.to_vec(), 1);
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn two_lines_in_plane() {
        let v = sign_vectors(&[qvec(&[1, 0]), qvec(&[0, 1])], &|_| Sign::ALL.to_vec(), 2);
        assert_eq!(v.len(), 9);
        let w = sign_vectors(&[qvec(&[1, 0]), qvec(&[1, 0])], &|_| Sign::ALL.to_vec(), 2);
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn quadrant_rays() {
        let (rays, lin) = cone_generators(&[], &[qvec(&[1, 0]), qvec(&[0, 1])], 2);
        assert_eq!(rays, vec![qvec(&[0, 1]), qvec(&[1, 0])]);
        assert!(lin.is_empty());
    }

    #[test]
    fn halfplane_has_lineality() {
        let (rays, lin) = cone_generators(&[], &[qvec(&[1, 0])], 2);
        assert_eq!(rays, vec![qvec(&[1, 0])]);
        assert_eq!(lin.len(), 1);
    }

    #[test]
    fn subset_counts() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
