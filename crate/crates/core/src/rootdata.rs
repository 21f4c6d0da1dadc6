// SPDX-License-Identifier: MIT OR Apache-2.0
//! Split root data, Weyl groups and parabolic index sets.
//!
//! Coordinates: `N = ℤⁿ` holds cocharacters, `M = ℤⁿ` characters, and the pairing
//! is the dot product. Simple coroots live in `N`, simple roots in `M`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::lattice::integer_kernel;
use crate::linalg::{dot, q, vsub, vscale, Mat, Q, QVec};
use crate::Error;

pub const DEFAULT_WEYL_CAP: usize = 100_000;

#[derive(Clone, Debug)]
pub struct RootDatum {
    pub name: String,
    pub rank: usize,
    pub simple_coroots: Vec<QVec>,
    pub simple_roots: Vec<QVec>,
    pub cartan: Mat,
    /// Rational basis of `N^W`.
    pub center_basis: Vec<QVec>,
    /// Integer basis of `N^W ∩ N`.
    pub center_lattice: Vec<QVec>,
    /// Integer basis of `M^W ∩ M`, the characters of `G`.
    pub character_lattice: Vec<QVec>,
    pub fundamental_coweights: Vec<QVec>,
    pub fundamental_weights: Vec<QVec>,
    /// Positive roots paired with their coroots.
    pub positive_roots: Vec<(QVec, QVec)>,
    /// Every element of `W` as a matrix on `N`.
    pub weyl: Vec<Mat>,
}

impl RootDatum {
    /// Builds a datum from simple coroots (in `N`) and simple roots (in `M`).
    pub fn from_simple(
        name: &str,
        rank: usize,
        coroots: Vec<QVec>,
        roots: Vec<QVec>,
        weyl_cap: usize,
    ) -> Result<Self, Error> {
        let l = coroots.len();
        if roots.len() != l {
            return Err(Error::InvalidDatum("coroot and root counts differ".into()));
        }
        if coroots.iter().chain(&roots).any(|v| v.len() != rank) {
            return Err(Error::InvalidDatum(format!("vectors must have length {rank}")));
        }
        if coroots.iter().chain(&roots).flatten().any(|x| !x.is_integer()) {
            return Err(Error::InvalidDatum("simple roots and coroots must be integral".into()));
        }
        let cartan = Mat::from_rows(
            &coroots.iter().map(|c| roots.iter().map(|r| dot(c, r)).collect()).collect::<Vec<_>>(),
        );
        validate_cartan(&cartan)?;
        if l > 0
            && (Mat::from_rows(&coroots).rank() < l || Mat::from_rows(&roots).rank() < l) {
                return Err(Error::InvalidDatum("simple (co)roots must be linearly independent".into()));
            }
        let cinv = if l > 0 {
            cartan.inverse().ok_or_else(|| Error::InvalidDatum("singular Cartan matrix".into()))?
        } else {
            Mat::zeros(0, 0)
        };
        let root_mat = if l > 0 { Mat::from_rows(&roots) } else { Mat::zeros(0, rank) };
        let center_basis = root_mat.nullspace();
        let center_lattice = integer_kernel(&root_mat);
        let coroot_mat = if l > 0 { Mat::from_rows(&coroots) } else { Mat::zeros(0, rank) };
        let character_lattice = integer_kernel(&coroot_mat);
        let fundamental_coweights = (0..l)
            .map(|i| lin_comb(&coroots, &cinv.row(i), rank))
            .collect();
        let fundamental_weights = (0..l)
            .map(|j| lin_comb(&roots, &cinv.col(j), rank))
            .collect();
        let gens: Vec<Mat> = (0..l).map(|i| reflection_on_n(&coroots[i], &roots[i])).collect();
        let weyl = close_group(&gens, rank, weyl_cap)?;
        let mut d = RootDatum {
            name: name.to_string(),
            rank,
            simple_coroots: coroots,
            simple_roots: roots,
            cartan,
            center_basis,
            center_lattice,
            character_lattice,
            fundamental_coweights,
            fundamental_weights,
            positive_roots: Vec::new(),
            weyl,
        };
        d.positive_roots = d.compute_positive_roots();
        Ok(d)
    }

    /// Parses a type tag: `A<n>`, `GL<n>`, `T<r>`/`torus(r)`, `GL1`, or products `X×Y` written `AxB`.
    pub fn preset(tag: &str) -> Result<Self, Error> {
        Self::preset_with_cap(tag, DEFAULT_WEYL_CAP)
    }

    pub fn preset_with_cap(tag: &str, cap: usize) -> Result<Self, Error> {
        let tag = tag.trim();
        let parts: Vec<&str> = tag.split(['x', '×']).map(str::trim).collect();
        if parts.len() > 1 {
            let factors = parts.iter().map(|p| Self::preset_with_cap(p, cap)).collect::<Result<Vec<_>, _>>()?;
            return Self::product(tag, &factors, cap);
        }
        let bad = || Error::InvalidDatum(format!("unknown type tag {tag:?}"));
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        if let Some(r) = tag.strip_prefix("torus(").and_then(|s| s.strip_suffix(')')) {
            return Ok(Self::torus(num(r)?));
        }
        if let Some(n) = tag.strip_prefix("GL") {
            return Self::gl(num(n)?, cap);
        }
        if let Some(n) = tag.strip_prefix('A') {
            return Self::type_a(num(n)?, cap);
        }
        if let Some(r) = tag.strip_prefix('T') {
            return Ok(Self::torus(num(r)?));
        }
        Err(bad())
    }

    pub fn torus(r: usize) -> Self {
        Self::from_simple(&format!("T{r}"), r, vec![], vec![], 1).expect("torus datum is valid")
    }

    /// Simply connected `A_n`: coroots are the standard basis of `N`.
    pub fn type_a(n: usize, cap: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidDatum("A0 is not a root system".into()));
        }
        let coroots = (0..n).map(|i| crate::linalg::unit(n, i)).collect();
        let roots = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        if i == j {
                            q(2)
                        } else if i.abs_diff(j) == 1 {
                            q(-1)
                        } else {
                            Q::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_simple(&format!("A{n}"), n, coroots, roots, cap)
    }

    pub fn gl(n: usize, cap: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidDatum("GL0 is empty".into()));
        }
        let simple: Vec<QVec> = (0..n - 1)
            .map(|i| {
                let mut v = vec![Q::zero(); n];
                v[i] = q(1);
                v[i + 1] = q(-1);
                v
            })
            .collect();
        Self::from_simple(&format!("GL{n}"), n, simple.clone(), simple, cap)
    }

    pub fn product(name: &str, factors: &[RootDatum], cap: usize) -> Result<Self, Error> {
        let rank: usize = factors.iter().map(|f| f.rank).sum();
        let mut coroots = Vec::new();
        let mut roots = Vec::new();
        let mut off = 0;
        for f in factors {
            let embed = |v: &QVec| {
                let mut w = vec![Q::zero(); rank];
                w[off..off + f.rank].clone_from_slice(v);
                w
            };
            coroots.extend(f.simple_coroots.iter().map(embed));
            roots.extend(f.simple_roots.iter().map(embed));
            off += f.rank;
        }
        Self::from_simple(name, rank, coroots, roots, cap)
    }

    /// The Levi datum keeping the simple roots indexed by `keep`.
    pub fn levi(&self, keep: &[usize]) -> Result<Self, Error> {
        let coroots = keep.iter().map(|&i| self.simple_coroots[i].clone()).collect();
        let roots = keep.iter().map(|&i| self.simple_roots[i].clone()).collect();
        let name = format!("{}[{}]", self.name, keep.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","));
        Self::from_simple(&name, self.rank, coroots, roots, self.weyl.len().max(1))
    }

    pub fn semisimple_rank(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl.len()
    }

    pub fn is_torus(&self) -> bool {
        self.simple_roots.is_empty()
    }

    /// All roots, positive first.
    pub fn roots(&self) -> Vec<QVec> {
        let mut v: Vec<QVec> = self.positive_roots.iter().map(|(a, _)| a.clone()).collect();
        v.extend(self.positive_roots.iter().map(|(a, _)| crate::linalg::vneg(a)));
        v
    }

    /// Half the sum of the positive roots.
    pub fn rho(&self) -> QVec {
        let mut s = vec![Q::zero(); self.rank];
        for (a, _) in &self.positive_roots {
            s = crate::linalg::vadd(&s, a);
        }
        vscale(&s, &crate::linalg::qf(1, 2))
    }

    pub fn rho_check(&self) -> QVec {
        let mut s = vec![Q::zero(); self.rank];
        for w in &self.fundamental_coweights {
            s = crate::linalg::vadd(&s, w);
        }
        s
    }

    /// Reflection `s_i` acting on `N`.
    pub fn reflection(&self, i: usize) -> Mat {
        reflection_on_n(&self.simple_coroots[i], &self.simple_roots[i])
    }

    /// `W`-orbit of a cocharacter.
    pub fn weyl_orbit(&self, v: &[Q]) -> Vec<QVec> {
        let gens: Vec<Mat> = (0..self.semisimple_rank()).map(|i| self.reflection(i)).collect();
        let mut seen: HashSet<QVec> = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::from([v.to_vec()]);
        while let Some(x) = queue.pop_front() {
            if !seen.insert(x.clone()) {
                continue;
            }
            order.push(x.clone());
            for g in &gens {
                let y = g.mul_vec(&x);
                if !seen.contains(&y) {
                    queue.push_back(y);
                }
            }
        }
        order
    }

    /// Whether `v ∈ N_ℚ` is dominant: `⟨v, α_i⟩ ≥ 0` for all simple roots.
    pub fn is_dominant(&self, v: &[Q]) -> bool {
        self.simple_roots.iter().all(|a| !dot(v, a).is_negative())
    }

    /// Whether a character is `W`-invariant.
    pub fn is_invariant_character(&self, m: &[Q]) -> bool {
        self.simple_coroots.iter().all(|c| dot(c, m).is_zero())
    }

    fn compute_positive_roots(&self) -> Vec<(QVec, QVec)> {
        let l = self.semisimple_rank();
        let rho_check = self.rho_check();
        let mut seen: HashSet<QVec> = HashSet::new();
        let mut out = Vec::new();
        let mut queue: VecDeque<(QVec, QVec)> =
            (0..l).map(|i| (self.simple_roots[i].clone(), self.simple_coroots[i].clone())).collect();
        while let Some((a, c)) = queue.pop_front() {
            if !seen.insert(a.clone()) {
                continue;
            }
            if dot(&rho_check, &a).is_positive() {
                out.push((a.clone(), c.clone()));
            }
            for i in 0..l {
                let ai = &self.simple_roots[i];
                let ci = &self.simple_coroots[i];
                let a2 = vsub(&a, &vscale(ai, &dot(ci, &a)));
                let c2 = vsub(&c, &vscale(ci, &dot(&c, ai)));
                if !seen.contains(&a2) {
                    queue.push_back((a2, c2));
                }
            }
        }
        out.sort_by_key(|(a, _)| (dot(&rho_check, a), a.clone()));
        out
    }
}

fn lin_comb(basis: &[QVec], coeffs: &[Q], n: usize) -> QVec {
    let mut v = vec![Q::zero(); n];
    for (b, c) in basis.iter().zip(coeffs) {
        v = crate::linalg::vadd(&v, &vscale(b, c));
    }
    v
}

/// `v ↦ v − ⟨v, α⟩·α^∨` as a matrix on `N`.
fn reflection_on_n(coroot: &[Q], root: &[Q]) -> Mat {
    let n = coroot.len();
    let mut m = Mat::identity(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= &coroot[i] * &root[j];
        }
    }
    m
}

fn validate_cartan(a: &Mat) -> Result<(), Error> {
    for i in 0..a.rows {
        if a[(i, i)] != q(2) {
            return Err(Error::InvalidDatum(format!("Cartan diagonal entry {i} is not 2")));
        }
        for j in 0..a.cols {
            if i != j {
                if a[(i, j)].is_positive() {
                    return Err(Error::InvalidDatum(format!("Cartan entry ({i},{j}) is positive")));
                }
                if a[(i, j)].is_zero() != a[(j, i)].is_zero() {
                    return Err(Error::InvalidDatum(format!("Cartan entries ({i},{j}) and ({j},{i}) disagree on vanishing")));
                }
            }
        }
    }
    Ok(())
}

fn close_group(gens: &[Mat], n: usize, cap: usize) -> Result<Vec<Mat>, Error> {
    let id = Mat::identity(n);
    let mut seen: HashSet<Mat> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.mul(&x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::WeylCap(cap));
                }
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(out)
}

/// A parabolic type given by its index set `I_P` of simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParabolicType {
    pub index_set: BTreeSet<usize>,
}

impl ParabolicType {
    pub fn borel(d: &RootDatum) -> Self {
        ParabolicType { index_set: (0..d.semisimple_rank()).collect() }
    }

    pub fn whole(_: &RootDatum) -> Self {
        ParabolicType { index_set: BTreeSet::new() }
    }

    pub fn new(d: &RootDatum, set: impl IntoIterator<Item = usize>) -> Result<Self, Error> {
        let index_set: BTreeSet<usize> = set.into_iter().collect();
        if index_set.iter().any(|&i| i >= d.semisimple_rank()) {
            return Err(Error::InvalidDatum("parabolic index out of range".into()));
        }
        Ok(ParabolicType { index_set })
    }

    pub fn rho_check(&self, d: &RootDatum) -> QVec {
        let mut s = vec![Q::zero(); d.rank];
        for &j in &self.index_set {
            s = crate::linalg::vadd(&s, &d.fundamental_coweights[j]);
        }
        s
    }

    /// Generators of `W_P`: reflections in the simple roots outside `I_P`.
    pub fn weyl_generators(&self, d: &RootDatum) -> Vec<Mat> {
        (0..d.semisimple_rank()).filter(|i| !self.index_set.contains(i)).map(|i| d.reflection(i)).collect()
    }
}

/// Order of a finite-order integer matrix, capped.
pub fn matrix_order(m: &Mat, cap: usize) -> Option<usize> {
    let id = Mat::identity(m.rows);
    let mut p = m.clone();
    for k in 1..=cap {
        if p == id {
            return Some(k);
        }
        p = p.mul(m);
    }
    None
}

/// Least common multiple of Coxeter-element orders over all parabolic subsystems.
pub fn coxeter_h(d: &RootDatum) -> u64 {
    let l = d.semisimple_rank();
    let mut h: u64 = 1;
    for mask in 1u64..(1u64 << l) {
        let mut c = Mat::identity(d.rank);
        for i in 0..l {
            if mask >> i & 1 == 1 {
                c = c.mul(&d.reflection(i));
            }
        }
        let ord = matrix_order(&c, d.weyl_order().max(2)).expect("Coxeter elements have finite order") as u64;
        h = h.lcm(&ord);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;

    #[test]
    fn a1_has_order_two() {
        let d = RootDatum::preset("A1").unwrap();
        assert_eq!(d.weyl_order(), 2);
        assert_eq!(d.simple_roots[0], qvec(&[2]));
        assert_eq!(d.fundamental_weights[0], vec![crate::linalg::qf(1, 1)]);
        assert_eq!(d.rho(), qvec(&[1]));
    }

    #[test]
    fn gl1_is_a_torus() {
        let d = RootDatum::preset("GL1").unwrap();
        assert_eq!(d.weyl_order(), 1);
        assert_eq!(d.center_basis.len(), 1);
    }

    #[test]
    fn a2_data() {
        let d = RootDatum::preset("A2").unwrap();
        assert_eq!(d.weyl_order(), 6);
        assert_eq!(d.cartan, Mat::from_i64(&[vec![2, -1], vec![-1, 2]]));
        assert_eq!(d.positive_roots.len(), 3);
        assert_eq!(d.weyl_orbit(&d.fundamental_coweights[0]).len(), 3);
    }

    #[test]
    fn dual_bases() {
        for tag in ["A1", "A2", "A3", "GL3", "A1xGL1"] {
            let d = RootDatum::preset(tag).unwrap();
            let l = d.semisimple_rank();
            for i in 0..l {
                for j in 0..l {
                    let want = if i == j { q(1) } else { q(0) };
                    assert_eq!(dot(&d.fundamental_coweights[i], &d.simple_roots[j]), want, "{tag}");
                    assert_eq!(dot(&d.simple_coroots[i], &d.fundamental_weights[j]), want, "{tag}");
                }
            }
            assert_eq!(d.center_basis.len() + l, d.rank, "{tag}");
        }
    }

    #[test]
    fn generators_fix_center() {
        let d = RootDatum::preset("GL3").unwrap();
        for i in 0..2 {
            for z in &d.center_basis {
                assert_eq!(&d.reflection(i).mul_vec(z), z);
            }
        }
    }

    #[test]
    fn coxeter_numbers() {
        assert_eq!(coxeter_h(&RootDatum::preset("GL1").unwrap()), 1);
        assert_eq!(coxeter_h(&RootDatum::preset("A1").unwrap()), 2);
        assert_eq!(coxeter_h(&RootDatum::preset("A2").unwrap()), 6);
    }

    #[test]
    fn invalid_cartan_rejected() {
        let r = RootDatum::from_simple("bad", 1, vec![qvec(&[1])], vec![qvec(&[3])], 10);
        assert!(r.is_err());
    }

    #[test]
    fn weyl_cap_enforced() {
        assert!(matches!(RootDatum::preset_with_cap("A3", 10), Err(Error::WeylCap(10))));
    }
}
