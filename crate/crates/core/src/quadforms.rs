// SPDX-License-Identifier: MIT OR Apache-2.0
//! Bilinear forms on `N_ℚ`, weight multisets, the self-maps `φ_F = b⁻¹F`, their
//! pseudoinverses, and the positivity constant `c_{X/V}`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::linalg::{dot, fmt_q, q, qf, Mat, Q, QVec};
use crate::poly::{sign_vectors, Arrangement, Sign};
use crate::rootdata::RootDatum;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm {
    pub matrix: Mat,
    pub tag: Definiteness,
}

impl QuadForm {
    pub fn new(matrix: Mat) -> Result<Self, Error> {
        if !matrix.is_symmetric() {
            return Err(Error::Precondition("bilinear form must be symmetric".into()));
        }
        let tag = classify(&matrix);
        Ok(QuadForm { matrix, tag })
    }

    pub fn identity(n: usize) -> Self {
        QuadForm { matrix: Mat::identity(n), tag: Definiteness::PositiveDefinite }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn pair(&self, a: &[Q], b: &[Q]) -> Q {
        self.matrix.bilinear(a, b)
    }

    pub fn norm2(&self, a: &[Q]) -> Q {
        self.pair(a, a)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.tag == Definiteness::PositiveDefinite
    }

    pub fn scale(&self, s: &Q) -> QuadForm {
        QuadForm::new(self.matrix.scale(s)).expect("scaling keeps symmetry")
    }

    pub fn add(&self, o: &QuadForm) -> QuadForm {
        QuadForm::new(self.matrix.add(&o.matrix)).expect("sum keeps symmetry")
    }

    /// Whether `σᵀ F σ = F` for every generator.
    pub fn is_weyl_invariant(&self, d: &RootDatum) -> bool {
        (0..d.semisimple_rank()).all(|i| {
            let s = d.reflection(i);
            s.transpose().mul(&self.matrix).mul(&s) == self.matrix
        })
    }

    fn require_pd(&self) -> Result<(), Error> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(Error::Precondition("the norm b must be positive definite".into()))
        }
    }
}

/// Exact inertia via Descartes' rule on the (real-rooted) characteristic polynomial.
fn classify(m: &Mat) -> Definiteness {
    let n = m.rows;
    if n == 0 {
        return Definiteness::PositiveDefinite;
    }
    let p = m.char_poly();
    let pos = sign_changes(&p);
    let neg_poly: Vec<Q> = p.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect();
    let neg = sign_changes(&neg_poly);
    if pos == n {
        Definiteness::PositiveDefinite
    } else if neg == n {
        Definiteness::NegativeDefinite
    } else if pos > 0 && neg > 0 {
        Definiteness::Indefinite
    } else {
        Definiteness::Unknown
    }
}

fn sign_changes(p: &[Q]) -> usize {
    let signs: Vec<bool> = p.iter().filter(|c| !c.is_zero()).map(Signed::is_positive).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// A finite multiset of characters with integer (possibly negative) multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WeightedRep {
    entries: Vec<(QVec, i64)>,
}

impl WeightedRep {
    pub fn new(entries: impl IntoIterator<Item = (QVec, i64)>) -> Self {
        let mut map: BTreeMap<QVec, i64> = BTreeMap::new();
        for (w, m) in entries {
            *map.entry(w).or_insert(0) += m;
        }
        WeightedRep { entries: map.into_iter().filter(|(_, m)| *m != 0).collect() }
    }

    pub fn from_i64(weights: &[(Vec<i64>, i64)]) -> Self {
        Self::new(weights.iter().map(|(w, m)| (crate::linalg::qvec(w), *m)))
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(QVec, i64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn dimension(&self) -> i64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// Adjoint representation: every root once, plus the zero weight with multiplicity `rank`.
    pub fn adjoint(d: &RootDatum) -> Self {
        let mut e: Vec<(QVec, i64)> = d.roots().into_iter().map(|r| (r, 1)).collect();
        e.push((vec![Q::zero(); d.rank], d.rank as i64));
        Self::new(e)
    }

    /// `𝔤[1]` as a virtual class: every root with multiplicity `−1`.
    pub fn shifted_roots(d: &RootDatum) -> Self {
        Self::new(d.roots().into_iter().map(|r| (r, -1)))
    }

    pub fn sum(&self, o: &WeightedRep) -> Self {
        Self::new(self.entries.iter().chain(&o.entries).cloned())
    }

    /// `V^{⊕m}`.
    pub fn repeat(&self, m: i64) -> Self {
        Self::new(self.entries.iter().map(|(w, k)| (w.clone(), k * m)))
    }

    pub fn dual(&self) -> Self {
        Self::new(self.entries.iter().map(|(w, k)| (crate::linalg::vneg(w), *k)))
    }

    pub fn filter(&self, keep: impl Fn(&QVec) -> bool) -> Self {
        Self::new(self.entries.iter().filter(|(w, _)| keep(w)).cloned())
    }

    /// `Σ mult·weight`.
    pub fn det(&self, n: usize) -> QVec {
        let mut s = vec![Q::zero(); n];
        for (w, m) in &self.entries {
            for (si, wi) in s.iter_mut().zip(w) {
                *si += wi * q(*m);
            }
        }
        s
    }

    /// `(w₁, w₂)_F = Σ mult(χ)·χ(w₁)·χ(w₂)`.
    pub fn ch2_form(&self, n: usize) -> QuadForm {
        let mut m = Mat::zeros(n, n);
        for (w, k) in &self.entries {
            let k = q(*k);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += &w[i] * &w[j] * &k;
                }
            }
        }
        QuadForm::new(m).expect("ch2 forms are symmetric")
    }

    pub fn is_weyl_stable(&self, d: &RootDatum) -> bool {
        (0..d.semisimple_rank()).all(|i| {
            let a = &d.simple_roots[i];
            let c = &d.simple_coroots[i];
            let moved = WeightedRep::new(self.entries.iter().map(|(w, k)| {
                let p = dot(c, w);
                (crate::linalg::vsub(w, &crate::linalg::vscale(a, &p)), *k)
            }));
            moved == *self
        })
    }

    pub fn render(&self) -> Vec<(Vec<String>, i64)> {
        self.entries.iter().map(|(w, k)| (w.iter().map(fmt_q).collect(), *k)).collect()
    }
}

/// A rational endomorphism of `N_ℚ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfMap {
    pub matrix: Mat,
}

impl SelfMap {
    pub fn apply(&self, v: &[Q]) -> QVec {
        self.matrix.mul_vec(v)
    }

    pub fn compose(&self, o: &SelfMap) -> SelfMap {
        SelfMap { matrix: self.matrix.mul(&o.matrix) }
    }

    pub fn is_self_adjoint(&self, b: &QuadForm) -> bool {
        self.matrix.transpose().mul(&b.matrix) == b.matrix.mul(&self.matrix)
    }

    pub fn image_basis(&self) -> Vec<QVec> {
        self.matrix.column_basis()
    }

    pub fn kernel_basis(&self) -> Vec<QVec> {
        self.matrix.nullspace()
    }

    /// Certified enclosure of the largest absolute eigenvalue.
    pub fn operator_norm(&self) -> Interval {
        spectral_radius(&self.matrix)
    }
}

/// The map `φ` with `(φ(w), v)_b = (w, v)_F`.
pub fn phi_of(f: &QuadForm, b: &QuadForm) -> Result<SelfMap, Error> {
    let binv = b.matrix.inverse().ok_or_else(|| Error::Singular("b is not invertible".into()))?;
    Ok(SelfMap { matrix: binv.mul(&f.matrix) })
}

/// `b`-orthogonal projector onto the span of `basis`.
pub fn b_projector(basis: &[QVec], b: &QuadForm) -> Mat {
    let n = b.dim();
    if basis.is_empty() {
        return Mat::zeros(n, n);
    }
    let a = Mat::from_cols(basis, n);
    let gram = a.transpose().mul(&b.matrix).mul(&a);
    let ginv = gram.inverse().expect("b is definite on any span");
    a.mul(&ginv).mul(&a.transpose()).mul(&b.matrix)
}

/// Moore–Penrose pseudoinverse with respect to `b`: inverse on the image, zero on the kernel.
pub fn pseudoinverse(phi: &SelfMap, b: &QuadForm) -> Result<SelfMap, Error> {
    if !phi.is_self_adjoint(b) {
        return Err(Error::Precondition("pseudoinverse needs a b-self-adjoint map".into()));
    }
    let n = b.dim();
    let p = b_projector(&phi.image_basis(), b);
    let k = Mat::identity(n).sub(&p);
    let inv = phi.matrix.add(&k).inverse().expect("φ + kernel projector is invertible");
    Ok(SelfMap { matrix: inv.sub(&k) })
}

/// The norm used when none is given: `ch₂(𝔤)` plus the standard form on `N^W`,
/// read off the projection to `N^W` along the coroot span.
pub fn default_norm(d: &RootDatum) -> QuadForm {
    let n = d.rank;
    let ch2 = WeightedRep::adjoint(d).ch2_form(n);
    let k = d.center_basis.len();
    if k == 0 {
        return ch2;
    }
    let cols: Vec<QVec> = d.center_basis.iter().chain(&d.simple_coroots).cloned().collect();
    let coords = Mat::from_cols(&cols, n).inverse().expect("center and coroots span N_Q");
    let mut gram = Mat::zeros(n, n);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = dot(&d.center_basis[i], &d.center_basis[j]);
        }
    }
    let central = coords.transpose().mul(&gram).mul(&coords);
    QuadForm::new(ch2.matrix.add(&central)).expect("sum of symmetric forms")
}

/// `χ†` with `(χ†, w)_b = ⟨w, χ⟩`.
pub fn dagger(chi: &[Q], b: &QuadForm) -> QVec {
    b.matrix.inverse().expect("b is invertible").mul_vec(chi)
}

/// `w ↦ (w, −)_b` as a character.
pub fn flat(w: &[Q], b: &QuadForm) -> QVec {
    b.matrix.mul_vec(w)
}

/// A closed rational interval; `lo == hi` when the value is known exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(serialize_with = "ser_q")]
    pub lo: Q,
    #[serde(serialize_with = "ser_q")]
    pub hi: Q,
}

pub fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

impl Interval {
    pub fn exact(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    /// Product of two nonnegative intervals.
    pub fn mul_nonneg(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo * &o.lo, hi: &self.hi * &o.hi }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.clone().max(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    /// `Some(true)` if certainly below `x`, `Some(false)` if certainly not, `None` if undecided.
    pub fn less_than(&self, x: &Q) -> Option<bool> {
        if &self.hi < x {
            Some(true)
        } else if &self.lo >= x {
            Some(false)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    /// Enclosure of `√x` for `x ≥ 0`: exact on rational squares, otherwise of width below `10⁻¹³`.
    pub fn sqrt_of(x: &Q) -> Interval {
        assert!(!x.is_negative(), "square root of a negative number");
        let (p, d) = (x.numer().clone(), x.denom().clone());
        let (sp, sd) = (p.sqrt(), d.sqrt());
        if &sp * &sp == p && &sd * &sd == d {
            return Interval::exact(Q::new(sp, sd));
        }
        // √(p/d) = √(p·d)/d, evaluated at a fixed decimal scale.
        let scale = num_bigint::BigInt::from(10u64.pow(13));
        let r = (&p * &d * &scale * &scale).sqrt();
        let den = &d * &scale;
        Interval { lo: Q::new(r.clone(), den.clone()), hi: Q::new(r + 1, den) }
    }

    pub fn midpoint_f64(&self) -> f64 {
        crate::linalg::q_to_f64(&((&self.lo + &self.hi) / q(2)))
    }
}

fn eval_poly(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

fn poly_rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1;
        let f = &r[k] / &lead;
        for i in 0..=db {
            let t = &f * &b[i];
            r[k - db + i] -= t;
        }
        r.pop();
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

fn derivative(p: &[Q]) -> Vec<Q> {
    p.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect()
}

fn sturm_sequence(p: &[Q]) -> Vec<Vec<Q>> {
    let mut seq = vec![p.to_vec(), derivative(p)];
    while seq.last().is_some_and(|l| !l.is_empty()) {
        let n = seq.len();
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.iter().map(|c| -c).collect());
    }
    seq
}

fn sign_variations(seq: &[Vec<Q>], x: &Q) -> usize {
    let vals: Vec<bool> = seq.iter().map(|s| eval_poly(s, x)).filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
    vals.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in `(a, b]`.
fn count_roots(seq: &[Vec<Q>], a: &Q, b: &Q) -> usize {
    sign_variations(seq, a) - sign_variations(seq, b)
}

/// Simplest rational in `[lo, hi]` (smallest denominator), via continued fractions.
fn simplest_between(lo: &Q, hi: &Q) -> Q {
    if !lo.is_positive() && !hi.is_negative() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if &fl + Q::one() <= *hi {
        return fl + Q::one();
    }
    // Both ends share the integer part; recurse on reciprocals of the fractional parts.
    let a = (hi - &fl).recip();
    let b = (lo - &fl).recip();
    fl + simplest_between(&a, &b).recip()
}

/// Width target for certified enclosures.
pub fn default_enclosure_width() -> Q {
    qf(1, 1_000_000_000_000)
}

/// Certified enclosure of the spectral radius of a matrix with real spectrum.
pub fn spectral_radius(m: &Mat) -> Interval {
    if m.rows == 0 || m.is_zero() {
        return Interval::exact(Q::zero());
    }
    let p = m.char_poly();
    let seq = sturm_sequence(&p);
    let lead = p.last().expect("nonempty").clone();
    let bound = Q::one() + p.iter().take(p.len() - 1).map(|c| (c / &lead).abs()).fold(Q::zero(), |a, b| a.max(b));
    let top = extreme_root(&p, &seq, &bound, true);
    let bot = extreme_root(&p, &seq, &bound, false);
    let abs_bot = Interval { lo: -bot.hi.clone(), hi: -bot.lo.clone() };
    let radius = top.max(&abs_bot);
    Interval { lo: radius.lo.max(Q::zero()), hi: radius.hi }
}

fn extreme_root(p: &[Q], seq: &[Vec<Q>], bound: &Q, largest: bool) -> Interval {
    let (mut lo, mut hi) = (-bound.clone(), bound.clone());
    let width = default_enclosure_width();
    // Invariant: the extreme root lies in (lo, hi].
    while &hi - &lo > width {
        let mid = (&lo + &hi) / q(2);
        let upper = count_roots(seq, &mid, bound) > 0;
        if largest {
            if upper {
                lo = mid;
            } else {
                hi = mid;
            }
        } else if count_roots(seq, &(-bound.clone() - Q::one()), &mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
        let s = simplest_between(&lo, &hi);
        if eval_poly(p, &s).is_zero() && count_roots(seq, &lo, &hi) == 1 && s > lo {
            return Interval::exact(s);
        }
    }
    if eval_poly(p, &hi).is_zero() {
        return Interval::exact(hi);
    }
    Interval { lo, hi }
}

/// `T^{λ<0}`: weights of `X` and roots (with multiplicity `−1`) pairing negatively with `λ`.
pub fn negative_part(x: &WeightedRep, d: &RootDatum, lambda: &[Q]) -> WeightedRep {
    let xs = x.filter(|w| dot(lambda, w).is_negative());
    let gs = WeightedRep::shifted_roots(d).filter(|w| dot(lambda, w).is_negative());
    xs.sum(&gs)
}

/// The arrangement cut by the weights of `X` and the roots, with all its faces.
pub fn arrangement_faces(x: &WeightedRep, d: &RootDatum) -> (Arrangement, Vec<Vec<Sign>>) {
    let mut arr = Arrangement::default();
    for (w, _) in x.entries() {
        arr.insert(w);
    }
    for r in d.roots() {
        arr.insert(&r);
    }
    let faces = sign_vectors(&arr.hyps, &|_| Sign::ALL.to_vec(), d.rank);
    (arr, faces)
}

/// The negative part determined by a face's sign vector.
pub fn negative_part_for_face(x: &WeightedRep, d: &RootDatum, arr: &Arrangement, face: &[Sign]) -> WeightedRep {
    let xs = x.filter(|w| arr.sign_of(face, w) == Sign::Neg);
    let gs = WeightedRep::shifted_roots(d).filter(|w| arr.sign_of(face, w) == Sign::Neg);
    xs.sum(&gs)
}

/// `c_{X/V} = ‖φ_V⁺‖_b · max_λ ‖φ_{T^{λ<0}}‖_b`.
pub fn c_xv(x: &WeightedRep, d: &RootDatum, v: &WeightedRep, b: &QuadForm) -> Result<Interval, Error> {
    b.require_pd()?;
    let n = d.rank;
    let phi_v = phi_of(&v.ch2_form(n), b)?;
    let plus = pseudoinverse(&phi_v, b)?;
    let pnorm = plus.operator_norm();
    let (arr, faces) = arrangement_faces(x, d);
    let mut best = Interval::exact(Q::zero());
    for face in &faces {
        let t = negative_part_for_face(x, d, &arr, face);
        let nt = phi_of(&t.ch2_form(n), b)?.operator_norm();
        best = best.max(&nt);
    }
    Ok(pnorm.mul_nonneg(&best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;

    fn a1() -> RootDatum {
        RootDatum::preset("A1").unwrap()
    }

    #[test]
    fn default_norm_is_invariant_and_definite() {
        for tag in ["GL1", "GL2", "GL3", "A1", "A2", "A1xGL1"] {
            let d = RootDatum::preset(tag).unwrap();
            let b = default_norm(&d);
            assert!(b.is_positive_definite(), "{tag}");
            assert!(b.is_weyl_invariant(&d), "{tag}");
        }
        assert_eq!(default_norm(&a1()), WeightedRep::adjoint(&a1()).ch2_form(1));
        assert_eq!(default_norm(&RootDatum::torus(2)), QuadForm::identity(2));
    }

    #[test]
    fn ch2_examples() {
        let std = WeightedRep::from_i64(&[(vec![1], 1), (vec![-1], 1)]);
        assert_eq!(std.ch2_form(1).matrix[(0, 0)], q(2));
        assert_eq!(WeightedRep::adjoint(&a1()).ch2_form(1).matrix[(0, 0)], q(8));
        assert!(WeightedRep::empty().ch2_form(2).matrix.is_zero());
    }

    #[test]
    fn phi_examples() {
        let b = QuadForm::new(Mat::from_i64(&[vec![2]])).unwrap();
        let std = WeightedRep::from_i64(&[(vec![1], 1), (vec![-1], 1)]);
        assert_eq!(phi_of(&std.ch2_form(1), &b).unwrap().matrix, Mat::identity(1));
        let ad = WeightedRep::adjoint(&a1());
        assert_eq!(phi_of(&ad.ch2_form(1), &b).unwrap().matrix, Mat::from_i64(&[vec![4]]));
    }

    #[test]
    fn pseudoinverse_diag() {
        let b = QuadForm::identity(2);
        let phi = SelfMap { matrix: Mat::diag(&[q(2), q(0)]) };
        assert_eq!(pseudoinverse(&phi, &b).unwrap().matrix, Mat::diag(&[qf(1, 2), q(0)]));
    }

    #[test]
    fn pseudoinverse_rejects_non_self_adjoint() {
        let b = QuadForm::identity(2);
        let phi = SelfMap { matrix: Mat::from_i64(&[vec![0, 1], vec![0, 0]]) };
        assert!(pseudoinverse(&phi, &b).is_err());
    }

    #[test]
    fn dagger_of_root() {
        let b = QuadForm::new(Mat::from_i64(&[vec![2]])).unwrap();
        assert_eq!(dagger(&qvec(&[2]), &b), qvec(&[1]));
    }

    #[test]
    fn c_xv_examples() {
        let gl1 = RootDatum::preset("GL1").unwrap();
        let b = QuadForm::identity(1);
        let x = WeightedRep::from_i64(&[(vec![1], 1)]);
        let v = WeightedRep::from_i64(&[(vec![1], 1)]);
        assert_eq!(c_xv(&x, &gl1, &v, &b).unwrap(), Interval::exact(q(1)));
        assert_eq!(c_xv(&x, &gl1, &v.repeat(2), &b).unwrap(), Interval::exact(qf(1, 2)));
        let t2 = RootDatum::torus(2);
        let v2 = WeightedRep::from_i64(&[(vec![1, 0], 1), (vec![0, 1], 1)]);
        assert_eq!(c_xv(&WeightedRep::empty(), &t2, &v2, &QuadForm::identity(2)).unwrap(), Interval::exact(q(0)));
    }

    #[test]
    fn irrational_norm_is_enclosed() {
        // Eigenvalues (3 ± √5)/2.
        let m = Mat::from_i64(&[vec![2, 1], vec![1, 1]]);
        let r = spectral_radius(&m);
        assert!(!r.is_exact());
        assert!(r.width() <= default_enclosure_width());
        let phi = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((r.midpoint_f64() - phi).abs() < 1e-9);
    }

    #[test]
    fn definiteness_tags() {
        assert_eq!(QuadForm::new(Mat::diag(&[q(1), q(-1)])).unwrap().tag, Definiteness::Indefinite);
        assert_eq!(QuadForm::new(Mat::diag(&[q(1), q(0)])).unwrap().tag, Definiteness::Unknown);
        assert_eq!(QuadForm::new(Mat::diag(&[q(-1), q(-2)])).unwrap().tag, Definiteness::NegativeDefinite);
    }
}
