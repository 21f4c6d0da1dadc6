// SPDX-License-Identifier: MIT OR Apache-2.0
//! Polyhedral cones in `N_ℚ`, the parabolic chamber cones and the fan `Σ_X`.
//!
//! `Σ_X` is cut out of the dominant chamber by the weights of `X`: each cone is
//! a sign pattern on the weights intersected with a face of the chamber. Cones
//! are stored with both descriptions (halfspaces and generators) because the
//! optimizer needs the former and interior tests are cheap with either.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::linalg::{fmt_q, is_zero_vec, unit, vadd, vneg, Mat, Q, QVec};
use crate::poly::{cone_generators, sign_vectors, Arrangement, Sign};
use crate::quadforms::{b_projector, QuadForm, WeightedRep};
use crate::rootdata::{ParabolicType, RootDatum};
use crate::{Error, Result};

/// Which closed chamber cone of a parabolic type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChamberKind {
    /// Center plus the fundamental coweights of `I_P`.
    Sigma,
    /// The span of `σ̄_P` cut by the fundamental weights of `I_P`.
    Tau,
}

/// Sign data that generated a cone of `Σ_X`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub positive: Vec<QVec>,
    pub negative: Vec<QVec>,
    pub index_set: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub struct Cone {
    pub id: usize,
    pub dim: usize,
    /// Basis of `Span(σ)`.
    pub span_basis: Vec<QVec>,
    /// Functionals vanishing on the span.
    pub equations: Vec<QVec>,
    /// `σ = Span ∩ {ℓ ≥ 0}`; each is strictly positive on the relative interior.
    pub halfspaces: Vec<QVec>,
    pub rays: Vec<QVec>,
    pub lineality: Vec<QVec>,
    /// A point of the relative interior.
    pub witness: QVec,
    pub provenance: Provenance,
}

impl Cone {
    fn from_constraints(id: usize, n: usize, equations: Vec<QVec>, halfspaces: Vec<QVec>, provenance: Provenance) -> Self {
        let span_basis =
            if equations.is_empty() { (0..n).map(|i| unit(n, i)).collect() } else { Mat::from_rows(&equations).nullspace() };
        let (rays, lineality) = cone_generators(&equations, &halfspaces, n);
        let witness = rays.iter().fold(vec![Q::zero(); n], |acc, r| vadd(&acc, r));
        let dim = span_basis.len();
        Cone { id, dim, span_basis, equations, halfspaces, rays, lineality, witness, provenance }
    }

    pub fn ambient_dim(&self) -> usize {
        self.witness.len()
    }

    pub fn in_span(&self, v: &[Q]) -> bool {
        self.equations.iter().all(|e| crate::linalg::dot(e, v).is_zero())
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.in_span(v) && self.halfspaces.iter().all(|h| !crate::linalg::dot(h, v).is_negative())
    }

    pub fn in_relative_interior(&self, v: &[Q]) -> bool {
        self.in_span(v) && self.halfspaces.iter().all(|h| crate::linalg::dot(h, v).is_positive())
    }

    /// Generators whose nonnegative span is the cone (lineality taken in both directions).
    pub fn generators(&self) -> Vec<QVec> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(vneg(l));
        }
        g
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    pub fn dump(&self) -> ConeDump {
        let s = |vs: &[QVec]| vs.iter().map(|v| v.iter().map(fmt_q).collect()).collect();
        ConeDump {
            id: self.id,
            dim: self.dim,
            rays: s(&self.rays),
            lineality: s(&self.lineality),
            halfspaces: s(&self.halfspaces),
            positive_weights: s(&self.provenance.positive),
            negative_weights: s(&self.provenance.negative),
            index_set: self.provenance.index_set.iter().copied().collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeDump {
    pub id: usize,
    pub dim: usize,
    pub rays: Vec<Vec<String>>,
    pub lineality: Vec<Vec<String>>,
    pub halfspaces: Vec<Vec<String>>,
    pub positive_weights: Vec<Vec<String>>,
    pub negative_weights: Vec<Vec<String>>,
    pub index_set: Vec<usize>,
}

/// `Span(σ̄_P) = N^{W_P}`, cut by `α_j ≥ 0` (`Sigma`) or `ω_j ≥ 0` (`Tau`) for `j ∈ I_P`.
pub fn chamber_cone(d: &RootDatum, ip: &ParabolicType, kind: ChamberKind) -> Cone {
    let l = d.semisimple_rank();
    let equations: Vec<QVec> = (0..l).filter(|i| !ip.index_set.contains(i)).map(|i| d.simple_roots[i].clone()).collect();
    let halfspaces: Vec<QVec> = ip
        .index_set
        .iter()
        .map(|&j| match kind {
            ChamberKind::Sigma => d.simple_roots[j].clone(),
            ChamberKind::Tau => d.fundamental_weights[j].clone(),
        })
        .collect();
    let prov = Provenance { index_set: ip.index_set.clone(), ..Default::default() };
    Cone::from_constraints(0, d.rank, equations, halfspaces, prov)
}

#[derive(Clone, Debug)]
pub struct Fan {
    pub cones: Vec<Cone>,
    pub arrangement: Arrangement,
    /// Arrangement index of each simple root.
    root_lines: Vec<usize>,
    by_signs: HashMap<Vec<Sign>, usize>,
}

impl Fan {
    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn dump(&self) -> Vec<ConeDump> {
        self.cones.iter().map(Cone::dump).collect()
    }

    /// Whether `v` lies in the dominant chamber, the support of the fan.
    pub fn in_support(&self, v: &[Q]) -> bool {
        let s = self.arrangement.signs_of_point(v);
        self.root_lines.iter().all(|&i| s[i] != Sign::Neg)
    }
}

/// The fan of sign patterns of the weights of `X` on the faces of the dominant chamber.
pub fn build_sigma_x(d: &RootDatum, x: &WeightedRep) -> Fan {
    let n = d.rank;
    let mut arr = Arrangement::default();
    // Simple roots first so that their lines keep the root's orientation.
    let root_lines: Vec<usize> =
        d.simple_roots.iter().map(|a| arr.insert(a).expect("simple roots are nonzero")).collect();
    for (w, _) in x.entries() {
        arr.insert(w);
    }
    let restricted: BTreeSet<usize> = root_lines.iter().copied().collect();
    let allowed = |i: usize| if restricted.contains(&i) { vec![Sign::Zero, Sign::Pos] } else { Sign::ALL.to_vec() };
    let patterns = sign_vectors(&arr.hyps, &allowed, n);
    let mut cones = Vec::with_capacity(patterns.len());
    let mut by_signs = HashMap::new();
    // Lower-dimensional faces first, then lexicographic sign order.
    let mut ordered: Vec<(usize, Vec<Sign>)> =
        patterns.into_iter().map(|s| (s.iter().filter(|&&x| x == Sign::Zero).count(), s)).collect();
    ordered.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    for (id, (_, s)) in ordered.into_iter().enumerate() {
        let mut eqs = Vec::new();
        let mut hs = Vec::new();
        for (h, sign) in arr.hyps.iter().zip(&s) {
            match sign {
                Sign::Zero => eqs.push(h.clone()),
                Sign::Pos => hs.push(h.clone()),
                Sign::Neg => hs.push(vneg(h)),
            }
        }
        let mut prov = Provenance::default();
        for (w, _) in x.entries() {
            match arr.sign_of(&s, w) {
                Sign::Pos => prov.positive.push(w.clone()),
                Sign::Neg => prov.negative.push(w.clone()),
                Sign::Zero => {}
            }
        }
        prov.index_set = root_lines.iter().enumerate().filter(|(_, &li)| s[li] == Sign::Pos).map(|(i, _)| i).collect();
        let cone = Cone::from_constraints(id, n, eqs, hs, prov);
        debug_assert!(cone.in_relative_interior(&cone.witness));
        by_signs.insert(s, id);
        cones.push(cone);
    }
    Fan { cones, arrangement: arr, root_lines, by_signs }
}

/// `b`-orthogonal projection onto `Span(c)`.
pub fn project_onto_span(c: &Cone, v: &[Q], b: &QuadForm) -> QVec {
    if c.dim == c.ambient_dim() {
        return v.to_vec();
    }
    b_projector(&c.span_basis, b).mul_vec(v)
}

/// The unique cone of the fan whose relative interior contains `v`.
pub fn minimal_cone_containing<'a>(f: &'a Fan, v: &[Q]) -> Result<&'a Cone> {
    if !f.in_support(v) {
        return Err(Error::Precondition("point lies outside the support of the fan".into()));
    }
    let s = f.arrangement.signs_of_point(v);
    let id = *f.by_signs.get(&s).expect("every realized sign vector is a cone");
    let cone = &f.cones[id];
    assert!(cone.in_relative_interior(v));
    Ok(cone)
}

/// Exhaustive version of [`minimal_cone_containing`]: every cone with `v` in its relative interior.
pub fn cones_with_point_in_interior(f: &Fan, v: &[Q]) -> Vec<usize> {
    f.cones.iter().filter(|c| c.in_relative_interior(v)).map(|c| c.id).collect()
}

/// Whether `v` is the zero vector or lies on some cone of the fan.
pub fn is_on_fan(f: &Fan, v: &[Q]) -> bool {
    is_zero_vec(v) || f.cones.iter().any(|c| c.contains(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qvec};

    fn a1() -> RootDatum {
        RootDatum::preset("A1").unwrap()
    }

    #[test]
    fn a1_chamber_cones() {
        let d = a1();
        let b = chamber_cone(&d, &ParabolicType::borel(&d), ChamberKind::Sigma);
        assert_eq!(b.dim, 1);
        assert_eq!(b.rays.len(), 1);
        assert!(b.contains(&d.simple_coroots[0]));
        assert!(!b.contains(&vneg(&d.simple_coroots[0])));
        let g = chamber_cone(&d, &ParabolicType::whole(&d), ChamberKind::Sigma);
        assert_eq!(g.dim, 0);
    }

    #[test]
    fn gl1_chamber_is_the_line() {
        let d = RootDatum::preset("GL1").unwrap();
        let c = chamber_cone(&d, &ParabolicType::borel(&d), ChamberKind::Sigma);
        assert_eq!(c.dim, 1);
        assert_eq!(c.lineality.len(), 1);
        assert!(c.contains(&qvec(&[-7])));
    }

    #[test]
    fn gl1_fans() {
        let d = RootDatum::preset("GL1").unwrap();
        for x in [WeightedRep::from_i64(&[(vec![1], 1)]), WeightedRep::from_i64(&[(vec![1], 1), (vec![-1], 1)])] {
            let f = build_sigma_x(&d, &x);
            assert_eq!(f.len(), 3);
            let c = minimal_cone_containing(&f, &qvec(&[-2])).unwrap();
            assert_eq!(c.dim, 1);
            assert!(c.contains(&qvec(&[-5])) && !c.contains(&qvec(&[1])));
            assert!(minimal_cone_containing(&f, &qvec(&[0])).unwrap().is_zero());
        }
    }

    #[test]
    fn a1_without_x_is_the_dominant_chamber() {
        let d = a1();
        let f = build_sigma_x(&d, &WeightedRep::empty());
        assert_eq!(f.len(), 2);
        let c = minimal_cone_containing(&f, &d.simple_coroots[0]).unwrap();
        assert_eq!(c.dim, 1);
        assert_eq!(c.provenance.index_set.len(), 1);
        assert!(minimal_cone_containing(&f, &vneg(&d.simple_coroots[0])).is_err());
    }

    #[test]
    fn projection_examples() {
        let d = RootDatum::torus(2);
        let f = build_sigma_x(&d, &WeightedRep::from_i64(&[(vec![0, 1], 1)]));
        let axis = f.cones.iter().find(|c| c.dim == 1).unwrap();
        let b = QuadForm::identity(2);
        assert_eq!(project_onto_span(axis, &qvec(&[3, 4]), &b), qvec(&[3, 0]));
        let v = qvec(&[5, 0]);
        assert_eq!(project_onto_span(axis, &v, &b), v);
        let zero = chamber_cone(&RootDatum::preset("A1").unwrap(), &ParabolicType::whole(&a1()), ChamberKind::Sigma);
        assert_eq!(project_onto_span(&zero, &[q(3)], &QuadForm::identity(1)), vec![q(0)]);
    }
}
