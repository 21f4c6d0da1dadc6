// SPDX-License-Identifier: MIT OR Apache-2.0
//! Exact maximization of `ℓ(w) − ½‖w‖²_b` and of `ℓ(w)/‖w‖_b` over a polyhedral cone,
//! for `ℓ` a linear functional plus a nonnegative combination of minima of functionals.
//!
//! The quadratic problem is solved in epigraph form: one auxiliary variable `t_k`
//! per min-block with `t_k ≤ ⟨a_kj, w⟩`. Active sets are enumerated by size and the
//! first one whose KKT system has a feasible, sign-correct solution is the optimum
//! (the problem is strictly concave in `w`, so any KKT point is the maximizer).

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::fans::Cone;
use crate::linalg::{dot, fmt_q, q_to_f64, vadd, vscale, vsub, zeros, Mat, Q, QVec};
use crate::poly::{cone_generators, subsets};
use crate::quadforms::{dagger, QuadForm};
use crate::rootdata::{ParabolicType, RootDatum};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinBlock {
    pub weight: Q,
    pub pieces: Vec<QVec>,
}

/// `ℓ(w) = ⟨c, w⟩ + Σ_k δ_k · min_j ⟨a_kj, w⟩` with every `δ_k ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinearConcave {
    pub linear: QVec,
    pub blocks: Vec<MinBlock>,
}

impl PiecewiseLinearConcave {
    pub fn new(linear: QVec, blocks: Vec<MinBlock>) -> Result<Self> {
        let n = linear.len();
        for b in &blocks {
            if b.weight.is_negative() {
                return Err(Error::Precondition("min-block weights must be nonnegative".into()));
            }
            if b.pieces.is_empty() {
                return Err(Error::Precondition("a min-block needs at least one functional".into()));
            }
            if b.pieces.iter().any(|a| a.len() != n) {
                return Err(Error::Dimension("functional length differs from the linear part".into()));
            }
        }
        Ok(PiecewiseLinearConcave { linear, blocks })
    }

    pub fn linear(c: QVec) -> Self {
        PiecewiseLinearConcave { linear: c, blocks: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn value(&self, w: &[Q]) -> Q {
        let mut v = dot(&self.linear, w);
        for b in &self.blocks {
            if !b.weight.is_zero() {
                v += &b.weight * block_min(b, w);
            }
        }
        v
    }

    pub fn scale(&self, s: &Q) -> Self {
        PiecewiseLinearConcave {
            linear: vscale(&self.linear, s),
            blocks: self.blocks.iter().map(|b| MinBlock { weight: &b.weight * s, pieces: b.pieces.clone() }).collect(),
        }
    }

    pub fn is_linear(&self) -> bool {
        self.blocks.iter().all(|b| b.weight.is_zero() || b.pieces.len() == 1)
    }

    /// The largest squared dual norm `‖a‖²_{b*} = a·b⁻¹·a` over all min-pieces.
    pub fn max_piece_norm2(&self, b: &QuadForm) -> Q {
        let binv = b.matrix.inverse().expect("b is invertible");
        self.blocks.iter().flat_map(|bl| bl.pieces.iter()).map(|a| binv.bilinear(a, a)).fold(Q::zero(), |m, x| m.max(x))
    }
}

fn block_min(b: &MinBlock, w: &[Q]) -> Q {
    b.pieces.iter().map(|a| dot(a, w)).min().expect("blocks are nonempty")
}

/// KKT multipliers: `b·w* = c + Σ π_kj a_kj + Σ ν_i h_i` on `Span(σ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub piece_multipliers: Vec<Vec<Q>>,
    pub halfspace_multipliers: Vec<Q>,
}

#[derive(Clone, Debug)]
pub struct OptResult {
    pub maximizer: QVec,
    /// `ℓ(w*) − ½‖w*‖²_b`.
    pub value: Q,
    pub ell_value: Q,
    pub active_halfspaces: Vec<usize>,
    /// Whether some halfspace of the cone is active at `w*`.
    pub boundary: bool,
    pub certificate: Certificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Con {
    Piece(usize, usize),
    Half(usize),
}

/// Maximizes `ℓ(w) − ½‖w‖²_b` over the cone.
pub fn max_quadratic_on_cone(ell: &PiecewiseLinearConcave, b: &QuadForm, cone: &Cone) -> Result<OptResult> {
    let n = b.dim();
    if ell.dim() != n || cone.ambient_dim() != n {
        return Err(Error::Dimension("ℓ, b and the cone live in different spaces".into()));
    }
    let s = &cone.span_basis;
    let k = s.len();
    let nblocks = ell.blocks.len();
    if k == 0 {
        let maximizer = zeros(n);
        let piece_multipliers = ell.blocks.iter().map(first_piece_multiplier).collect();
        return Ok(OptResult {
            value: Q::zero(),
            ell_value: Q::zero(),
            maximizer,
            active_halfspaces: vec![],
            boundary: false,
            certificate: Certificate { piece_multipliers, halfspace_multipliers: vec![Q::zero(); cone.halfspaces.len()] },
        });
    }
    let smat = Mat::from_cols(s, n);
    let bs = smat.transpose().mul(&b.matrix).mul(&smat);
    if !bs.is_positive_definite() {
        return Err(Error::Precondition("b is degenerate on the span of the cone".into()));
    }
    let reduce = |a: &QVec| smat.vec_mul(a);
    let l0 = reduce(&ell.linear);
    let live: Vec<usize> = (0..nblocks).filter(|&kb| !ell.blocks[kb].weight.is_zero()).collect();
    let nt = live.len();
    let mut cons = Vec::new();
    let mut grads: Vec<QVec> = Vec::new();
    for (ti, &kb) in live.iter().enumerate() {
        for (j, a) in ell.blocks[kb].pieces.iter().enumerate() {
            let mut g = reduce(a);
            g.extend((0..nt).map(|x| if x == ti { -Q::one() } else { Q::zero() }));
            cons.push(Con::Piece(ti, j));
            grads.push(g);
        }
    }
    for (i, h) in cone.halfspaces.iter().enumerate() {
        let mut g = reduce(h);
        if g.iter().all(Zero::is_zero) {
            continue;
        }
        g.extend(std::iter::repeat_n(Q::zero(), nt));
        cons.push(Con::Half(i));
        grads.push(g);
    }
    let m = cons.len();
    let dim = k + nt;
    for size in nt..=dim.min(m) {
        for act in subsets(m, size) {
            let covers = (0..nt).all(|ti| act.iter().any(|&c| matches!(cons[c], Con::Piece(t, _) if t == ti)));
            if !covers {
                continue;
            }
            let rows: Vec<QVec> = act.iter().map(|&c| grads[c].clone()).collect();
            if !rows.is_empty() && Mat::from_rows(&rows).rank() < rows.len() {
                continue;
            }
            let Some(sol) = solve_kkt(&bs, &l0, &live, ell, &cons, &grads, &act, k, nt) else { continue };
            let (y, t, mu) = sol;
            if mu.iter().any(Signed::is_negative) {
                continue;
            }
            let z: QVec = y.iter().chain(t.iter()).cloned().collect();
            let feasible = (0..m).filter(|c| !act.contains(c)).all(|c| !dot(&grads[c], &z).is_negative());
            if !feasible {
                continue;
            }
            let w = smat.mul_vec(&y);
            let mut piece_multipliers: Vec<Vec<Q>> =
                ell.blocks.iter().map(|bl| vec![Q::zero(); bl.pieces.len()]).collect();
            let mut halfspace_multipliers = vec![Q::zero(); cone.halfspaces.len()];
            for (&c, mu_c) in act.iter().zip(&mu) {
                match cons[c] {
                    Con::Piece(ti, j) => piece_multipliers[live[ti]][j] = mu_c.clone(),
                    Con::Half(i) => halfspace_multipliers[i] = mu_c.clone(),
                }
            }
            for (kb, bl) in ell.blocks.iter().enumerate() {
                if bl.weight.is_zero() {
                    piece_multipliers[kb] = vec![Q::zero(); bl.pieces.len()];
                }
            }
            let active_halfspaces: Vec<usize> =
                (0..cone.halfspaces.len()).filter(|&i| dot(&cone.halfspaces[i], &w).is_zero()).collect();
            let ell_value = ell.value(&w);
            let value = &ell_value - b.norm2(&w) / Q::from_integer(2.into());
            return Ok(OptResult {
                boundary: !active_halfspaces.is_empty(),
                maximizer: w,
                value,
                ell_value,
                active_halfspaces,
                certificate: Certificate { piece_multipliers, halfspace_multipliers },
            });
        }
    }
    Err(Error::Precondition("no KKT point found; the cone data are inconsistent".into()))
}

fn first_piece_multiplier(bl: &MinBlock) -> Vec<Q> {
    let mut v = vec![Q::zero(); bl.pieces.len()];
    v[0] = bl.weight.clone();
    v
}

/// Solves the equality-constrained KKT system for one active set.
#[allow(clippy::too_many_arguments)]
fn solve_kkt(
    bs: &Mat,
    l0: &[Q],
    live: &[usize],
    ell: &PiecewiseLinearConcave,
    cons: &[Con],
    grads: &[QVec],
    act: &[usize],
    k: usize,
    nt: usize,
) -> Option<(QVec, QVec, QVec)> {
    let na = act.len();
    let size = k + nt + na;
    let mut a = Mat::zeros(size, size);
    let mut rhs = vec![Q::zero(); size];
    // Stationarity in y: B·y − Σ μ_c g_c|_y = L0.
    for r in 0..k {
        for c in 0..k {
            a[(r, c)] = bs[(r, c)].clone();
        }
        for (ai, &c) in act.iter().enumerate() {
            a[(r, k + nt + ai)] = -grads[c][r].clone();
        }
        rhs[r] = l0[r].clone();
    }
    // Stationarity in t: Σ_{pieces of block} μ_c = δ_k.
    for ti in 0..nt {
        for (ai, &c) in act.iter().enumerate() {
            if matches!(cons[c], Con::Piece(t, _) if t == ti) {
                a[(k + ti, k + nt + ai)] = Q::one();
            }
        }
        rhs[k + ti] = ell.blocks[live[ti]].weight.clone();
    }
    // Active constraints hold with equality.
    for (ai, &c) in act.iter().enumerate() {
        for col in 0..k + nt {
            a[(k + nt + ai, col)] = grads[c][col].clone();
        }
    }
    let z = a.solve(&rhs)?;
    Some((z[..k].to_vec(), z[k..k + nt].to_vec(), z[k + nt..].to_vec()))
}

/// Re-checks a KKT certificate exactly: feasibility, multiplier signs, complementary
/// slackness, and stationarity modulo the annihilator of the span.
pub fn verify_certificate(ell: &PiecewiseLinearConcave, b: &QuadForm, cone: &Cone, opt: &OptResult) -> bool {
    let w = &opt.maximizer;
    let cert = &opt.certificate;
    if !cone.contains(w) {
        return false;
    }
    if cert.piece_multipliers.len() != ell.blocks.len() || cert.halfspace_multipliers.len() != cone.halfspaces.len() {
        return false;
    }
    let mut r = vsub(&ell.linear, &b.matrix.mul_vec(w));
    for (bl, pis) in ell.blocks.iter().zip(&cert.piece_multipliers) {
        if pis.len() != bl.pieces.len() || pis.iter().any(Signed::is_negative) {
            return false;
        }
        if pis.iter().fold(Q::zero(), |s, x| s + x) != bl.weight {
            return false;
        }
        let mn = block_min(bl, w);
        for (a, pi) in bl.pieces.iter().zip(pis) {
            if !pi.is_zero() && dot(a, w) != mn {
                return false;
            }
            r = vadd(&r, &vscale(a, pi));
        }
    }
    for (h, nu) in cone.halfspaces.iter().zip(&cert.halfspace_multipliers) {
        if nu.is_negative() || (!nu.is_zero() && !dot(h, w).is_zero()) {
            return false;
        }
        r = vadd(&r, &vscale(h, nu));
    }
    cone.span_basis.iter().all(|s| dot(&r, s).is_zero()) && opt.value == ell.value(w) - b.norm2(w) / Q::from_integer(2.into())
}

#[derive(Clone, Debug)]
pub struct RatioResult {
    /// Whether `ℓ > 0` somewhere on the cone.
    pub positive: bool,
    /// `μ_max²`; zero when not positive.
    pub mu2: Q,
    /// The quadratic maximizer `w*`; `w*/‖w*‖_b` is the normalized maximizer and `‖w*‖_b = μ_max`.
    pub maximizer: QVec,
    pub quadratic: OptResult,
}

impl RatioResult {
    pub fn mu_f64(&self) -> f64 {
        q_to_f64(&self.mu2).sqrt()
    }
}

/// Maximizes `ℓ(w)/‖w‖_b`. By homogeneity the quadratic maximizer has norm `μ_max`,
/// and `w* = 0` certifies `ℓ ≤ 0` on the cone.
pub fn max_ratio_on_cone(ell: &PiecewiseLinearConcave, b: &QuadForm, cone: &Cone) -> Result<RatioResult> {
    let opt = max_quadratic_on_cone(ell, b, cone)?;
    let mu2 = b.norm2(&opt.maximizer);
    Ok(RatioResult { positive: !mu2.is_zero(), mu2, maximizer: opt.maximizer.clone(), quadratic: opt })
}

/// The cones of linearity of `ℓ` inside `cone`, one per choice of minimizing piece
/// per block, as `(rays, lineality)` pairs.
pub fn linearity_cones(ell: &PiecewiseLinearConcave, cone: &Cone) -> Vec<(Vec<QVec>, Vec<QVec>)> {
    let live: Vec<&MinBlock> = ell.blocks.iter().filter(|bl| !bl.weight.is_zero()).collect();
    let mut choices: Vec<Vec<usize>> = vec![vec![]];
    for bl in &live {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                (0..bl.pieces.len()).map(move |j| {
                    let mut c = c.clone();
                    c.push(j);
                    c
                })
            })
            .collect();
    }
    let n = cone.ambient_dim();
    choices
        .into_iter()
        .map(|sel| {
            let mut ineqs = cone.halfspaces.clone();
            for (bl, &j) in live.iter().zip(&sel) {
                for a in &bl.pieces {
                    ineqs.push(vsub(a, &bl.pieces[j]));
                }
            }
            cone_generators(&cone.equations, &ineqs, n)
        })
        .collect()
}

/// `ℓ ≤ 0` on every generator of every linearity cone, which certifies `μ ≤ 0` on the cone.
pub fn nonpositive_on_linearity_cones(ell: &PiecewiseLinearConcave, cone: &Cone) -> bool {
    linearity_cones(ell, cone).iter().all(|(rays, lin)| {
        rays.iter().all(|r| !ell.value(r).is_positive())
            && lin.iter().all(|l| !ell.value(l).is_positive() && !ell.value(&crate::linalg::vneg(l)).is_positive())
    })
}

/// One cone of a degeneration-fan model together with its functional.
#[derive(Clone, Debug)]
pub struct ConeProblem {
    pub id: usize,
    pub cone: Cone,
    pub ell: PiecewiseLinearConcave,
}

#[derive(Clone, Debug)]
pub struct FanOptimum {
    pub cone_id: usize,
    pub result: RatioResult,
}

/// The best normalized value over a union of cones; ties go to the smallest cone id.
pub fn hn_over_fan(problems: &[ConeProblem], b: &QuadForm) -> Result<FanOptimum> {
    if problems.is_empty() {
        return Err(Error::Precondition("hn_over_fan needs at least one cone".into()));
    }
    let results = crate::par::try_map(problems, |p| max_ratio_on_cone(&p.ell, b, &p.cone).map(|r| (p.id, r)))?;
    let best = results
        .into_iter()
        .min_by(|(ia, ra), (ib, rb)| rb.mu2.cmp(&ra.mu2).then(ia.cmp(ib)))
        .expect("nonempty");
    Ok(FanOptimum { cone_id: best.0, result: best.1 })
}

#[derive(Clone, Debug, Serialize)]
pub struct MovementReport {
    /// `‖w*_δ − w*_γ‖²_b / |δ − γ|₁²`, absent when `δ = γ` (ratio 0).
    pub ratio2: Option<String>,
    /// `c²` with `c` the largest dual norm of a min-piece.
    pub bound2: String,
    pub holds: bool,
}

/// Measures how far the quadratic maximizer moves between two weightings of the same blocks.
pub fn movement_bound_check(
    ell: &PiecewiseLinearConcave,
    b: &QuadForm,
    cone: &Cone,
    delta: &[Q],
    gamma: &[Q],
) -> Result<MovementReport> {
    if delta.len() != ell.blocks.len() || gamma.len() != ell.blocks.len() {
        return Err(Error::Dimension("one weight per min-block is required".into()));
    }
    let with = |ws: &[Q]| -> Result<PiecewiseLinearConcave> {
        PiecewiseLinearConcave::new(
            ell.linear.clone(),
            ell.blocks.iter().zip(ws).map(|(bl, w)| MinBlock { weight: w.clone(), pieces: bl.pieces.clone() }).collect(),
        )
    };
    let wd = max_quadratic_on_cone(&with(delta)?, b, cone)?.maximizer;
    let wg = max_quadratic_on_cone(&with(gamma)?, b, cone)?.maximizer;
    let l1 = delta.iter().zip(gamma).fold(Q::zero(), |s, (x, y)| s + (x - y).abs());
    let moved2 = b.norm2(&vsub(&wd, &wg));
    let c2 = ell.max_piece_norm2(b);
    let holds = moved2 <= &c2 * &l1 * &l1;
    let ratio2 = if l1.is_zero() { None } else { Some(fmt_q(&(&moved2 / (&l1 * &l1)))) };
    Ok(MovementReport { ratio2, bound2: fmt_q(&c2), holds })
}

/// `c₁²`: the largest squared `b`-operator norm of a simple root.
pub fn simple_root_norm2(d: &RootDatum, b: &QuadForm) -> Q {
    d.simple_roots.iter().map(|a| dot(a, &dagger(a, b))).fold(Q::zero(), |m, x| m.max(x))
}

/// For `w₁ ∈ h·ρ_P^∨ + σ̄_P`, checks `w₂ ∈ (h − c₁‖w₂ − w₁‖_b)·ρ_P^∨ + σ̄_P` exactly.
/// Membership in `t·ρ_P^∨ + σ̄_P` within the span means `α_i(w) ≥ t` for `i ∈ I_P`.
pub fn distance_to_cone_check(
    d: &RootDatum,
    ip: &ParabolicType,
    b: &QuadForm,
    h: &Q,
    w1: &[Q],
    w2: &[Q],
) -> Result<bool> {
    if ip.index_set.iter().any(|&i| dot(&d.simple_roots[i], w1) < *h) {
        return Err(Error::Precondition("w₁ is not in h·ρ_P^∨ + σ̄_P".into()));
    }
    let k2 = simple_root_norm2(d, b) * b.norm2(&vsub(w2, w1));
    Ok(ip.index_set.iter().all(|&i| {
        // α_i(w₂) ≥ h − √k2  ⇔  h − α_i(w₂) ≤ √k2.
        let gap = h - dot(&d.simple_roots[i], w2);
        !gap.is_positive() || &gap * &gap <= k2
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fans::{build_sigma_x, chamber_cone, ChamberKind};
    use crate::linalg::{q, qf, qvec};
    use crate::quadforms::WeightedRep;

    fn full(n: usize) -> Cone {
        build_sigma_x(&RootDatum::torus(n), &WeightedRep::empty()).cones.remove(0)
    }

    fn quadrant() -> Cone {
        let f = build_sigma_x(&RootDatum::torus(2), &WeightedRep::from_i64(&[(vec![1, 0], 1), (vec![0, 1], 1)]));
        f.cones.into_iter().find(|c| c.dim == 2 && c.contains(&qvec(&[1, 1]))).unwrap()
    }

    #[test]
    fn linear_on_full_space() {
        let ell = PiecewiseLinearConcave::linear(qvec(&[3, -2]));
        let b = QuadForm::identity(2);
        let r = max_quadratic_on_cone(&ell, &b, &full(2)).unwrap();
        assert_eq!(r.maximizer, qvec(&[3, -2]));
        assert!(!r.boundary);
        assert!(verify_certificate(&ell, &b, &full(2), &r));
    }

    #[test]
    fn boundary_clamp() {
        let d = RootDatum::preset("A1").unwrap();
        let cone = chamber_cone(&d, &ParabolicType::borel(&d), ChamberKind::Sigma);
        let b = QuadForm::identity(1);
        let ell = PiecewiseLinearConcave::linear(vec![q(-3)]);
        let r = max_quadratic_on_cone(&ell, &b, &cone).unwrap();
        assert_eq!(r.maximizer, vec![q(0)]);
        assert_eq!(r.value, q(0));
        assert!(verify_certificate(&ell, &b, &cone, &r));
    }

    #[test]
    fn min_of_coordinates_on_quadrant() {
        let ell = PiecewiseLinearConcave::new(zeros(2), vec![MinBlock { weight: q(1), pieces: vec![qvec(&[1, 0]), qvec(&[0, 1])] }])
            .unwrap();
        let b = QuadForm::identity(2);
        let c = quadrant();
        let r = max_quadratic_on_cone(&ell, &b, &c).unwrap();
        assert_eq!(r.maximizer, vec![qf(1, 2), qf(1, 2)]);
        assert!(verify_certificate(&ell, &b, &c, &r));
        let rr = max_ratio_on_cone(&ell, &b, &c).unwrap();
        assert_eq!(rr.mu2, qf(1, 2));
    }

    #[test]
    fn nonpositive_flag() {
        let ell = PiecewiseLinearConcave::linear(qvec(&[-1, -1]));
        let c = quadrant();
        let r = max_ratio_on_cone(&ell, &QuadForm::identity(2), &c).unwrap();
        assert!(!r.positive);
        assert!(nonpositive_on_linearity_cones(&ell, &c));
    }

    #[test]
    fn fan_picks_positive_ray() {
        let f = build_sigma_x(&RootDatum::torus(1), &WeightedRep::from_i64(&[(vec![1], 1)]));
        let b = QuadForm::identity(1);
        let problems: Vec<ConeProblem> = f
            .cones
            .iter()
            .filter(|c| c.dim == 1)
            .map(|c| ConeProblem { id: c.id, cone: c.clone(), ell: PiecewiseLinearConcave::linear(vec![q(1)]) })
            .collect();
        let best = hn_over_fan(&problems, &b).unwrap();
        assert!(best.result.positive);
        assert_eq!(best.result.maximizer, vec![q(1)]);
    }

    #[test]
    fn movement_on_a_line() {
        let ell = PiecewiseLinearConcave::new(vec![q(0)], vec![MinBlock { weight: q(0), pieces: vec![vec![q(-1)]] }]).unwrap();
        let b = QuadForm::identity(1);
        let r = movement_bound_check(&ell, &b, &full(1), &[q(0)], &[q(1)]).unwrap();
        assert_eq!(r.ratio2.as_deref(), Some("1"));
        assert!(r.holds);
        let same = movement_bound_check(&ell, &b, &full(1), &[q(1)], &[q(1)]).unwrap();
        assert!(same.ratio2.is_none());
    }

    #[test]
    fn distance_to_cone_a1() {
        let d = RootDatum::preset("A1").unwrap();
        let ip = ParabolicType::borel(&d);
        let b = QuadForm::identity(1);
        assert!(distance_to_cone_check(&d, &ip, &b, &q(1), &[q(1)], &[q(-3)]).unwrap());
    }
}
