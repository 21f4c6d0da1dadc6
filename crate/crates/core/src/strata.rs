// SPDX-License-Identifier: MIT OR Apache-2.0
//! χ-active indexing data `(d, λ)` of the Θ-stratification, shifted characters of
//! stratum centers, and the degree constraints on semistable loci.
//!
//! All comparisons of numerical invariants are on exact squares. A datum is a
//! candidate label for a stratum; nothing here decides nonemptiness.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::fans::{build_sigma_x, minimal_cone_containing, project_onto_span, Fan};
use crate::lattice::integer_kernel;
use crate::linalg::{dot, fmt_q, is_zero_vec, q, vadd, vneg, vscale, vsub, Mat, Q, QVec};
use crate::quadforms::{b_projector, dagger, flat, phi_of, pseudoinverse, Interval, QuadForm, SelfMap, WeightedRep};
use crate::rootdata::RootDatum;
use crate::{Error, Result};

pub use crate::rootdata::coxeter_h;

/// Everything fixed while enumerating strata: `G`, `X`, `V`, `b`, `χ` and derived maps.
#[derive(Clone, Debug)]
pub struct StrataContext {
    pub datum: RootDatum,
    pub x: WeightedRep,
    pub v: WeightedRep,
    pub b: QuadForm,
    pub chi: QVec,
    pub fan: Fan,
    pub v_form: QuadForm,
    pub phi: SelfMap,
    pub phi_plus: SelfMap,
    pub chi_dagger: QVec,
    pub coxeter: u64,
}

impl StrataContext {
    pub fn new(datum: RootDatum, x: WeightedRep, v: WeightedRep, b: QuadForm, chi: QVec) -> Result<Self> {
        let n = datum.rank;
        if b.dim() != n || chi.len() != n {
            return Err(Error::Dimension(format!("b and χ must live on a rank-{n} lattice")));
        }
        for (w, _) in x.entries().iter().chain(v.entries()) {
            if w.len() != n {
                return Err(Error::Dimension(format!("weights must have length {n}")));
            }
        }
        if !b.is_positive_definite() {
            return Err(Error::Precondition("the norm b must be positive definite".into()));
        }
        if !b.is_weyl_invariant(&datum) {
            return Err(Error::Precondition("the norm b must be Weyl-invariant".into()));
        }
        if !v.is_weyl_stable(&datum) || !x.is_weyl_stable(&datum) {
            return Err(Error::Precondition("weights of V and X must be Weyl-stable".into()));
        }
        if !datum.is_invariant_character(&chi) {
            return Err(Error::Precondition("χ must be Weyl-invariant".into()));
        }
        let v_form = v.ch2_form(n);
        let phi = phi_of(&v_form, &b)?;
        let phi_plus = pseudoinverse(&phi, &b)?;
        let chi_dagger = dagger(&chi, &b);
        let fan = build_sigma_x(&datum, &x);
        let coxeter = coxeter_h(&datum);
        Ok(StrataContext { datum, x, v, b, chi, fan, v_form, phi, phi_plus, chi_dagger, coxeter })
    }

    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    /// `‖d‖²_V`.
    pub fn v_norm2(&self, d: &[Q]) -> Q {
        self.v_form.norm2(d)
    }

    /// `φ_V(d) + χ†`.
    pub fn target(&self, d: &[Q]) -> QVec {
        vadd(&self.phi.apply(d), &self.chi_dagger)
    }

    fn in_image(&self, w: &[Q]) -> bool {
        // Im φ is the b-orthogonal complement of ker φ.
        self.phi.kernel_basis().iter().all(|k| self.b.pair(k, w).is_zero())
    }

    /// Right-hand side of condition (3) for `λ`: `None` when `χ† − λ ∉ Im φ_V`.
    pub fn degree_bound2(&self, lambda: &[Q]) -> Option<Q> {
        let r = vsub(&self.chi_dagger, lambda);
        if !self.in_image(&r) {
            return None;
        }
        Some(self.b.pair(&r, &self.phi_plus.apply(&r)))
    }
}

/// Which clause of the definition a pair fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    Integrality,
    NotDominant,
    NotProjection,
    DegreeBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexingDatum {
    pub d: QVec,
    pub lambda: QVec,
    /// `μ(ν)² = ‖λ‖²_b`.
    pub mu2: Q,
    pub cone_id: usize,
    /// Simple roots orthogonal to `λ`: the simple roots of `L_λ`.
    pub levi_simple: Vec<usize>,
    /// Weights of `X^{λ=0}`.
    pub fixed_weights: WeightedRep,
}

/// Roots (all of them, both signs) that pair to zero with `λ`.
fn orthogonal_coroots(d: &RootDatum, lambda: &[Q]) -> Vec<QVec> {
    d.positive_roots.iter().filter(|(a, _)| dot(a, lambda).is_zero()).map(|(_, c)| c.clone()).collect()
}

/// Condition (1): `⟨d, ψ⟩ ∈ ℤ` for a lattice basis of the characters of `P_λ`.
pub fn integrality_holds(datum: &RootDatum, d: &[Q], lambda: &[Q]) -> bool {
    let coroots = orthogonal_coroots(datum, lambda);
    let chars = if coroots.is_empty() {
        (0..datum.rank).map(|i| crate::linalg::unit(datum.rank, i)).collect()
    } else {
        integer_kernel(&Mat::from_rows(&coroots))
    };
    chars.iter().all(|psi| dot(d, psi).is_integer())
}

/// Tests the three conditions; returns the first failing one.
pub fn is_chi_active(ctx: &StrataContext, d: &[Q], lambda: &[Q]) -> (bool, Option<Violation>) {
    if !integrality_holds(&ctx.datum, d, lambda) {
        return (false, Some(Violation::Integrality));
    }
    if !ctx.datum.is_dominant(lambda) {
        return (false, Some(Violation::NotDominant));
    }
    let cone = minimal_cone_containing(&ctx.fan, lambda).expect("dominant points lie on the fan");
    if project_onto_span(cone, &ctx.target(d), &ctx.b) != lambda {
        return (false, Some(Violation::NotProjection));
    }
    let ok = match ctx.degree_bound2(lambda) {
        None => ctx.v_norm2(d).is_zero(),
        Some(r2) => ctx.v_norm2(d) <= r2,
    };
    if ok {
        (true, None)
    } else {
        (false, Some(Violation::DegreeBound))
    }
}

fn make_datum(ctx: &StrataContext, d: QVec, lambda: QVec, cone_id: usize) -> IndexingDatum {
    let levi_simple = (0..ctx.datum.semisimple_rank())
        .filter(|&i| dot(&ctx.datum.simple_roots[i], &lambda).is_zero())
        .collect();
    let fixed_weights = ctx.x.filter(|w| dot(w, &lambda).is_zero());
    let mu2 = ctx.b.norm2(&lambda);
    IndexingDatum { d, lambda, mu2, cone_id, levi_simple, fixed_weights }
}

/// All `λ` making `(d, λ)` χ-active, one candidate per fan cone.
pub fn active_lambdas(ctx: &StrataContext, d: &[Q]) -> Vec<IndexingDatum> {
    let target = ctx.target(d);
    let vn = ctx.v_norm2(d);
    let mut out = Vec::new();
    for cone in &ctx.fan.cones {
        let lambda = project_onto_span(cone, &target, &ctx.b);
        if !cone.in_relative_interior(&lambda) {
            continue;
        }
        let bound_ok = match ctx.degree_bound2(&lambda) {
            None => vn.is_zero(),
            Some(r2) => vn <= r2,
        };
        if bound_ok && integrality_holds(&ctx.datum, d, &lambda) {
            out.push(make_datum(ctx, d.to_vec(), lambda, cone.id));
        }
    }
    out
}

/// Certified `R²` with `‖d‖_V ≤ R` for every active datum of invariant at most `γ`:
/// `‖d‖²_V ≤ ‖φ⁺‖·‖χ† − λ‖²_b ≤ ‖φ⁺‖·2(‖χ†‖²_b + γ²)`.
pub fn scan_radius2(ctx: &StrataContext, gamma2: &Q) -> Q {
    let op = ctx.phi_plus.operator_norm().hi;
    op * q(2) * (ctx.b.norm2(&ctx.chi_dagger) + gamma2)
}

const MAX_SCAN_POINTS: u128 = 20_000_000;

/// Points of `(1/H)·N` with kernel part `d_ker`, optional central part, and `‖x‖²_V ≤ r2`.
pub fn lattice_ball(ctx: &StrataContext, d_ker: &[Q], central: Option<&[Q]>, r2: &Q) -> Result<Vec<QVec>> {
    let n = ctx.rank();
    let ker = ctx.phi.kernel_basis();
    let p_ker = b_projector(&ker, &ctx.b);
    if !is_zero_vec(&ctx.phi.apply(d_ker)) || p_ker.mul_vec(d_ker) != d_ker {
        return Err(Error::Unbounded("the kernel part must lie in ker φ_V".into()));
    }
    let p_cen = b_projector(&ctx.datum.center_basis, &ctx.b);
    if let Some(c) = central {
        if c.len() != n || p_cen.mul_vec(c) != c {
            return Err(Error::Precondition("the central part must lie in N^W".into()));
        }
    }
    // ‖u‖²_V + ‖P_ker u‖²_b is definite; its inverse diagonal bounds each coordinate.
    let g = ctx.v_form.matrix.add(&p_ker.transpose().mul(&ctx.b.matrix).mul(&p_ker));
    let ginv = g.inverse().ok_or_else(|| Error::Singular("degenerate scan form".into()))?;
    let h = Q::from_integer(ctx.coxeter.into());
    let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(n);
    let mut count: u128 = 1;
    for i in 0..n {
        let half = Interval::sqrt_of(&(r2 * &ginv[(i, i)])).hi;
        let lo = ((&d_ker[i] - &half) * &h).ceil().to_integer();
        let hi = ((&d_ker[i] + &half) * &h).floor().to_integer();
        let lo: i64 = lo.try_into().map_err(|_| Error::Unbounded("scan box too large".into()))?;
        let hi: i64 = hi.try_into().map_err(|_| Error::Unbounded("scan box too large".into()))?;
        count = count.saturating_mul((hi - lo + 1).max(0) as u128);
        ranges.push((lo, hi));
    }
    if count > MAX_SCAN_POINTS {
        return Err(Error::Unbounded(format!("scan box has {count} points")));
    }
    let mut out = Vec::new();
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return Ok(out);
    }
    loop {
        let x: QVec = cur.iter().map(|&k| Q::new(k.into(), h.to_integer())).collect();
        let central_ok = central.is_none_or(|c| p_cen.mul_vec(&x) == c);
        if central_ok && p_ker.mul_vec(&x) == d_ker && ctx.v_norm2(&x) <= *r2 {
            out.push(x);
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            cur[i] += 1;
            if cur[i] <= ranges[i].1 {
                break;
            }
            cur[i] = ranges[i].0;
            i += 1;
        }
    }
}

/// Complete list of χ-active data with `μ² ≤ γ²`, given kernel part and (optionally) central part,
/// sorted by `μ` descending, then `d`, then `λ`.
pub fn enumerate_chi_active(
    ctx: &StrataContext,
    d_ker: &[Q],
    gamma2: &Q,
    central: Option<&[Q]>,
) -> Result<Vec<IndexingDatum>> {
    if gamma2.is_negative() {
        return Err(Error::Precondition("γ must be nonnegative".into()));
    }
    let r2 = scan_radius2(ctx, gamma2);
    let points = lattice_ball(ctx, d_ker, central, &r2)?;
    let per_point = crate::par::map(&points, |d| active_lambdas(ctx, d));
    let mut out: Vec<IndexingDatum> = per_point.into_iter().flatten().filter(|nu| nu.mu2 <= *gamma2).collect();
    out.sort_by(|a, b| b.mu2.cmp(&a.mu2).then_with(|| a.d.cmp(&b.d)).then_with(|| a.lambda.cmp(&b.lambda)));
    Ok(out)
}

/// `χ′_{λ,d} = χ − μ(f_canon)·(λ̂, −)_b`, rational because the scalar is `((λ,d)_V + ⟨λ,χ⟩)/‖λ‖²_b`.
pub fn shifted_character(ctx: &StrataContext, lambda: &[Q], d: &[Q]) -> Result<QVec> {
    if is_zero_vec(lambda) {
        return Err(Error::Precondition("the shifted character needs λ ≠ 0".into()));
    }
    let coeff = canonical_numerator(ctx, lambda, d) / ctx.b.norm2(lambda);
    Ok(vsub(&ctx.chi, &vscale(&flat(lambda, &ctx.b), &coeff)))
}

/// `(λ, d)_V + ⟨λ, χ⟩`, the numerator of `μ(f_canon)`.
pub fn canonical_numerator(ctx: &StrataContext, lambda: &[Q], d: &[Q]) -> Q {
    ctx.v_form.pair(lambda, d) + dot(lambda, &ctx.chi)
}

/// `(λ′,d′)_V + ⟨λ′,χ⟩ − μ(f_canon)·(λ̂, λ′)_b`; positive means `λ′` destabilizes the graded point.
pub fn graded_ss_violation(ctx: &StrataContext, lambda_p: &[Q], d_p: &[Q], lambda: &[Q], d: &[Q]) -> Result<Q> {
    if is_zero_vec(lambda) {
        return Err(Error::Precondition("the graded context needs λ ≠ 0".into()));
    }
    let shift = canonical_numerator(ctx, lambda, d) * ctx.b.pair(lambda, lambda_p) / ctx.b.norm2(lambda);
    Ok(canonical_numerator(ctx, lambda_p, d_p) - shift)
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumReport {
    pub d: Vec<String>,
    pub lambda: Vec<String>,
    pub mu2: String,
    pub mu: f64,
    pub cone_id: usize,
    pub shifted_character: Vec<String>,
    pub levi_simple_roots: Vec<usize>,
    pub levi_rank: usize,
    pub fixed_weights: Vec<(Vec<String>, i64)>,
    /// `(λ,d)_V + ⟨λ,χ⟩ = ‖λ‖²_b`, i.e. `μ(f_canon) = μ(ν)`.
    pub canonical_weight_matches: bool,
    pub shifted_character_invariant: bool,
    pub label: &'static str,
}

pub fn stratum_report(ctx: &StrataContext, nu: &IndexingDatum) -> Result<StratumReport> {
    let v = |x: &[Q]| x.iter().map(fmt_q).collect::<Vec<_>>();
    let (chi_p, matches) = if is_zero_vec(&nu.lambda) {
        (ctx.chi.clone(), true)
    } else {
        (shifted_character(ctx, &nu.lambda, &nu.d)?, canonical_numerator(ctx, &nu.lambda, &nu.d) == nu.mu2)
    };
    let invariant = nu.levi_simple.iter().all(|&i| dot(&ctx.datum.simple_coroots[i], &chi_p).is_zero());
    Ok(StratumReport {
        d: v(&nu.d),
        lambda: v(&nu.lambda),
        mu2: fmt_q(&nu.mu2),
        mu: crate::linalg::q_to_f64(&nu.mu2).sqrt(),
        cone_id: nu.cone_id,
        shifted_character: v(&chi_p),
        levi_simple_roots: nu.levi_simple.clone(),
        levi_rank: ctx.datum.rank,
        fixed_weights: nu.fixed_weights.render(),
        canonical_weight_matches: matches,
        shifted_character_invariant: invariant,
        label: "candidate",
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SsVerdict {
    MaybeNonempty,
    /// `ker‖·‖_V ⊆ ker χ` and `‖d‖_V > ‖χ‖_V`.
    EmptyKernelInChi,
    /// `ker‖·‖_V ⊄ ker χ` and `‖d‖_V > 0`.
    EmptyKernelNotInChi,
}

/// Both quantities are intrinsic to `V` and `χ`, so the given `b` may be used as is.
pub fn semistable_empty_bound(ctx: &StrataContext, d: &[Q]) -> SsVerdict {
    let kernel_in_chi = ctx.phi.kernel_basis().iter().all(|k| dot(k, &ctx.chi).is_zero());
    let dn = ctx.v_norm2(d);
    if kernel_in_chi {
        let chi_n = ctx.b.pair(&ctx.chi_dagger, &ctx.phi_plus.apply(&ctx.chi_dagger));
        if dn > chi_n {
            return SsVerdict::EmptyKernelInChi;
        }
    } else if dn.is_positive() {
        return SsVerdict::EmptyKernelNotInChi;
    }
    SsVerdict::MaybeNonempty
}

/// A maximally destabilizing direction: `λ = proj_{Span σ}(−ψ†)` in the relative interior of `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Destabilizer {
    pub lambda: QVec,
    pub norm2: Q,
    pub cone_id: usize,
}

#[derive(Clone, Debug)]
pub struct Destabilizers {
    pub list: Vec<Destabilizer>,
    /// `m_ψ² = min ‖λ‖²_b / ‖ψ†‖²_b`, since `−(λ̂, ψ̂†)_b = ‖λ‖_b/‖ψ†‖_b` for a projection.
    pub m2: Option<Q>,
}

/// Candidate maximal destabilizers for `O(ψ)`: directions with `⟨λ, ψ⟩ < 0`.
pub fn git_max_destabilizers(datum: &RootDatum, x: &WeightedRep, psi: &[Q], b: &QuadForm) -> Result<Destabilizers> {
    if is_zero_vec(psi) {
        return Err(Error::Precondition("ψ must be nonzero".into()));
    }
    let fan = build_sigma_x(datum, x);
    let target = vneg(&dagger(psi, b));
    let psi2 = b.norm2(&target);
    let mut list = Vec::new();
    for cone in &fan.cones {
        let lambda = project_onto_span(cone, &target, b);
        if is_zero_vec(&lambda) || !cone.in_relative_interior(&lambda) || !dot(&lambda, psi).is_negative() {
            continue;
        }
        let norm2 = b.norm2(&lambda);
        list.push(Destabilizer { lambda, norm2, cone_id: cone.id });
    }
    let m2 = list.iter().map(|l| &l.norm2 / &psi2).min();
    Ok(Destabilizers { list, m2 })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub threshold: Interval,
    pub m2: String,
    /// Whether `‖χ‖_b` exceeds the threshold; absent when the enclosure straddles it.
    pub chi_exceeds: Option<bool>,
    /// `⟨d, χ⟩`, which must be `≤ 0` for a semistable map once `chi_exceeds` holds.
    pub degree_pairing: String,
    pub constraint_holds: Option<bool>,
}

/// Enclosure of `‖(1−φ_V)(d)‖_b/m_χ + ‖d‖_b/m_χ²`.
pub fn generic_ss_threshold(ctx: &StrataContext, d: &[Q]) -> Result<ThresholdReport> {
    let des = git_max_destabilizers(&ctx.datum, &ctx.x, &ctx.chi, &ctx.b)?;
    let m2 = des
        .m2
        .ok_or_else(|| Error::Precondition("no destabilizing direction found although χ ≠ 0".into()))?;
    let rest = vsub(d, &ctx.phi.apply(d));
    let first = Interval::sqrt_of(&(ctx.b.norm2(&rest) / &m2));
    let second = Interval::sqrt_of(&ctx.b.norm2(d));
    let second = Interval { lo: &second.lo / &m2, hi: &second.hi / &m2 };
    let threshold = first.add(&second);
    let chi_norm = Interval::sqrt_of(&ctx.b.norm2(&ctx.chi_dagger));
    let chi_exceeds = if chi_norm.lo > threshold.hi {
        Some(true)
    } else if chi_norm.hi <= threshold.lo {
        Some(false)
    } else {
        None
    };
    let pairing = dot(d, &ctx.chi);
    let constraint_holds = (chi_exceeds == Some(true)).then(|| !pairing.is_positive());
    Ok(ThresholdReport { threshold, m2: fmt_q(&m2), chi_exceeds, degree_pairing: fmt_q(&pairing), constraint_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{qf, qvec};

    fn vortex(c: i64) -> StrataContext {
        let d = RootDatum::preset("GL1").unwrap();
        let x = WeightedRep::from_i64(&[(vec![1], 1)]);
        StrataContext::new(d, x.clone(), x, QuadForm::identity(1), qvec(&[-c])).unwrap()
    }

    #[test]
    fn coxeter_numbers() {
        assert_eq!(coxeter_h(&RootDatum::preset("GL1").unwrap()), 1);
        assert_eq!(coxeter_h(&RootDatum::preset("A1").unwrap()), 2);
        assert_eq!(coxeter_h(&RootDatum::preset("A2").unwrap()), 6);
    }

    #[test]
    fn vortex_activity() {
        let ctx = vortex(3);
        assert_eq!(is_chi_active(&ctx, &qvec(&[1]), &qvec(&[-2])), (true, None));
        assert_eq!(is_chi_active(&ctx, &qvec(&[1]), &qvec(&[0])), (true, None));
        assert_eq!(is_chi_active(&ctx, &qvec(&[5]), &qvec(&[0])), (false, Some(Violation::DegreeBound)));
        assert_eq!(is_chi_active(&ctx, &qvec(&[1]), &qvec(&[-1])), (false, Some(Violation::NotProjection)));
        assert_eq!(is_chi_active(&ctx, &[qf(1, 2)], &qvec(&[0])), (false, Some(Violation::Integrality)));
    }

    #[test]
    fn vortex_enumeration_for_fixed_degree() {
        let ctx = vortex(3);
        let got = enumerate_chi_active(&ctx, &qvec(&[0]), &q(400), Some(&qvec(&[1]))).unwrap();
        let lambdas: Vec<QVec> = got.iter().map(|nu| nu.lambda.clone()).collect();
        assert_eq!(lambdas, vec![qvec(&[-2]), qvec(&[0])]);
    }

    #[test]
    fn shifted_character_example() {
        let ctx = vortex(3);
        assert_eq!(shifted_character(&ctx, &qvec(&[-2]), &qvec(&[1])).unwrap(), qvec(&[-1]));
        assert_eq!(graded_ss_violation(&ctx, &qvec(&[-2]), &qvec(&[1]), &qvec(&[-2]), &qvec(&[1])).unwrap(), q(0));
    }

    #[test]
    fn empty_bound_examples() {
        let ctx = vortex(3);
        assert_eq!(semistable_empty_bound(&ctx, &qvec(&[0])), SsVerdict::MaybeNonempty);
        assert_eq!(semistable_empty_bound(&ctx, &qvec(&[-5])), SsVerdict::EmptyKernelInChi);
        let zero = vortex(0);
        assert_eq!(semistable_empty_bound(&zero, &qvec(&[1])), SsVerdict::EmptyKernelInChi);
    }

    #[test]
    fn destabilizers_gl1() {
        let d = RootDatum::preset("GL1").unwrap();
        let b = QuadForm::identity(1);
        for x in [WeightedRep::from_i64(&[(vec![1], 1)]), WeightedRep::from_i64(&[(vec![1], 1), (vec![-1], 1)])] {
            let r = git_max_destabilizers(&d, &x, &qvec(&[1]), &b).unwrap();
            assert_eq!(r.list.len(), 1);
            assert_eq!(r.list[0].lambda, qvec(&[-1]));
            assert_eq!(r.m2, Some(q(1)));
        }
    }

    #[test]
    fn threshold_examples() {
        let ctx = vortex(3);
        assert_eq!(generic_ss_threshold(&ctx, &qvec(&[0])).unwrap().threshold, Interval::exact(q(0)));
        let t = generic_ss_threshold(&ctx, &qvec(&[2])).unwrap();
        assert_eq!(t.threshold, Interval::exact(q(2)));
        assert_eq!(t.chi_exceeds, Some(true));
    }

    #[test]
    fn sl2_strata_without_x() {
        let d = RootDatum::preset("A1").unwrap();
        let v = WeightedRep::adjoint(&d);
        let b = v.ch2_form(1);
        let ctx = StrataContext::new(d, WeightedRep::empty(), v, b, qvec(&[0])).unwrap();
        let got = enumerate_chi_active(&ctx, &qvec(&[0]), &q(25), None).unwrap();
        assert!(got.iter().all(|nu| nu.lambda == ctx.phi.apply(&nu.d)));
        assert!(got.iter().any(|nu| nu.d == qvec(&[0])));
    }
}
