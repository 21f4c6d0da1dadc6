// SPDX-License-Identifier: MIT OR Apache-2.0
//! Recursive evaluation of χ-semistable indices by non-abelian localization:
//! `I_d^χ = I_d − Σ I_{d′}^{χ′}(X^{λ=0}/L_λ, F ⊗ 𝔼_λ)` over the unpruned
//! χ-active strata `(d′, λ)` with central part `d`.
//!
//! The class `𝔼_λ` enters the Levi-stage index through `Sym` factors graded by
//! an auxiliary variable `q` (one power per factor), a shift of the level by
//! `−ch₂(𝐓⁻)`, a pointwise character `(1−g)·det 𝐓⁻`, a sign `(−1)^{rank}` and a
//! shift of the `t`-grading by the `X`-part of that rank. Extraction at the
//! degree `d′` selects the λ-weight zero slice because `λ` is central in `L_λ`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::linalg::{dot, fmt_q, is_zero_vec, q, vadd, vscale, Mat, Q, QVec};
use crate::poly::primitive;
use crate::quadforms::{b_projector, c_xv, WeightedRep};
use crate::series::Trunc;
use crate::strata::{
    active_lambdas, canonical_numerator, enumerate_chi_active, shifted_character, IndexingDatum, StrataContext,
};
use crate::twindex::{full_index_problem, LevelData, LogTerm, Orientation};
use crate::{Error, Result};

/// Graded integer: `t`-degree (after the `τ` shift) to coefficient.
pub type Graded = BTreeMap<i64, i64>;

fn sub_graded(a: &Graded, b: &Graded) -> Graded {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(*k).or_insert(0) -= v;
    }
    out.retain(|_, v| *v != 0);
    out
}

fn render_graded(g: &Graded) -> Vec<(i64, i64)> {
    g.iter().map(|(k, v)| (*k, *v)).collect()
}

fn render_vec(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

/// Pointwise tensor product of characters.
pub fn tensor(a: &WeightedRep, b: &WeightedRep) -> WeightedRep {
    WeightedRep::new(
        a.entries()
            .iter()
            .flat_map(|(wa, ma)| b.entries().iter().map(move |(wb, mb)| (vadd(wa, wb), ma * mb))),
    )
}

/// The trivial one-dimensional character on a rank-`n` lattice.
pub fn trivial(n: usize) -> WeightedRep {
    WeightedRep::new([(vec![Q::zero(); n], 1)])
}

/// One summand `coeff·E_{𝒪_p}(U′) ⊗ E_{√K}(U)` of an Atiyah–Bott class; without
/// `sqrt_k` the summand is the pointwise class alone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FSummand {
    pub coeff: i64,
    pub u_prime: WeightedRep,
    pub sqrt_k: Option<WeightedRep>,
}

/// A class `F` as an integer combination of summands; indices are linear in `F`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FClass {
    pub summands: Vec<FSummand>,
}

impl FClass {
    pub fn character(u_prime: WeightedRep) -> Self {
        FClass { summands: vec![FSummand { coeff: 1, u_prime, sqrt_k: None }] }
    }

    /// `E_{𝒪_p}(U′) ⊗ E_a(U)` with `a ∼ rank·[√K] + (deg + 1 − g)·[𝒪_p]`.
    pub fn atiyah_bott(a: (i64, i64), u: &WeightedRep, u_prime: &WeightedRep, genus: u32) -> Self {
        let (rank, deg) = a;
        let mut summands = Vec::new();
        if rank != 0 {
            summands.push(FSummand { coeff: rank, u_prime: u_prime.clone(), sqrt_k: Some(u.clone()) });
        }
        let op = deg + 1 - i64::from(genus);
        if op != 0 {
            summands.push(FSummand { coeff: op, u_prime: tensor(u_prime, u), sqrt_k: None });
        }
        FClass { summands }
    }

    /// `F ⊗ e^w`.
    pub fn twist(&self, w: &[Q]) -> Self {
        let shift = WeightedRep::new([(w.to_vec(), 1)]);
        FClass {
            summands: self
                .summands
                .iter()
                .map(|s| FSummand { coeff: s.coeff, u_prime: tensor(&s.u_prime, &shift), sqrt_k: s.sqrt_k.clone() })
                .collect(),
        }
    }

    /// Largest λ-weight of any summand.
    fn max_weight(&self, lambda: &[Q]) -> Option<Q> {
        let maxw = |r: &WeightedRep| r.entries().iter().map(|(w, _)| dot(lambda, w)).max();
        self.summands
            .iter()
            .filter_map(|s| {
                let a = maxw(&s.u_prime)?;
                match &s.sqrt_k {
                    None => Some(a),
                    Some(u) => Some(a + maxw(u)?),
                }
            })
            .max()
    }
}

/// The weights of `𝐓 = X ⊕ 𝔤[1]` sorted by the sign of their λ-pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerClassData {
    /// Primitive integral vector on the ray of `λ`.
    pub lambda_hat: QVec,
    pub x_plus: WeightedRep,
    pub x_minus: WeightedRep,
    /// Roots with multiplicity `−1`.
    pub roots_plus: WeightedRep,
    pub roots_minus: WeightedRep,
}

/// One `Sym_y(n·E_a(U_β))` factor: `a = (rank, degree)`, monomial `q·τ^tau·z^{−β|Z}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymTerm {
    pub weight: QVec,
    pub n: i64,
    pub a: (i64, i64),
    pub tau: i64,
}

pub fn euler_class_weights(lambda: &[Q], x: &WeightedRep, datum: &crate::rootdata::RootDatum) -> Result<EulerClassData> {
    if is_zero_vec(lambda) {
        return Err(Error::Precondition("𝔼_λ needs λ ≠ 0".into()));
    }
    let lambda_hat = primitive(lambda);
    let sign = |w: &QVec| dot(&lambda_hat, w).signum();
    let pos = |w: &QVec| sign(w).is_positive();
    let neg = |w: &QVec| sign(w).is_negative();
    let roots = WeightedRep::shifted_roots(datum);
    Ok(EulerClassData {
        x_plus: x.filter(pos),
        x_minus: x.filter(neg),
        roots_plus: roots.filter(pos),
        roots_minus: roots.filter(neg),
        lambda_hat,
    })
}

impl EulerClassData {
    pub fn t_plus(&self) -> WeightedRep {
        self.x_plus.sum(&self.roots_plus)
    }

    pub fn t_minus(&self) -> WeightedRep {
        self.x_minus.sum(&self.roots_minus)
    }

    /// `Sym(E_𝒪(𝐓⁺)^∨) ⊗ Sym(E_𝒪(𝐓⁻))` as `Sym` factors.
    pub fn sym_terms(&self) -> Vec<SymTerm> {
        let mut out = Vec::new();
        for (reps, is_x) in [(&self.x_plus, true), (&self.roots_plus, false)] {
            for (w, n) in reps.entries() {
                // Serre duality turns the dual complex into E_K of the dual weight.
                out.push(SymTerm { weight: w.iter().map(|a| -a).collect(), n: -n, a: (1, -1), tau: i64::from(is_x) });
            }
        }
        for (reps, is_x) in [(&self.x_minus, true), (&self.roots_minus, false)] {
            for (w, n) in reps.entries() {
                out.push(SymTerm { weight: w.clone(), n: *n, a: (1, 0), tau: -i64::from(is_x) });
            }
        }
        out
    }

    /// `rank E_𝒪(𝐓⁻)` at degree `d′`, and its `X` part.
    pub fn rank(&self, d: &[Q], genus: u32) -> Result<(i64, i64)> {
        let g = q(i64::from(genus));
        let part = |r: &WeightedRep| -> Result<i64> {
            let s: Q = r.entries().iter().map(|(w, n)| q(*n) * (dot(w, d) + q(1) - &g)).sum();
            if !s.is_integer() {
                return Err(Error::Precondition(format!("rank of E(𝐓⁻) is not integral: {s}")));
            }
            s.to_integer().to_i64().ok_or_else(|| Error::Precondition("rank out of range".into()))
        };
        let x = part(&self.x_minus)?;
        Ok((x + part(&self.roots_minus)?, x))
    }

    /// `⟨λ̂, det E_𝒪(𝐓⁻)⟩ = (λ̂, d′)_{𝐓⁻} + (1−g)⟨λ̂, det 𝐓⁻⟩`.
    pub fn det_pairing(&self, d: &[Q], genus: u32) -> Q {
        let g = q(i64::from(genus));
        self.t_minus()
            .entries()
            .iter()
            .map(|(w, n)| q(*n) * dot(&self.lambda_hat, w) * (dot(w, d) + q(1) - &g))
            .sum()
    }

    /// Smallest `|⟨λ̂, θ⟩|` over `𝐓`, the λ-weight lost per `Sym` factor.
    pub fn w_min(&self) -> Option<Q> {
        self.t_plus().sum(&self.t_minus()).entries().iter().map(|(w, _)| dot(&self.lambda_hat, w).abs()).min()
    }
}

/// Verdict of the weight test on one stratum.
#[derive(Clone, Debug, Serialize)]
pub struct PruneVerdict {
    pub keep: bool,
    /// `(λ̂, d′)_h − max⟨λ̂, F⟩ − ⟨λ̂, det E(𝐓⁻)⟩`; positive means no λ-weight zero piece.
    #[serde(serialize_with = "crate::quadforms::ser_q")]
    pub bound: Q,
    /// Number of `Sym` factors that can still reach λ-weight zero.
    pub q_cutoff: u32,
}

fn weight_test(h: &Mat, e: &EulerClassData, d: &[Q], f: &FClass, genus: u32) -> PruneVerdict {
    let lh = &e.lambda_hat;
    let maxf = f.max_weight(lh).unwrap_or_else(Q::zero);
    let bound = h.bilinear(lh, d) - maxf - e.det_pairing(d, genus);
    let keep = !bound.is_positive();
    let q_cutoff = match (keep, e.w_min()) {
        (true, Some(w)) if w.is_positive() => (-&bound / w).floor().to_integer().to_u32().unwrap_or(u32::MAX),
        _ => 0,
    };
    PruneVerdict { keep, bound, q_cutoff }
}

/// Checks `c_{X/V} < 1`, then applies the weight test to each datum.
pub fn admissible_prune(
    ctx: &StrataContext,
    f: &FClass,
    genus: u32,
    data: &[IndexingDatum],
) -> Result<Vec<PruneVerdict>> {
    let c = c_xv(&ctx.x, &ctx.datum, &ctx.v, &ctx.b)?;
    if c.less_than(&q(1)) != Some(true) {
        return Err(Error::Precondition(format!(
            "c_X/V = [{}, {}] is not below 1; replace V by V^m for larger m",
            fmt_q(&c.lo),
            fmt_q(&c.hi)
        )));
    }
    let h = ctx.v_form.matrix.clone();
    data.iter()
        .map(|nu| Ok(weight_test(&h, &euler_class_weights(&nu.lambda, &ctx.x, &ctx.datum)?, &nu.d, f, genus)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct GgwConfig {
    pub genus: u32,
    pub trunc: Trunc,
    pub depth_limit: usize,
    /// Bound on `μ²` for strata scans over non-abelian groups.
    pub gamma2: Option<Q>,
    pub orientation: Orientation,
}

impl Default for GgwConfig {
    fn default() -> Self {
        GgwConfig { genus: 0, trunc: Trunc::new(8, 0, 0), depth_limit: 8, gamma2: None, orientation: Orientation::CALIBRATED }
    }
}

/// A Levi stage: `X^{λ=0}/L_λ` with accumulated `𝔼` data.
#[derive(Clone, Debug)]
pub struct LeviContext {
    pub ctx: StrataContext,
    /// Level form before orientation.
    pub h: Mat,
    pub sym: Vec<SymTerm>,
    /// Sum of pointwise characters, applied as `e^{w}`.
    pub char_shift: QVec,
    pub sign: i64,
    pub tau: i64,
    pub q_trunc: u32,
    pub depth: usize,
}

impl LeviContext {
    pub fn root(ctx: &StrataContext) -> Self {
        let n = ctx.rank();
        LeviContext {
            ctx: ctx.clone(),
            h: ctx.v_form.matrix.clone(),
            sym: Vec::new(),
            char_shift: vec![Q::zero(); n],
            sign: 1,
            tau: 0,
            q_trunc: 0,
            depth: 0,
        }
    }

    fn measure(&self) -> (usize, usize) {
        (self.ctx.datum.semisimple_rank(), self.ctx.x.len())
    }

    fn child(&self, nu: &IndexingDatum, genus: u32, q_cutoff: u32) -> Result<LeviContext> {
        let e = euler_class_weights(&nu.lambda, &self.ctx.x, &self.ctx.datum)?;
        let levi = self.ctx.datum.levi(&nu.levi_simple)?;
        let chi = shifted_character(&self.ctx, &nu.lambda, &nu.d)?;
        let ctx = StrataContext::new(levi, nu.fixed_weights.clone(), self.ctx.v.clone(), self.ctx.b.clone(), chi)?;
        let n = self.ctx.rank();
        let t_minus = e.t_minus();
        let (rank, x_rank) = e.rank(&nu.d, genus)?;
        let mut sym = self.sym.clone();
        sym.extend(e.sym_terms());
        let one_minus_g = q(1 - i64::from(genus));
        let child = LeviContext {
            ctx,
            h: self.h.sub(&t_minus.ch2_form(n).matrix),
            sym,
            char_shift: vadd(&self.char_shift, &vscale(&t_minus.det(n), &one_minus_g)),
            sign: if rank.is_odd() { -self.sign } else { self.sign },
            tau: self.tau - x_rank,
            q_trunc: self.q_trunc.saturating_add(q_cutoff),
            depth: self.depth + 1,
        };
        if child.measure() >= self.measure() {
            return Err(Error::Precondition(format!(
                "recursion does not shrink: (Levi rank, fixed weights) {:?} -> {:?}",
                self.measure(),
                child.measure()
            )));
        }
        Ok(child)
    }

    fn memo_key(&self, d: &[Q], f: &FClass) -> String {
        format!(
            "{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{}|{}|{}|{:?}|{:?}",
            self.ctx.datum.simple_coroots,
            self.ctx.x,
            self.ctx.chi,
            self.h,
            self.sym,
            self.char_shift,
            self.sign,
            self.tau,
            self.q_trunc,
            d,
            f
        )
    }

    /// `I_d` of this stage for the class `F`, graded by `t`-degree.
    pub fn index(&self, d: &[Q], f: &FClass, cfg: &GgwConfig) -> Result<(Graded, f64)> {
        let level = LevelData::new(&self.ctx.datum, self.h.clone(), cfg.orientation)?;
        let g = i64::from(cfg.genus);
        let shift = WeightedRep::new([(self.char_shift.clone(), 1)]);
        let mut out = Graded::new();
        let mut residual: f64 = 0.0;
        for s in &f.summands {
            let mut trunc = cfg.trunc;
            trunc.s = u32::from(s.sqrt_k.is_some());
            trunc.q = self.q_trunc;
            let empty = WeightedRep::empty();
            let u = s.sqrt_k.as_ref().unwrap_or(&empty);
            let up = tensor(&s.u_prime, &shift);
            let mut p = full_index_problem(&level, cfg.genus, u, Some(&up), &self.ctx.x, trunc)?;
            for t in &self.sym {
                let mono = p.mono([0, 0, 1], &t.weight, t.tau)?;
                p.log_terms.push(LogTerm {
                    weight: t.weight.clone(),
                    sqrtk: t.n * t.a.0,
                    op_exp: t.n * (t.a.1 + 1 - g),
                    mono,
                });
            }
            p.sign = self.sign;
            let last = p.zdim() - 1;
            p.shift.z[last] = self.tau;
            let report = p.evaluate()?;
            for di in &report.integers {
                residual = residual.max(di.coefficients.iter().map(|c| c.residual).fold(0.0, f64::max));
            }
            for ((t, sd, _), v) in report.index_at(d) {
                if sd == trunc.s {
                    *out.entry(t).or_insert(0) += s.coeff * v;
                }
            }
        }
        out.retain(|_, v| *v != 0);
        Ok((out, residual))
    }

    /// Whether `(d, −)_V + χ` is nonzero on cocharacters of the center acting trivially on `X`.
    pub fn central_obstruction(&self, d: &[Q]) -> bool {
        let c = &self.ctx.datum.center_basis;
        if c.is_empty() {
            return false;
        }
        let rows: Vec<QVec> =
            self.ctx.x.entries().iter().map(|(w, _)| c.iter().map(|z| dot(z, w)).collect()).collect();
        let kernel: Vec<QVec> = if rows.is_empty() {
            (0..c.len()).map(|i| crate::linalg::unit(c.len(), i)).collect()
        } else {
            Mat::from_rows(&rows).nullspace()
        };
        kernel.iter().any(|k| {
            let mut lam = vec![Q::zero(); self.ctx.rank()];
            for (ki, zi) in k.iter().zip(c) {
                lam = vadd(&lam, &vscale(zi, ki));
            }
            !canonical_numerator(&self.ctx, &lam, d).is_zero()
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrectionReport {
    pub d: Vec<String>,
    pub lambda: Vec<String>,
    pub mu2: String,
    pub bound: String,
    pub q_truncation: u32,
    pub value: Vec<(i64, i64)>,
    pub nested_corrections: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrunedReport {
    pub d: Vec<String>,
    pub lambda: Vec<String>,
    pub mu2: String,
    pub bound: String,
}

/// `I_d`, the corrections and `I_d^χ` for one stage.
#[derive(Clone, Debug, Serialize)]
pub struct GgwReport {
    pub d: Vec<String>,
    pub i_d: Vec<(i64, i64)>,
    pub corrections: Vec<CorrectionReport>,
    pub pruned: Vec<PrunedReport>,
    pub i_chi: Vec<(i64, i64)>,
    pub central_shortcut: bool,
    pub max_gate_residual: f64,
    #[serde(skip)]
    pub i_d_graded: Graded,
    #[serde(skip)]
    pub i_chi_graded: Graded,
    #[serde(skip)]
    pub corrections_graded: Vec<Graded>,
}

struct Evaluator<'a> {
    cfg: &'a GgwConfig,
    memo: Mutex<HashMap<String, GgwReport>>,
}

impl Evaluator<'_> {
    fn strata(&self, stage: &LeviContext, d: &[Q], d_ker: &[Q]) -> Result<Vec<IndexingDatum>> {
        let ctx = &stage.ctx;
        let data = if ctx.datum.is_torus() {
            active_lambdas(ctx, d)
        } else {
            let gamma2 = self.cfg.gamma2.clone().ok_or_else(|| {
                Error::Precondition("non-abelian strata scans need a bound on μ² (gamma2)".into())
            })?;
            let central = b_projector(&ctx.datum.center_basis, &ctx.b).mul_vec(d);
            enumerate_chi_active(ctx, d_ker, &gamma2, Some(&central))?
        };
        Ok(data.into_iter().filter(|nu| !is_zero_vec(&nu.lambda)).collect())
    }

    fn run(&self, stage: &LeviContext, d: &[Q], d_ker: &[Q], f: &FClass) -> Result<GgwReport> {
        if stage.depth > self.cfg.depth_limit {
            return Err(Error::DepthLimit(self.cfg.depth_limit));
        }
        let key = stage.memo_key(d, f);
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(hit.clone());
        }
        let (i_d, mut residual) = stage.index(d, f, self.cfg)?;
        let mut report = GgwReport {
            d: render_vec(d),
            i_d: render_graded(&i_d),
            corrections: Vec::new(),
            pruned: Vec::new(),
            i_chi: Vec::new(),
            central_shortcut: false,
            max_gate_residual: 0.0,
            i_d_graded: i_d.clone(),
            i_chi_graded: Graded::new(),
            corrections_graded: Vec::new(),
        };
        if stage.central_obstruction(d) {
            report.central_shortcut = true;
            report.max_gate_residual = residual;
            return Ok(report);
        }
        let data = self.strata(stage, d, d_ker)?;
        let verdicts: Vec<PruneVerdict> = if stage.depth == 0 {
            admissible_prune(&stage.ctx, f, self.cfg.genus, &data)?
        } else {
            // Outer 𝔼 factors carry weights the single-λ test does not bound; keep everything.
            data.iter()
                .map(|nu| {
                    let e = euler_class_weights(&nu.lambda, &stage.ctx.x, &stage.ctx.datum)?;
                    let mut v = weight_test(&stage.h, &e, &nu.d, &f.twist(&stage.char_shift), self.cfg.genus);
                    v.keep = true;
                    Ok(v)
                })
                .collect::<Result<_>>()?
        };
        let mut kept = Vec::new();
        for (nu, v) in data.iter().zip(&verdicts) {
            if v.keep {
                kept.push((nu, v));
            } else {
                report.pruned.push(PrunedReport {
                    d: render_vec(&nu.d),
                    lambda: render_vec(&nu.lambda),
                    mu2: fmt_q(&nu.mu2),
                    bound: fmt_q(&v.bound),
                });
            }
        }
        let children = crate::par::try_map(&kept, |(nu, v)| {
            let child = stage.child(nu, self.cfg.genus, v.q_cutoff)?;
            let ker = crate::quadforms::b_projector(&child.ctx.phi.kernel_basis(), &child.ctx.b).mul_vec(&nu.d);
            let sub = self.run(&child, &nu.d, &ker, f)?;
            Ok::<_, Error>((child.q_trunc, sub))
        })?;
        let mut i_chi = i_d;
        for ((nu, v), (q_trunc, sub)) in kept.iter().zip(children) {
            i_chi = sub_graded(&i_chi, &sub.i_chi_graded);
            residual = residual.max(sub.max_gate_residual);
            report.corrections.push(CorrectionReport {
                d: render_vec(&nu.d),
                lambda: render_vec(&nu.lambda),
                mu2: fmt_q(&nu.mu2),
                bound: fmt_q(&v.bound),
                q_truncation: q_trunc,
                value: render_graded(&sub.i_chi_graded),
                nested_corrections: sub.corrections.len(),
            });
            report.corrections_graded.push(sub.i_chi_graded);
        }
        report.i_chi = render_graded(&i_chi);
        report.i_chi_graded = i_chi;
        report.max_gate_residual = residual;
        self.memo.lock().expect("memo lock").insert(key, report.clone());
        Ok(report)
    }
}

/// `I_d`, the list of stratum corrections, and `I_d^χ` for the class `F`.
pub fn recursive_ggw(ctx: &StrataContext, d: &[Q], d_ker: &[Q], f: &FClass, cfg: &GgwConfig) -> Result<GgwReport> {
    if !crate::twindex::pi1_is_free(&ctx.datum) {
        return Err(Error::Precondition("π₁(G) must be free".into()));
    }
    let ev = Evaluator { cfg, memo: Mutex::new(HashMap::new()) };
    ev.run(&LeviContext::root(ctx), d, d_ker, f)
}

/// `(V^{⊕m}, m·χ)`: the context of the `m`-th member of the quantization family.
pub fn quantized_context(ctx: &StrataContext, m: i64) -> Result<StrataContext> {
    if m < 1 {
        return Err(Error::Precondition("the quantization power must be positive".into()));
    }
    StrataContext::new(ctx.datum.clone(), ctx.x.clone(), ctx.v.repeat(m), ctx.b.clone(), vscale(&ctx.chi, &q(m)))
}

/// `F_m = 𝒪_p(−mχ) ⊗ F₀`.
pub fn quantized_class(ctx: &StrataContext, f0: &FClass, m: i64) -> FClass {
    f0.twist(&vscale(&ctx.chi, &q(-m)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdTerm {
    pub d: Vec<String>,
    pub lambda: Vec<String>,
    /// `(λ̂, d′)_V + ⟨λ̂, χ⟩`, the coefficient of `m`.
    pub slope: String,
    /// `max⟨λ̂, F₀⟩ + ⟨λ̂, det E(𝐓⁻)⟩`.
    pub offset: String,
    pub m_min: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantizationThreshold {
    pub m_star: i64,
    pub strata: Vec<ThresholdTerm>,
}

/// Smallest `m*` such that every stratum with central part `d` fails the weight test for all `m ≥ m*`.
pub fn quantization_threshold(
    ctx: &StrataContext,
    d: &[Q],
    d_ker: &[Q],
    f0: &FClass,
    cfg: &GgwConfig,
) -> Result<QuantizationThreshold> {
    let ev = Evaluator { cfg, memo: Mutex::new(HashMap::new()) };
    let data = ev.strata(&LeviContext::root(ctx), d, d_ker)?;
    let mut m_star = 1;
    let mut strata = Vec::new();
    for nu in &data {
        let e = euler_class_weights(&nu.lambda, &ctx.x, &ctx.datum)?;
        let lh = &e.lambda_hat;
        let slope = canonical_numerator(ctx, lh, &nu.d);
        if !slope.is_positive() {
            return Err(Error::Precondition("active stratum with nonpositive slope".into()));
        }
        let offset = f0.max_weight(lh).unwrap_or_else(Q::zero) + e.det_pairing(&nu.d, cfg.genus);
        let m_min = (&offset / &slope).floor().to_integer().to_i64().unwrap_or(i64::MAX - 1) + 1;
        m_star = m_star.max(m_min);
        strata.push(ThresholdTerm {
            d: render_vec(&nu.d),
            lambda: render_vec(&nu.lambda),
            slope: fmt_q(&slope),
            offset: fmt_q(&offset),
            m_min,
        });
    }
    Ok(QuantizationThreshold { m_star, strata })
}
