// SPDX-License-Identifier: MIT OR Apache-2.0
//! Index formulas of Teleman–Woodward type: a sum over the torsion solution
//! points `ξ = 2πi·v` of the level equation, each deformed by a series
//! perturbation and weighted by `θ(ξ)^{1−g}`.
//!
//! Conventions. The engine level is `h′ = s·h + c` with `c = −Σ_{α>0} α⊗α` and
//! `s` the orientation sign. Solution points satisfy `h′·v ≡ ρ mod M`. A weight
//! `γ` attached to a formal class carries the monomial `z^{−γ|Z}`, where `γ|Z`
//! lists the pairings of `γ` with the integer basis `Z` of `N^W`. One further
//! Laurent coordinate `τ` (last in every `z` vector) records shifts of the
//! `t`-grading that may be negative.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::lattice::{coset_representatives, frac_vec, smith};
use crate::linalg::{dot, fmt_q, q, q_to_f64, vadd, Mat, Q, QVec};
use crate::quadforms::{QuadForm, WeightedRep};
use crate::rootdata::RootDatum;
use crate::scalar::{precision_floor, Cx};
use crate::series::{solve_fixed_point, Mono, SeriesMatrix, SeriesTerm, Trunc, TruncatedSeries};
use crate::{Error, Result};

/// Residual allowed by the integer gate.
pub const INTEGER_GATE: f64 = 1e-9;

/// Below this, extracted coefficients count as numerical noise.
const NOISE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaSign {
    /// `Δ² = Π(e^α + e^{−α} − 2)` as written.
    Plain,
    /// `Δ²` multiplied by `(−1)^{|Φ⁺|}`, the modulus squared on the compact torus.
    Compact,
}

/// The two sign choices fixed by [`calibrate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Orientation {
    pub level_sign: i64,
    pub delta: DeltaSign,
}

impl Orientation {
    /// The choice selected by calibration; `calibrate` re-derives it.
    pub const CALIBRATED: Orientation = Orientation { level_sign: -1, delta: DeltaSign::Compact };

    pub fn candidates() -> [Orientation; 4] {
        let mut out = [Self::CALIBRATED; 4];
        let mut k = 0;
        for level_sign in [-1, 1] {
            for delta in [DeltaSign::Compact, DeltaSign::Plain] {
                out[k] = Orientation { level_sign, delta };
                k += 1;
            }
        }
        out
    }

    fn delta_sign(&self, datum: &RootDatum) -> i64 {
        match self.delta {
            DeltaSign::Plain => 1,
            DeltaSign::Compact if datum.positive_roots.len() % 2 == 1 => -1,
            DeltaSign::Compact => 1,
        }
    }
}

impl Default for Orientation {
    fn default() -> Self {
        Self::CALIBRATED
    }
}

/// `−Σ_{α>0} α⊗α`, minus half the trace form of the adjoint representation.
pub fn half_trace_form(datum: &RootDatum) -> Mat {
    let n = datum.rank;
    let mut c = Mat::zeros(n, n);
    for (a, _) in &datum.positive_roots {
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] -= &a[i] * &a[j];
            }
        }
    }
    c
}

/// Whether the coroot lattice is saturated in `N`, i.e. `π₁(G)` is free.
pub fn pi1_is_free(datum: &RootDatum) -> bool {
    if datum.is_torus() {
        return true;
    }
    let rows = datum
        .simple_coroots
        .iter()
        .map(|c| c.iter().map(|x| x.to_integer()).collect())
        .collect();
    let s = smith(&rows, datum.rank);
    s.diag.iter().take(s.rank).all(One::is_one)
}

#[derive(Clone, Debug)]
pub struct LevelData {
    pub datum: RootDatum,
    pub h: QuadForm,
    pub c: Mat,
    pub h_prime: Mat,
    pub rho: QVec,
    pub orientation: Orientation,
    pub admissible: bool,
    /// Why the level is not admissible, when it is not.
    pub defect: Option<String>,
}

impl LevelData {
    pub fn new(datum: &RootDatum, h: Mat, orientation: Orientation) -> Result<Self> {
        let n = datum.rank;
        if h.rows != n || h.cols != n {
            return Err(Error::Dimension(format!("level form must be {n}×{n}")));
        }
        let h = QuadForm::new(h)?;
        let c = half_trace_form(datum);
        let h_prime = h.matrix.scale(&q(orientation.level_sign)).add(&c);
        let defect = if !h_prime.is_integral() {
            Some("h + c is not integer valued".to_string())
        } else if !h_prime.is_negative_definite() {
            Some("h + c is not negative definite".to_string())
        } else if !coroot_gram(datum, &h.matrix).is_positive_definite() {
            Some("h is not positive on the semisimple part".to_string())
        } else {
            None
        };
        Ok(LevelData {
            datum: datum.clone(),
            h,
            c,
            h_prime,
            rho: datum.rho(),
            orientation,
            admissible: defect.is_none(),
            defect,
        })
    }

    /// The level `ch₂(V)` of a representation.
    pub fn from_rep(datum: &RootDatum, v: &WeightedRep, orientation: Orientation) -> Result<Self> {
        Self::new(datum, v.ch2_form(datum.rank).matrix, orientation)
    }

    pub fn require_admissible(&self) -> Result<()> {
        match &self.defect {
            None => Ok(()),
            Some(why) => Err(Error::Precondition(format!("level is not admissible: {why}"))),
        }
    }

    pub fn det_h_prime(&self) -> Q {
        self.h_prime.det()
    }

    pub fn render(&self) -> Vec<Vec<String>> {
        (0..self.h_prime.rows).map(|i| self.h_prime.row(i).iter().map(fmt_q).collect()).collect()
    }
}

fn coroot_gram(datum: &RootDatum, h: &Mat) -> Mat {
    let cs = &datum.simple_coroots;
    Mat::from_rows(&cs.iter().map(|a| cs.iter().map(|b| h.bilinear(a, b)).collect()).collect::<Vec<_>>())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionPoint {
    /// `ξ = 2πi·v`, reduced into `[0,1)ⁿ`.
    #[serde(serialize_with = "ser_qvec")]
    pub v: QVec,
    pub regular: bool,
    /// Index into the sorted list of `W`-orbits mod `N`.
    pub orbit: usize,
}

fn ser_qvec<S: serde::Serializer>(v: &QVec, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_q))
}

/// `true` when some root pairs integrally with `v`, i.e. `Δ(2πi·v) = 0`.
fn exactly_irregular(datum: &RootDatum, v: &[Q]) -> bool {
    datum.positive_roots.iter().any(|(a, _)| dot(v, a).is_integer())
}

/// `|Δ(2πi·v)| = Π_{α>0} |2 sin(π⟨v,α⟩)|` in double precision.
fn delta_abs_f64(datum: &RootDatum, v: &[Q]) -> f64 {
    datum
        .positive_roots
        .iter()
        .map(|(a, _)| (2.0 * (std::f64::consts::PI * q_to_f64(&dot(v, a))).sin()).abs())
        .product()
}

/// Lexicographically least `frac(w·v)` over `W`.
fn canonical(datum: &RootDatum, v: &[Q]) -> QVec {
    datum.weyl.iter().map(|w| frac_vec(&w.mul_vec(v))).min().expect("W contains the identity")
}

/// All `|det h′|` points of `F_ρ / N`, with regularity and orbit labels.
pub fn enumerate_f_rho(level: &LevelData) -> Result<Vec<SolutionPoint>> {
    let datum = &level.datum;
    let hp = &level.h_prime;
    let inv = hp.inverse().ok_or_else(|| Error::Singular("h + c is degenerate".into()))?;
    let z = hp.to_bigint_rows().ok_or_else(|| Error::Precondition("h + c must be integral".into()))?;
    let reps = coset_representatives(&z)?;
    let mut pts: Vec<(QVec, bool, QVec)> = crate::par::map(&reps, |m| {
        let mq: QVec = m.iter().map(|x| Q::from_integer(x.clone())).collect();
        let v = frac_vec(&inv.mul_vec(&vadd(&level.rho, &mq)));
        let regular = delta_abs_f64(datum, &v) > 1e-9 || !exactly_irregular(datum, &v);
        let key = canonical(datum, &v);
        (v, regular, key)
    });
    pts.sort();
    let keys: Vec<QVec> = {
        let mut k: Vec<QVec> = pts.iter().map(|p| p.2.clone()).collect();
        k.sort();
        k.dedup();
        k
    };
    Ok(pts
        .into_iter()
        .map(|(v, regular, key)| SolutionPoint {
            v,
            regular,
            orbit: keys.binary_search(&key).expect("key was collected"),
        })
        .collect())
}

/// One regular representative per `W`-orbit, checking that regular orbits are free.
pub fn regular_orbit_representatives(level: &LevelData, pts: &[SolutionPoint]) -> Result<Vec<QVec>> {
    let mut by_orbit: BTreeMap<usize, Vec<&SolutionPoint>> = BTreeMap::new();
    for p in pts.iter().filter(|p| p.regular) {
        by_orbit.entry(p.orbit).or_default().push(p);
    }
    let w = level.datum.weyl_order();
    let mut out = Vec::with_capacity(by_orbit.len());
    for (id, members) in by_orbit {
        if members.len() != w {
            return Err(Error::Precondition(format!(
                "regular orbit {id} has {} points, expected |W| = {w}",
                members.len()
            )));
        }
        out.push(canonical(&level.datum, &members[0].v));
    }
    Ok(out)
}

/// `coeff·mono·ch`-type perturbation: residual `coeff·mono·e^{γ(ξ)}·γ`.
#[derive(Clone, Debug)]
pub struct ExpTerm {
    pub coeff: Q,
    pub weight: QVec,
    pub mono: Mono,
}

/// `Sym` of a line class `x = mono·e^{β(ξ)}`: residual `−sqrtk·ln(1 − x)·β`,
/// pointwise factor `(1 − x)^{−op_exp}`.
#[derive(Clone, Debug)]
pub struct LogTerm {
    pub weight: QVec,
    pub sqrtk: i64,
    pub op_exp: i64,
    pub mono: Mono,
}

/// `(Σ coeff·mono·e^{w(ξ)})^power`, evaluated at the deformed point.
#[derive(Clone, Debug)]
pub struct PointFactor {
    pub terms: Vec<(Q, QVec, Mono)>,
    pub power: i64,
}

/// A fully specified index computation.
#[derive(Clone, Debug)]
pub struct IndexProblem {
    pub level: LevelData,
    pub genus: u32,
    pub trunc: Trunc,
    /// Integer basis of the center used for `z`-grading.
    pub zbasis: Vec<QVec>,
    pub exp_terms: Vec<ExpTerm>,
    pub log_terms: Vec<LogTerm>,
    pub point_factors: Vec<PointFactor>,
    pub sign: i64,
    pub shift: Mono,
}

impl IndexProblem {
    pub fn new(level: LevelData, genus: u32, trunc: Trunc) -> Self {
        let zbasis = level.datum.center_lattice.clone();
        let zdim = zbasis.len() + 1;
        IndexProblem {
            level,
            genus,
            trunc,
            zbasis,
            exp_terms: Vec::new(),
            log_terms: Vec::new(),
            point_factors: Vec::new(),
            sign: 1,
            shift: Mono::one(zdim),
        }
    }

    pub fn zdim(&self) -> usize {
        self.zbasis.len() + 1
    }

    /// `z^{−γ|Z}·τ^tau` times `t^e₀ s^e₁ q^e₂`.
    pub fn mono(&self, e: [u32; 3], weight: &[Q], tau: i64) -> Result<Mono> {
        let mut z = Vec::with_capacity(self.zdim());
        for zb in &self.zbasis {
            let p = -dot(zb, weight);
            if !p.is_integer() {
                return Err(Error::Precondition(format!("weight pairs non-integrally with the center: {p}")));
            }
            z.push(
                p.to_integer()
                    .try_into()
                    .map_err(|_| Error::Precondition("z-exponent out of range".into()))?,
            );
        }
        z.push(tau);
        Ok(Mono { e, z })
    }

    /// Adds `Σ_γ n_γ·coeff·mono(γ)·ch` perturbation terms for a representation.
    pub fn add_exp_rep(&mut self, rep: &WeightedRep, coeff: &Q, e: [u32; 3], z_graded: bool) -> Result<()> {
        for (w, n) in rep.entries() {
            let mono = if z_graded { self.mono(e, w, 0)? } else { Mono { e, z: vec![0; self.zdim()] } };
            self.exp_terms.push(ExpTerm { coeff: coeff * q(*n), weight: w.clone(), mono });
        }
        Ok(())
    }

    /// Pointwise character `ch_U(ξ)` with `z`-grading, raised to `power`.
    pub fn add_character(&mut self, rep: &WeightedRep, power: i64) -> Result<()> {
        let terms = rep
            .entries()
            .iter()
            .map(|(w, n)| Ok((q(*n), w.clone(), self.mono([0; 3], w, 0)?)))
            .collect::<Result<Vec<_>>>()?;
        self.point_factors.push(PointFactor { terms, power });
        Ok(())
    }

    fn pairing_center(&self) -> Result<Mat> {
        let hp = &self.level.h_prime;
        let g = Mat::from_rows(
            &self.zbasis.iter().map(|a| self.zbasis.iter().map(|b| hp.bilinear(a, b)).collect()).collect::<Vec<_>>(),
        );
        if !self.zbasis.is_empty() && g.det().is_zero() {
            return Err(Error::Singular("h + c is degenerate on the center".into()));
        }
        Ok(g)
    }

    /// `κ_j = h′(d, Z_j)`, the `z`-exponent at which `I_d` sits.
    pub fn z_exponent_of_degree(&self, d: &[Q]) -> Result<Vec<i64>> {
        self.zbasis
            .iter()
            .map(|zb| {
                let k = self.level.h_prime.bilinear(d, zb);
                if !k.is_integer() {
                    return Err(Error::Precondition(format!("degree pairs to non-integer z-exponent {k}")));
                }
                k.to_integer().try_into().map_err(|_| Error::Precondition("z-exponent out of range".into()))
            })
            .collect()
    }

    /// Inverse of [`z_exponent_of_degree`]: the central degree with `z`-exponent `κ`.
    fn degree_of_z(&self, g: &Mat, kappa: &[i64]) -> Result<QVec> {
        let n = self.level.datum.rank;
        if self.zbasis.is_empty() {
            return Ok(vec![Q::zero(); n]);
        }
        let kq: QVec = kappa.iter().map(|&k| q(k)).collect();
        let y = g.solve(&kq).ok_or_else(|| Error::Singular("center pairing".into()))?;
        let mut d = vec![Q::zero(); n];
        for (yk, zk) in y.iter().zip(&self.zbasis) {
            for (di, zi) in d.iter_mut().zip(zk) {
                *di += yk * zi;
            }
        }
        let integral = self.level.datum.character_lattice.iter().all(|psi| dot(&d, psi).is_integer());
        if !integral {
            return Err(Error::ZSupportLeak(format!(
                "z-exponent {kappa:?} corresponds to the non-integral degree [{}]",
                d.iter().map(fmt_q).collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(d)
    }

    /// Evaluates the sum over regular orbits and extracts integer coefficients.
    pub fn evaluate(&self) -> Result<IndexReport> {
        self.level.require_admissible()?;
        if self.shift.z.len() != self.zdim() {
            return Err(Error::Dimension("shift monomial z-rank".into()));
        }
        for l in &self.log_terms {
            if l.mono.degree() == 0 {
                return Err(Error::Precondition("log terms need a monomial of positive degree".into()));
            }
        }
        for e in &self.exp_terms {
            if e.mono.degree() == 0 {
                return Err(Error::Precondition("perturbation terms need a monomial of positive degree".into()));
            }
        }
        let pts = enumerate_f_rho(&self.level)?;
        let reps = regular_orbit_representatives(&self.level, &pts)?;
        let values = crate::par::try_map(&reps, |v| PointEval { p: self, v }.value())?;
        let mut total = TruncatedSeries::zero(self.trunc, self.zdim());
        for v in &values {
            total = &total + v;
        }
        let integers = self.extract(&total)?;
        Ok(IndexReport {
            genus: self.genus,
            truncation: self.trunc,
            level: self.level.render(),
            solutions: SolutionCount {
                count: pts.len(),
                regular: pts.iter().filter(|p| p.regular).count(),
                orbits: reps.len(),
            },
            series: total,
            integers,
        })
    }

    fn extract(&self, total: &TruncatedSeries) -> Result<Vec<DegreeIndex>> {
        let g = self.pairing_center()?;
        let nz = self.zbasis.len();
        let mut grouped: BTreeMap<Vec<i64>, Vec<(&Mono, &Cx)>> = BTreeMap::new();
        for (m, c) in total.terms() {
            grouped.entry(m.z[..nz].to_vec()).or_default().push((m, c));
        }
        let mut out = Vec::new();
        for (kappa, terms) in grouped {
            if terms.iter().all(|(_, c)| c.abs_f64() <= NOISE) {
                continue;
            }
            let d = self.degree_of_z(&g, &kappa)?;
            let mut coefficients = Vec::new();
            for (m, c) in terms {
                // exp(s·E) weights s^k by 1/k!; k!·[s^k] is the index of the k-th power.
                let c = c.scale_q(&factorial(m.e[1]));
                let (value, residual) = c.nearest_integer()?;
                if residual >= INTEGER_GATE {
                    return Err(Error::IntegerGate(format!(
                        "coefficient of {m} is {} + {}i, {residual:e} from the nearest integer",
                        c.re_f64(),
                        c.im_f64()
                    )));
                }
                if value == 0 {
                    continue;
                }
                coefficients.push(IntegerTerm {
                    t: m.e[0],
                    s: m.e[1],
                    q: m.e[2],
                    tau: m.z[nz],
                    value,
                    residual,
                    raw: c.re_f64(),
                });
            }
            if !coefficients.is_empty() {
                out.push(DegreeIndex { d: d.iter().map(fmt_q).collect(), d_exact: d, coefficients });
            }
        }
        Ok(out)
    }
}

fn factorial(k: u32) -> Q {
    (1..=i64::from(k)).map(q).product()
}

/// One orbit representative being evaluated.
struct PointEval<'a> {
    p: &'a IndexProblem,
    v: &'a QVec,
}

impl PointEval<'_> {
    fn trunc(&self) -> Trunc {
        self.p.trunc
    }

    fn zdim(&self) -> usize {
        self.p.zdim()
    }

    /// `⟨γ, δ⟩`.
    fn pair(&self, w: &[Q], delta: &[TruncatedSeries]) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(self.trunc(), self.zdim());
        for (wi, di) in w.iter().zip(delta) {
            if !wi.is_zero() {
                acc = &acc + &di.scale_q(wi);
            }
        }
        acc
    }

    /// `e^{γ(ξ)} = e^{2πi⟨v,γ⟩}·exp⟨γ,δ⟩`.
    fn character(&self, w: &[Q], delta: &[TruncatedSeries]) -> Result<TruncatedSeries> {
        Ok(self.pair(w, delta).exp()?.scale(&Cx::root_of_unity(&dot(self.v, w))))
    }

    fn system(&self, delta: &[TruncatedSeries]) -> Result<(Vec<TruncatedSeries>, SeriesMatrix)> {
        let n = self.p.level.datum.rank;
        let (tr, zd) = (self.trunc(), self.zdim());
        let hp = &self.p.level.h_prime;
        let mut f: Vec<TruncatedSeries> = (0..n).map(|i| self.pair(&hp.row(i), delta)).collect();
        let mut j: Vec<Vec<TruncatedSeries>> = (0..n)
            .map(|i| (0..n).map(|k| TruncatedSeries::constant(Cx::from_q(&hp[(i, k)]), tr, zd)).collect())
            .collect();
        let mut rank_one = |f: &mut Vec<TruncatedSeries>, lin: &TruncatedSeries, quad: &TruncatedSeries, w: &[Q]| {
            for i in 0..n {
                if w[i].is_zero() {
                    continue;
                }
                f[i] = &f[i] + &lin.scale_q(&w[i]);
                for k in 0..n {
                    if !w[k].is_zero() {
                        j[i][k] = &j[i][k] + &quad.scale_q(&(&w[i] * &w[k]));
                    }
                }
            }
        };
        for t in &self.p.exp_terms {
            let y = self.character(&t.weight, delta)?.shift(&t.mono).scale_q(&t.coeff);
            rank_one(&mut f, &y, &y, &t.weight);
        }
        for l in &self.p.log_terms {
            let x = self.character(&l.weight, delta)?.shift(&l.mono);
            let one_minus = &TruncatedSeries::one(tr, zd) - &x;
            let lin = one_minus.log()?.scale_q(&q(-l.sqrtk));
            let quad = (&x * &one_minus.inverse()?).scale_q(&q(l.sqrtk));
            rank_one(&mut f, &lin, &quad, &l.weight);
        }
        Ok((f, SeriesMatrix::from_rows(j)?))
    }

    fn value(&self) -> Result<TruncatedSeries> {
        let (tr, zd) = (self.trunc(), self.zdim());
        let n = self.p.level.datum.rank;
        let sol = solve_fixed_point(n, tr, zd, |d| self.system(d))?;
        let delta = &sol.delta;
        let (_, jac) = self.system(delta)?;
        let det_j = jac.det()?;
        let mut delta2 = TruncatedSeries::one(tr, zd);
        let two = TruncatedSeries::constant(Cx::from_i64(2), tr, zd);
        for (a, _) in &self.p.level.datum.positive_roots {
            let neg: QVec = a.iter().map(|x| -x).collect();
            let f = &(&self.character(a, delta)? + &self.character(&neg, delta)?) - &two;
            delta2 = &delta2 * &f;
        }
        // θ = sgn(det h′)·s_Δ·Δ²/det J.
        let e = 1 - i64::from(self.p.genus);
        let sgn = self.p.level.det_h_prime().signum().to_integer();
        let sgn = i64::try_from(sgn).expect("sign") * self.p.level.orientation.delta_sign(&self.p.level.datum);
        let mut val = &delta2.powi(e)? * &det_j.powi(-e)?;
        if e.rem_euclid(2) == 1 && sgn < 0 {
            val = -&val;
        }
        for l in &self.p.log_terms {
            if l.op_exp == 0 {
                continue;
            }
            let x = self.character(&l.weight, delta)?.shift(&l.mono);
            let one_minus = &TruncatedSeries::one(tr, zd) - &x;
            val = &val * &one_minus.powi(-l.op_exp)?;
        }
        for pf in &self.p.point_factors {
            let mut s = TruncatedSeries::zero(tr, zd);
            for (c, w, m) in &pf.terms {
                s = &s + &self.character(w, delta)?.shift(m).scale_q(c);
            }
            val = &val * &s.powi(pf.power)?;
        }
        if self.p.sign < 0 {
            val = -&val;
        }
        Ok(val.shift(&self.p.shift))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionCount {
    pub count: usize,
    pub regular: usize,
    pub orbits: usize,
}

/// An integer coefficient `value·t^t s^s q^q` of `I_d`, with the `τ` shift applied to `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegerTerm {
    pub t: u32,
    pub s: u32,
    pub q: u32,
    pub tau: i64,
    pub value: i64,
    pub residual: f64,
    pub raw: f64,
}

impl IntegerTerm {
    /// Exponent of `t` after the `τ` shift.
    pub fn t_degree(&self) -> i64 {
        i64::from(self.t) + self.tau
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeIndex {
    pub d: Vec<String>,
    #[serde(skip)]
    pub d_exact: QVec,
    pub coefficients: Vec<IntegerTerm>,
}

#[derive(Clone, Debug)]
pub struct IndexReport {
    pub genus: u32,
    pub truncation: Trunc,
    pub level: Vec<Vec<String>>,
    pub solutions: SolutionCount,
    pub series: TruncatedSeries,
    pub integers: Vec<DegreeIndex>,
}

impl IndexReport {
    /// `I_d` as a map from `(t-degree incl. τ, s, q)` to integers.
    pub fn index_at(&self, d: &[Q]) -> BTreeMap<(i64, u32, u32), i64> {
        let mut out = BTreeMap::new();
        for di in self.integers.iter().filter(|di| di.d_exact == d) {
            for c in &di.coefficients {
                *out.entry((c.t_degree(), c.s, c.q)).or_insert(0) += c.value;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// `I_d` summed over all gradings.
    pub fn total_at(&self, d: &[Q]) -> i64 {
        self.index_at(d).values().sum()
    }

    /// The coefficient of `1` (all exponents zero), integer-gated.
    pub fn constant_term(&self) -> Result<(i64, f64)> {
        let c = self.series.coeff(&Mono::one(self.series.zdim()));
        let (n, r) = c.nearest_integer()?;
        if r >= INTEGER_GATE {
            return Err(Error::IntegerGate(format!("constant term {} is {r:e} from {n}", c.re_f64())));
        }
        Ok((n, r))
    }

    /// Raw constant term before rounding.
    pub fn constant_raw(&self) -> Cx {
        self.series.coeff(&Mono::one(self.series.zdim()))
    }

    pub fn series_terms(&self) -> Vec<SeriesTerm> {
        self.series.coefficients().into_iter().filter(|t| t.re.hypot(t.im) > precision_floor()).collect()
    }
}

/// A formal class `coeff·mono·E_{√K}(rep)` entering the deformation.
#[derive(Clone, Debug)]
pub struct DeformationTerm {
    pub rep: WeightedRep,
    pub coeff: Q,
    pub e: [u32; 3],
    pub z_graded: bool,
}

/// `χ(Bun_G, 𝓛 ⊗ E_{𝒪_p}(U′) ⊗ exp E_{√K}(W_t))`; `u_prime = None` is the trivial representation.
pub fn tw_index(
    level: &LevelData,
    genus: u32,
    u_prime: Option<&WeightedRep>,
    w_t: &[DeformationTerm],
    trunc: Trunc,
) -> Result<IndexReport> {
    let mut p = IndexProblem::new(level.clone(), genus, trunc);
    for w in w_t {
        p.add_exp_rep(&w.rep, &w.coeff, w.e, w.z_graded)?;
    }
    if let Some(u) = u_prime {
        p.add_character(u, 1)?;
    }
    p.evaluate()
}

fn check_full_preconditions(level: &LevelData) -> Result<()> {
    if !pi1_is_free(&level.datum) {
        return Err(Error::Precondition("π₁(G) must be free".into()));
    }
    level.require_admissible()
}

/// The index problem for `I(X/G, E_{𝒪_p}(U′) ⊗ exp(s·E_{√K}(U)))` over `z, s, t`.
pub fn full_index_problem(
    level: &LevelData,
    genus: u32,
    u: &WeightedRep,
    u_prime: Option<&WeightedRep>,
    x: &WeightedRep,
    trunc: Trunc,
) -> Result<IndexProblem> {
    check_full_preconditions(level)?;
    let mut p = IndexProblem::new(level.clone(), genus, trunc);
    let g = i64::from(genus);
    for (w, n) in x.entries() {
        let beta: QVec = w.iter().map(|a| -a).collect();
        let mono = p.mono([1, 0, 0], &beta, 0)?;
        p.log_terms.push(LogTerm { weight: beta, sqrtk: -n, op_exp: -n * (g - 1), mono });
    }
    p.add_exp_rep(u, &Q::one(), [0, 1, 0], true)?;
    if let Some(up) = u_prime {
        p.add_character(up, 1)?;
    }
    Ok(p)
}

pub fn full_index_formula(
    level: &LevelData,
    genus: u32,
    u: &WeightedRep,
    u_prime: Option<&WeightedRep>,
    x: &WeightedRep,
    trunc: Trunc,
) -> Result<IndexReport> {
    full_index_problem(level, genus, u, u_prime, x, trunc)?.evaluate()
}

/// The same index with `λ_{−t}` of `X*` expanded in Adams operations:
/// `W_t = −Σ_p t^p z^{−pβ} ψ^p(X*)/p²` plus the pointwise `λ_{−t}(X*)^{g−1}`.
pub fn adams_index_formula(
    level: &LevelData,
    genus: u32,
    u: &WeightedRep,
    u_prime: Option<&WeightedRep>,
    x: &WeightedRep,
    trunc: Trunc,
) -> Result<IndexReport> {
    check_full_preconditions(level)?;
    let mut p = IndexProblem::new(level.clone(), genus, trunc);
    let xstar = x.dual();
    for k in 1..=trunc.t {
        let kq = q(i64::from(k));
        let psi = WeightedRep::new(xstar.entries().iter().map(|(w, n)| (w.iter().map(|a| a * &kq).collect(), *n)));
        p.add_exp_rep(&psi, &(-Q::one() / (&kq * &kq)), [k, 0, 0], true)?;
    }
    for (w, n) in xstar.entries() {
        let mono = p.mono([1, 0, 0], w, 0)?;
        let one = p.mono([0; 3], &vec![Q::zero(); w.len()], 0)?;
        let factor = vec![(Q::one(), vec![Q::zero(); w.len()], one), (-Q::one(), w.clone(), mono)];
        p.point_factors.push(PointFactor { terms: factor, power: n * (i64::from(genus) - 1) });
    }
    p.add_exp_rep(u, &Q::one(), [0, 1, 0], true)?;
    if let Some(up) = u_prime {
        p.add_character(up, 1)?;
    }
    p.evaluate()
}

/// Index of `E_a(U)` for `a = (rank, degree)` split as `rank·[√K] + (deg + 1 − g)·[𝒪_p]`.
#[derive(Clone, Debug, Serialize)]
pub struct AbReduction {
    pub rank: i64,
    pub degree: i64,
    pub sqrt_k_weight: i64,
    pub o_p_weight: i64,
    /// `I_d` of `E_{√K}(U)` per degree, read off the `s¹` coefficient.
    #[serde(skip)]
    pub sqrt_k_part: IndexReport,
    /// `I_d` of `E_{𝒪_p}(U)`.
    #[serde(skip)]
    pub o_p_part: IndexReport,
}

impl AbReduction {
    /// `rank·I_d(√K part) + (deg+1−g)·I_d(𝒪_p part)` per grading `(t-degree, q)`.
    pub fn combined_at(&self, d: &[Q]) -> BTreeMap<(i64, u32), i64> {
        let mut out = BTreeMap::new();
        for ((t, s, qq), v) in self.sqrt_k_part.index_at(d) {
            if s == 1 {
                *out.entry((t, qq)).or_insert(0) += self.sqrt_k_weight * v;
            }
        }
        for ((t, s, qq), v) in self.o_p_part.index_at(d) {
            if s == 0 {
                *out.entry((t, qq)).or_insert(0) += self.o_p_weight * v;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }
}

pub fn ab_class_reduce(
    level: &LevelData,
    genus: u32,
    a: (i64, i64),
    u: &WeightedRep,
    x: &WeightedRep,
    trunc: Trunc,
) -> Result<AbReduction> {
    let (rank, degree) = a;
    let o_p_weight = degree + 1 - i64::from(genus);
    let mut with_s = trunc;
    with_s.s = with_s.s.max(1);
    let mut without_s = trunc;
    without_s.s = 0;
    let sqrt_k_part = full_index_formula(level, genus, u, None, x, with_s)?;
    let o_p_part = full_index_formula(level, genus, &WeightedRep::empty(), Some(u), x, without_s)?;
    Ok(AbReduction { rank, degree, sqrt_k_weight: rank, o_p_weight, sqrt_k_part, o_p_part })
}

/// Fixes the orientation by matching `h^g` for `GL1` and the `A1` values
/// `1` at `g = 0` and `k + 1` at `g = 1`. Exactly one candidate must survive.
pub fn calibrate() -> Result<Orientation> {
    let gl1 = RootDatum::torus(1);
    let a1 = RootDatum::preset("A1")?;
    let trunc = Trunc::new(0, 0, 0);
    let mut good = Vec::new();
    'cand: for o in Orientation::candidates() {
        let checks: [(&RootDatum, i64, u32, i64); 4] =
            [(&gl1, 2, 2, 4), (&gl1, 3, 0, 1), (&a1, 1, 1, 2), (&a1, 2, 0, 1)];
        for (datum, k, g, want) in checks {
            // GL1 at level k; A1 at level k in the normalization h(α^∨, α^∨) = 2k.
            let h = if datum.is_torus() { Mat::from_i64(&[vec![k]]) } else { Mat::from_i64(&[vec![2 * k]]) };
            let level = LevelData::new(datum, h, o)?;
            if !level.admissible {
                continue 'cand;
            }
            let got = tw_index(&level, g, None, &[], trunc).and_then(|r| r.constant_term());
            match got {
                Ok((n, _)) if n == want => {}
                _ => continue 'cand,
            }
        }
        good.push(o);
    }
    match good.as_slice() {
        [o] => Ok(*o),
        [] => Err(Error::Precondition("no orientation reproduces the calibration values".into())),
        _ => Err(Error::Precondition("calibration is ambiguous".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{qf, qvec};

    fn gl1(h: i64) -> LevelData {
        LevelData::new(&RootDatum::torus(1), Mat::from_i64(&[vec![h]]), Orientation::CALIBRATED).unwrap()
    }

    fn a1(k: i64) -> LevelData {
        LevelData::new(&RootDatum::preset("A1").unwrap(), Mat::from_i64(&[vec![2 * k]]), Orientation::CALIBRATED)
            .unwrap()
    }

    #[test]
    fn gl1_points_are_thirds() {
        let pts = enumerate_f_rho(&gl1(3)).unwrap();
        let vs: Vec<QVec> = pts.iter().map(|p| p.v.clone()).collect();
        assert_eq!(vs, vec![vec![q(0)], vec![qf(1, 3)], vec![qf(2, 3)]]);
        assert!(pts.iter().all(|p| p.regular));
        assert_eq!(pts.iter().map(|p| p.orbit).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn a1_points_and_orbits() {
        for k in 1..5 {
            let level = a1(k);
            let pts = enumerate_f_rho(&level).unwrap();
            assert_eq!(pts.len() as i64, 2 * (k + 2));
            assert_eq!(pts.iter().filter(|p| !p.regular).count(), 2);
            let reps = regular_orbit_representatives(&level, &pts).unwrap();
            assert_eq!(reps.len() as i64, k + 1);
        }
    }

    #[test]
    fn calibration_is_unique() {
        assert_eq!(calibrate().unwrap(), Orientation::CALIBRATED);
    }

    #[test]
    fn abelian_law_small() {
        let r = tw_index(&gl1(3), 2, None, &[], Trunc::new(0, 0, 0)).unwrap();
        assert_eq!(r.constant_term().unwrap().0, 9);
    }

    #[test]
    fn inadmissible_level_is_rejected() {
        let level = gl1(-2);
        assert!(!level.admissible);
        assert!(matches!(tw_index(&level, 0, None, &[], Trunc::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn translated_rho_shifts_points() {
        // h′ = −3 on GL1 with an artificial ρ = 1/2: points move by (h′)⁻¹ρ.
        let mut level = gl1(3);
        level.rho = vec![qf(1, 2)];
        let pts = enumerate_f_rho(&level).unwrap();
        let vs: Vec<QVec> = pts.iter().map(|p| p.v.clone()).collect();
        assert_eq!(vs, vec![vec![qf(1, 6)], vec![qf(1, 2)], vec![qf(5, 6)]]);
    }

    #[test]
    fn vortex_with_character_matches_binomials() {
        // Level 1, X of weight 1, U′ of weight u: I_d = C(u, d)·t^{u−d}.
        let x = WeightedRep::from_i64(&[(vec![1], 1)]);
        let u = 4;
        let up = WeightedRep::from_i64(&[(vec![u], 1)]);
        let r = full_index_formula(&gl1(1), 0, &WeightedRep::empty(), Some(&up), &x, Trunc::new(6, 0, 0)).unwrap();
        for d in 0..=4 {
            let got = r.index_at(&qvec(&[d]));
            let want = num_integer::binomial(u, d);
            assert_eq!(got.get(&(u - d, 0, 0)).copied().unwrap_or(0), want, "d = {d}");
        }
    }
}

