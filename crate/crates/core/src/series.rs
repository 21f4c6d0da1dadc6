// SPDX-License-Identifier: MIT OR Apache-2.0
//! Truncated power series in the formal variables `t`, `s`, `q`, with Laurent
//! monomials `z^μ` as coefficients, and a Newton solver for series-valued
//! fixed points.
//!
//! Truncation is per variable: a term `t^a s^b q^c z^μ` is kept when
//! `a <= K_t`, `b <= K_s` and `c <= K_q`. The `z` exponents are unrestricted.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::linalg::Q;
use crate::scalar::{precision_floor, Cx};
use crate::{Error, Result};

pub const VAR_NAMES: [&str; 3] = ["t", "s", "q"];

/// Per-variable truncation orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Trunc {
    pub t: u32,
    pub s: u32,
    pub q: u32,
}

impl Trunc {
    pub fn new(t: u32, s: u32, q: u32) -> Trunc {
        Trunc { t, s, q }
    }

    pub fn caps(&self) -> [u32; 3] {
        [self.t, self.s, self.q]
    }

    /// Total degree bound; every product of this many ideal elements vanishes.
    pub fn total(&self) -> u32 {
        self.t + self.s + self.q
    }

    pub fn admits(&self, e: &[u32; 3]) -> bool {
        e.iter().zip(self.caps()).all(|(a, c)| *a <= c)
    }

    /// Componentwise `<=`.
    pub fn fits_in(&self, o: &Trunc) -> bool {
        self.t <= o.t && self.s <= o.s && self.q <= o.q
    }
}

impl Default for Trunc {
    fn default() -> Self {
        Trunc::new(8, 2, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub e: [u32; 3],
    pub z: Vec<i64>,
}

impl Mono {
    pub fn one(zdim: usize) -> Mono {
        Mono { e: [0; 3], z: vec![0; zdim] }
    }

    /// `var^k` with `var` indexing `t, s, q`.
    pub fn var(var: usize, k: u32, zdim: usize) -> Mono {
        let mut m = Mono::one(zdim);
        m.e[var] = k;
        m
    }

    pub fn t(k: u32, zdim: usize) -> Mono {
        Mono::var(0, k, zdim)
    }

    pub fn with_z(mut self, z: Vec<i64>) -> Mono {
        debug_assert_eq!(z.len(), self.z.len());
        self.z = z;
        self
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        Mono {
            e: [self.e[0] + o.e[0], self.e[1] + o.e[1], self.e[2] + o.e[2]],
            z: self.z.iter().zip(&o.z).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn inv_z(&self) -> Mono {
        Mono { e: self.e, z: self.z.iter().map(|a| -a).collect() }
    }

    pub fn degree(&self) -> u32 {
        self.e.iter().sum()
    }

    pub fn is_degree_zero(&self) -> bool {
        self.e == [0; 3]
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, name) in VAR_NAMES.iter().enumerate() {
            match self.e[k] {
                0 => {}
                1 => parts.push(name.to_string()),
                a => parts.push(format!("{name}^{a}")),
            }
        }
        if self.z.iter().any(|a| *a != 0) {
            let z: Vec<String> = self.z.iter().map(|a| a.to_string()).collect();
            parts.push(format!("z^({})", z.join(",")));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// One coefficient, flattened for serialization.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesTerm {
    pub t: u32,
    pub s: u32,
    pub q: u32,
    pub z: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    trunc: Trunc,
    zdim: usize,
    terms: BTreeMap<Mono, Cx>,
}

impl TruncatedSeries {
    pub fn zero(trunc: Trunc, zdim: usize) -> Self {
        TruncatedSeries { trunc, zdim, terms: BTreeMap::new() }
    }

    pub fn constant(c: Cx, trunc: Trunc, zdim: usize) -> Self {
        Self::monomial(Mono::one(zdim), c, trunc, zdim)
    }

    pub fn one(trunc: Trunc, zdim: usize) -> Self {
        Self::constant(Cx::one(), trunc, zdim)
    }

    /// `c·m`, or zero when `m` lies beyond the truncation.
    pub fn monomial(m: Mono, c: Cx, trunc: Trunc, zdim: usize) -> Self {
        assert_eq!(m.z.len(), zdim, "monomial z-dimension");
        let mut s = Self::zero(trunc, zdim);
        if trunc.admits(&m.e) && !c.is_zero() {
            s.terms.insert(m, c);
        }
        s
    }

    pub fn from_terms(trunc: Trunc, zdim: usize, terms: impl IntoIterator<Item = (Mono, Cx)>) -> Self {
        let mut s = Self::zero(trunc, zdim);
        for (m, c) in terms {
            assert_eq!(m.z.len(), zdim, "monomial z-dimension");
            if trunc.admits(&m.e) {
                s.accumulate(m, &c);
            }
        }
        s
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    pub fn zdim(&self) -> usize {
        self.zdim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Cx)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> Cx {
        self.terms.get(m).cloned().unwrap_or_else(Cx::zero)
    }

    fn accumulate(&mut self, m: Mono, c: &Cx) {
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = &*v + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(m, c.clone());
                }
            }
        }
    }

    fn compat(&self, o: &Self) -> Result<()> {
        if self.trunc != o.trunc {
            return Err(Error::Dimension(format!(
                "truncation mismatch {:?} vs {:?}",
                self.trunc, o.trunc
            )));
        }
        if self.zdim != o.zdim {
            return Err(Error::Dimension(format!("z-rank mismatch {} vs {}", self.zdim, o.zdim)));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.compat(o)?;
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.accumulate(m.clone(), c);
        }
        Ok(r)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.compat(o)?;
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.accumulate(m.clone(), &-c);
        }
        Ok(r)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.compat(o)?;
        let mut r = Self::zero(self.trunc, self.zdim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                if self.trunc.admits(&m.e) {
                    r.accumulate(m, &(c1 * c2));
                }
            }
        }
        Ok(r)
    }

    pub fn scale(&self, c: &Cx) -> Self {
        let mut r = Self::zero(self.trunc, self.zdim);
        if c.is_zero() {
            return r;
        }
        for (m, v) in &self.terms {
            r.accumulate(m.clone(), &(v * c));
        }
        r
    }

    pub fn scale_q(&self, x: &Q) -> Self {
        self.scale(&Cx::from_q(x))
    }

    /// Multiplication by a monomial, dropping whatever leaves the truncation.
    pub fn shift(&self, by: &Mono) -> Self {
        assert_eq!(by.z.len(), self.zdim, "monomial z-dimension");
        let mut r = Self::zero(self.trunc, self.zdim);
        for (m, v) in &self.terms {
            let n = m.mul(by);
            if self.trunc.admits(&n.e) {
                r.terms.insert(n, v.clone());
            }
        }
        r
    }

    /// Same coefficients under a smaller truncation.
    pub fn restrict(&self, trunc: Trunc) -> Result<Self> {
        if !trunc.fits_in(&self.trunc) {
            return Err(Error::Dimension(format!(
                "cannot restrict {:?} to larger {:?}",
                self.trunc, trunc
            )));
        }
        Ok(Self::from_terms(trunc, self.zdim, self.terms.iter().map(|(m, c)| (m.clone(), c.clone()))))
    }

    /// Embeds into a larger truncation; new coefficients are zero.
    pub fn extend(&self, trunc: Trunc) -> Result<Self> {
        if !self.trunc.fits_in(&trunc) {
            return Err(Error::Dimension(format!("cannot extend {:?} to smaller {:?}", self.trunc, trunc)));
        }
        Ok(TruncatedSeries { trunc, zdim: self.zdim, terms: self.terms.clone() })
    }

    /// Partial derivative in `t` (var 0), `s` (1) or `q` (2).
    pub fn derivative(&self, var: usize) -> Self {
        let mut r = Self::zero(self.trunc, self.zdim);
        for (m, c) in &self.terms {
            let a = m.e[var];
            if a == 0 {
                continue;
            }
            let mut n = m.clone();
            n.e[var] -= 1;
            r.accumulate(n, &c.scale_q(&Q::from_integer(a.into())));
        }
        r
    }

    /// The part of total degree zero in `t, s, q`.
    pub fn degree_zero(&self) -> Self {
        let mut r = Self::zero(self.trunc, self.zdim);
        for (m, c) in &self.terms {
            if m.is_degree_zero() {
                r.terms.insert(m.clone(), c.clone());
            }
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Cx::abs_f64).fold(0.0, f64::max)
    }

    /// Writes `self = c·z^μ·(1 + u)` with `u` in the ideal `(t, s, q)`.
    fn split_unit(&self) -> Result<(Cx, Mono, Self)> {
        let deg0: Vec<_> = self.terms.iter().filter(|(m, _)| m.is_degree_zero()).collect();
        let (lead, c) = match deg0.as_slice() {
            [(m, c)] if c.abs_f64() > precision_floor() => ((*m).clone(), (*c).clone()),
            [] => return Err(Error::Precondition("vanishing constant term".into())),
            [_] => return Err(Error::Precondition("constant term below precision floor".into())),
            _ => {
                return Err(Error::Precondition(
                    "constant term is not a single Laurent monomial".into(),
                ))
            }
        };
        let inv_c = c.recip()?;
        let inv_lead = lead.inv_z();
        let mut u = Self::zero(self.trunc, self.zdim);
        for (m, v) in &self.terms {
            if m.is_degree_zero() {
                continue;
            }
            u.terms.insert(m.mul(&inv_lead), v * &inv_c);
        }
        Ok((c, lead, u))
    }

    /// `Σ_k coeffs(k)·u^k` for `u` nilpotent; the sum stops once `u^k` vanishes.
    fn nilpotent_sum(u: &Self, coeff: impl Fn(u32) -> Cx) -> Self {
        let mut acc = Self::constant(coeff(0), u.trunc, u.zdim);
        let mut pow = Self::one(u.trunc, u.zdim);
        for k in 1..=u.trunc.total() {
            pow = &pow * u;
            if pow.is_empty() {
                break;
            }
            acc = &acc + &pow.scale(&coeff(k));
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self> {
        let (c, lead, u) = self.split_unit()?;
        let inv_c = c.recip()?;
        let geo = Self::nilpotent_sum(&u, |k| if k % 2 == 0 { Cx::one() } else { -Cx::one() });
        Ok(geo.shift(&lead.inv_z()).scale(&inv_c))
    }

    /// Exponential; the degree-zero part must be a constant (no `z`).
    pub fn exp(&self) -> Result<Self> {
        let c0 = self.coeff(&Mono::one(self.zdim));
        let mut u = self.clone();
        u.terms.remove(&Mono::one(self.zdim));
        if u.terms.keys().any(Mono::is_degree_zero) {
            return Err(Error::Precondition("exp of a series with z-dependent constant term".into()));
        }
        let fact = |k: u32| -> Cx {
            let mut f = Q::from_integer(1.into());
            for j in 2..=k {
                f /= Q::from_integer(j.into());
            }
            Cx::from_q(&f)
        };
        Ok(Self::nilpotent_sum(&u, fact).scale(&c0.exp()))
    }

    /// Principal logarithm; the degree-zero part must be a nonzero constant.
    pub fn log(&self) -> Result<Self> {
        let (c, lead, u) = self.split_unit()?;
        if lead.z.iter().any(|a| *a != 0) {
            return Err(Error::Precondition("log of a series with a z-monomial constant term".into()));
        }
        let coeff = |k: u32| -> Cx {
            if k == 0 {
                return Cx::zero();
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            Cx::from_q(&Q::new(sign.into(), k.into()))
        };
        let mut r = Self::nilpotent_sum(&u, coeff);
        r.accumulate(Mono::one(self.zdim), &c.ln()?);
        Ok(r)
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(self.trunc, self.zdim);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// `exp(e·log self)`.
    pub fn pow(&self, e: &Self) -> Result<Self> {
        self.compat(e)?;
        (&self.log()? * e).exp()
    }

    /// Flattened coefficients in monomial order.
    pub fn coefficients(&self) -> Vec<SeriesTerm> {
        self.terms
            .iter()
            .map(|(m, c)| SeriesTerm {
                t: m.e[0],
                s: m.e[1],
                q: m.e[2],
                z: m.z.clone(),
                re: c.re_f64(),
                im: c.im_f64(),
            })
            .collect()
    }

    /// Sorted human-readable rendering, dropping coefficients below `eps`.
    pub fn render(&self, eps: f64) -> String {
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            if c.abs_f64() <= eps {
                continue;
            }
            let (re, im) = (c.re_f64(), c.im_f64());
            let coef = if im.abs() <= eps {
                format!("{re}")
            } else if re.abs() <= eps {
                format!("{im}i")
            } else {
                format!("({re}{im:+}i)")
            };
            parts.push(format!("{coef}*{m}"));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(0.0))
    }
}

// Operator forms panic on mismatched truncations; use the `try_` methods on
// untrusted inputs.
impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, o: &TruncatedSeries) -> TruncatedSeries {
        self.try_add(o).expect("series add")
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, o: &TruncatedSeries) -> TruncatedSeries {
        self.try_sub(o).expect("series sub")
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, o: &TruncatedSeries) -> TruncatedSeries {
        self.try_mul(o).expect("series mul")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(&-Cx::one())
    }
}

pub type SeriesVector = Vec<TruncatedSeries>;

/// Square matrix of series sharing one truncation and z-rank.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    n: usize,
    rows: Vec<Vec<TruncatedSeries>>,
}

impl SeriesMatrix {
    pub fn zero(n: usize, trunc: Trunc, zdim: usize) -> Self {
        SeriesMatrix { n, rows: vec![vec![TruncatedSeries::zero(trunc, zdim); n]; n] }
    }

    pub fn identity(n: usize, trunc: Trunc, zdim: usize) -> Self {
        let mut m = Self::zero(n, trunc, zdim);
        for i in 0..n {
            m.rows[i][i] = TruncatedSeries::one(trunc, zdim);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<TruncatedSeries>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("series matrix is not square".into()));
        }
        if let Some(first) = rows.first().and_then(|r| r.first()) {
            for x in rows.iter().flatten() {
                first.compat(x)?;
            }
        }
        Ok(SeriesMatrix { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: TruncatedSeries) {
        self.rows[i][j] = v;
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::Dimension("series matrix sizes differ".into()));
        }
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                let mut acc = TruncatedSeries::zero(self.rows[i][0].trunc, self.rows[i][0].zdim);
                for k in 0..self.n {
                    acc = acc.try_add(&self.rows[i][k].try_mul(&o.rows[k][j])?)?;
                }
                row.push(acc);
            }
            rows.push(row);
        }
        Ok(SeriesMatrix { n: self.n, rows })
    }

    pub fn mul_vec(&self, v: &[TruncatedSeries]) -> Result<SeriesVector> {
        if v.len() != self.n {
            return Err(Error::Dimension("series vector length".into()));
        }
        (0..self.n)
            .map(|i| {
                let mut acc = v[0].scale(&Cx::zero());
                for k in 0..self.n {
                    acc = acc.try_add(&self.rows[i][k].try_mul(&v[k])?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// Row index `>= k` whose column-`k` entry has the largest invertible constant term.
    fn pivot(rows: &[Vec<TruncatedSeries>], k: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (r, row) in rows.iter().enumerate().skip(k) {
            let d0 = row[k].degree_zero();
            if d0.len() != 1 {
                continue;
            }
            let a = d0.max_abs();
            if a > precision_floor() && best.is_none_or(|(_, b)| a > b) {
                best = Some((r, a));
            }
        }
        best.map(|(r, _)| r)
    }

    /// Gaussian elimination on `self`, mirrored onto `aug` when given.
    /// Returns the determinant.
    fn eliminate(&self, mut aug: Option<&mut Vec<Vec<TruncatedSeries>>>) -> Result<TruncatedSeries> {
        let n = self.n;
        let mut a = self.rows.clone();
        let mut det = match a.first() {
            Some(r) => TruncatedSeries::one(r[0].trunc, r[0].zdim),
            None => return Ok(TruncatedSeries::one(Trunc::new(0, 0, 0), 0)),
        };
        for k in 0..n {
            let p = Self::pivot(&a, k).ok_or_else(|| {
                Error::Singular(format!("no invertible constant-term pivot in column {k}"))
            })?;
            if p != k {
                a.swap(p, k);
                if let Some(b) = aug.as_deref_mut() {
                    b.swap(p, k);
                }
                det = -&det;
            }
            det = &det * &a[k][k];
            let inv = a[k][k].inverse()?;
            for j in 0..n {
                a[k][j] = &a[k][j] * &inv;
            }
            if let Some(b) = aug.as_deref_mut() {
                for j in 0..n {
                    b[k][j] = &b[k][j] * &inv;
                }
            }
            for i in 0..n {
                if i == k || (aug.is_none() && i < k) || a[i][k].is_empty() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..n {
                    let d = &f * &a[k][j];
                    a[i][j] = &a[i][j] - &d;
                }
                if let Some(b) = aug.as_deref_mut() {
                    for j in 0..n {
                        let d = &f * &b[k][j];
                        b[i][j] = &b[i][j] - &d;
                    }
                }
            }
        }
        Ok(det)
    }

    pub fn det(&self) -> Result<TruncatedSeries> {
        self.eliminate(None)
    }

    /// Inverse, pivoting only on entries with invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        if self.n == 0 {
            return Ok(self.clone());
        }
        let mut b = Self::identity(self.n, self.rows[0][0].trunc, self.rows[0][0].zdim).rows;
        self.eliminate(Some(&mut b))?;
        Ok(SeriesMatrix { n: self.n, rows: b })
    }
}

/// Output of [`solve_fixed_point`].
#[derive(Clone, Debug)]
pub struct FixedPoint {
    /// Correction `ξ − ξ₀`, with zero constant term.
    pub delta: SeriesVector,
    pub iterations: usize,
    pub residual: f64,
}

/// Newton iteration for `F(ξ₀ + δ) = 0` in the ideal `(t, s, q)`.
///
/// `system(δ)` returns the residual `F(ξ₀ + δ)` and its Jacobian. Each step
/// at least doubles the valuation of the residual, so the iteration stops
/// within `⌈log₂(D+1)⌉ + 2` steps, `D` being the total truncation degree.
pub fn solve_fixed_point<F>(n: usize, trunc: Trunc, zdim: usize, system: F) -> Result<FixedPoint>
where
    F: Fn(&[TruncatedSeries]) -> Result<(SeriesVector, SeriesMatrix)>,
{
    let cap = (u64::from(trunc.total()) + 1).next_power_of_two().trailing_zeros() as usize + 2;
    let tol = precision_floor();
    let mut delta = vec![TruncatedSeries::zero(trunc, zdim); n];
    for it in 0..=cap {
        let (f, j) = system(&delta)?;
        if f.len() != n || j.n() != n {
            return Err(Error::Dimension("fixed point system size".into()));
        }
        if it == 0 {
            let r0 = f.iter().map(|x| x.degree_zero().max_abs()).fold(0.0, f64::max);
            if r0 > tol {
                return Err(Error::Precondition(format!(
                    "base point is not a solution (residual {r0:e})"
                )));
            }
        }
        let r = f.iter().map(TruncatedSeries::max_abs).fold(0.0, f64::max);
        if r <= tol {
            return Ok(FixedPoint { delta, iterations: it, residual: r });
        }
        if it == cap {
            return Err(Error::NonConvergence(format!("residual {r:e} after {cap} Newton steps")));
        }
        let step = j.inverse()?.mul_vec(&f)?;
        delta = delta.iter().zip(&step).map(|(d, s)| d - s).collect();
    }
    unreachable!("loop returns by the iteration cap")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tq(k: u32) -> Trunc {
        Trunc::new(k, 0, 0)
    }

    fn poly(tr: Trunc, cs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            tr,
            0,
            cs.iter().enumerate().map(|(k, c)| (Mono::t(k as u32, 0), Cx::from_i64(*c))),
        )
    }

    fn close(a: &TruncatedSeries, b: &TruncatedSeries) -> bool {
        (a - b).max_abs() < 1e-25
    }

    #[test]
    fn product_truncates() {
        let tr = tq(2);
        assert!(close(&(&poly(tr, &[1, 1]) * &poly(tr, &[1, -1])), &poly(tr, &[1, 0, -1])));
        let t3 = TruncatedSeries::monomial(Mono::t(3, 0), Cx::one(), tr, 0);
        assert!(t3.is_empty());
    }

    #[test]
    fn z_exponents_merge() {
        let tr = tq(1);
        let a = TruncatedSeries::monomial(Mono::one(2).with_z(vec![1, -2]), Cx::one(), tr, 2);
        let b = TruncatedSeries::monomial(Mono::one(2).with_z(vec![3, 5]), Cx::from_i64(2), tr, 2);
        let p = &a * &b;
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&Mono::one(2).with_z(vec![4, 3])), Cx::from_i64(2));
    }

    #[test]
    fn log_one_minus_t() {
        let tr = tq(3);
        let l = poly(tr, &[1, -1]).log().unwrap();
        let want = TruncatedSeries::from_terms(
            tr,
            0,
            (1..=3).map(|k| (Mono::t(k, 0), Cx::from_q(&Q::new((-1).into(), k.into())))),
        );
        assert!(close(&l, &want));
    }

    #[test]
    fn inverse_is_geometric() {
        let tr = tq(5);
        let inv = poly(tr, &[1, 1]).inverse().unwrap();
        assert!(close(&inv, &poly(tr, &[1, -1, 1, -1, 1, -1])));
        assert!(close(&poly(tr, &[1, 1]).powi(-1).unwrap(), &inv));
    }

    #[test]
    fn exp_log_round_trip() {
        let tr = tq(6);
        let x = poly(tr, &[1, 2]);
        assert!(close(&x.log().unwrap().exp().unwrap(), &x));
    }

    #[test]
    fn vanishing_constant_term_is_rejected() {
        let x = poly(tq(3), &[0, 1]);
        assert!(matches!(x.log(), Err(Error::Precondition(_))));
        assert!(matches!(x.inverse(), Err(Error::Precondition(_))));
    }

    #[test]
    fn mismatched_truncations_are_rejected() {
        let a = poly(tq(2), &[1]);
        let b = poly(tq(3), &[1]);
        assert!(matches!(a.try_add(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn derivative_commutes_with_exp() {
        let tr = tq(6);
        let x = poly(tr, &[0, 3, -1, 2]);
        let lhs = x.exp().unwrap().derivative(0);
        let rhs = &x.exp().unwrap() * &x.derivative(0);
        // Agreement holds below the top order, which the derivative loses.
        assert!(close(&lhs.restrict(tq(5)).unwrap(), &rhs.restrict(tq(5)).unwrap()));
    }

    fn lambert_system(tr: Trunc) -> impl Fn(&[TruncatedSeries]) -> Result<(SeriesVector, SeriesMatrix)> {
        move |d: &[TruncatedSeries]| {
            let t = TruncatedSeries::monomial(Mono::t(1, 0), Cx::one(), tr, 0);
            let te = &t * &d[0].exp()?;
            let f = &d[0].scale(&Cx::from_i64(2)) + &te;
            let j = &TruncatedSeries::constant(Cx::from_i64(2), tr, 0) + &te;
            Ok((vec![f], SeriesMatrix::from_rows(vec![vec![j]])?))
        }
    }

    #[test]
    fn one_dimensional_fixed_point() {
        let tr = tq(8);
        let sol = solve_fixed_point(1, tr, 0, lambert_system(tr)).unwrap();
        let x = &sol.delta[0];
        assert!(close(
            &x.restrict(tq(3)).unwrap(),
            &TruncatedSeries::from_terms(
                tq(3),
                0,
                [(1, Q::new((-1).into(), 2.into())), (2, Q::new(1.into(), 4.into())), (3, Q::new((-3).into(), 16.into()))]
                    .into_iter()
                    .map(|(k, c)| (Mono::t(k, 0), Cx::from_q(&c)))
            )
        ));
        let (f, _) = lambert_system(tr)(&sol.delta).unwrap();
        assert!(f[0].max_abs() < 1e-25);
    }

    #[test]
    fn zero_perturbation_keeps_base_point() {
        let tr = tq(4);
        let sol = solve_fixed_point(2, tr, 0, |d: &[TruncatedSeries]| {
            let m = SeriesMatrix::identity(2, tr, 0);
            Ok((m.mul_vec(d)?, m))
        })
        .unwrap();
        assert!(sol.delta.iter().all(TruncatedSeries::is_empty));
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn raising_truncation_extends_solution() {
        let lo = solve_fixed_point(1, tq(8), 0, lambert_system(tq(8))).unwrap();
        let hi = solve_fixed_point(1, tq(12), 0, lambert_system(tq(12))).unwrap();
        assert!(close(&hi.delta[0].restrict(tq(8)).unwrap(), &lo.delta[0]));
    }

    #[test]
    fn matrix_inverse_round_trip() {
        let tr = tq(4);
        let rows = vec![
            vec![poly(tr, &[0, 1, 2]), poly(tr, &[2, 0, 1])],
            vec![poly(tr, &[3, -1]), poly(tr, &[1, 1, 1, 1])],
        ];
        let m = SeriesMatrix::from_rows(rows).unwrap();
        let p = m.mul(&m.inverse().unwrap()).unwrap();
        let id = SeriesMatrix::identity(2, tr, 0);
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(p.get(i, j), id.get(i, j)));
            }
        }
        // det = (t + 2t²)(1 + t + t² + t³) − (2 + t²)(3 − t)
        let want = &(&poly(tr, &[0, 1, 2]) * &poly(tr, &[1, 1, 1, 1])) - &(&poly(tr, &[2, 0, 1]) * &poly(tr, &[3, -1]));
        assert!(close(&m.det().unwrap(), &want));
    }
}
