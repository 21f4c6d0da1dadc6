// SPDX-License-Identifier: MIT OR Apache-2.0
//! Multiprecision complex scalars.
//!
//! The working precision is process-wide (default 128 mantissa bits). Base points of
//! the index engine are rational multiples of `2πi`, so the only transcendental
//! values needed are roots of unity; quarter turns are produced exactly.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::linalg::Q;
use crate::{Error, Result};

pub const DEFAULT_PRECISION: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;
const GUARD: usize = 64;

static PRECISION: AtomicUsize = AtomicUsize::new(DEFAULT_PRECISION);

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Sets the mantissa width in bits for every subsequent operation.
pub fn set_precision(bits: usize) -> Result<()> {
    if !(64..=8192).contains(&bits) {
        return Err(Error::Precondition(format!("precision must be in 64..=8192 bits, got {bits}")));
    }
    PRECISION.store(bits, Ordering::SeqCst);
    Ok(())
}

pub fn precision() -> usize {
    PRECISION.load(Ordering::SeqCst)
}

/// Magnitude below which a coefficient counts as numerically zero at the current precision.
pub fn precision_floor() -> f64 {
    2f64.powi(-((precision() * 3 / 4) as i32))
}

fn with_cc<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

fn real_from_bigint(n: &BigInt, p: usize) -> BigFloat {
    match n.to_i64() {
        Some(k) => BigFloat::from_i64(k, p),
        None => with_cc(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, p, RM, cc)),
    }
}

fn real_from_q(x: &Q, p: usize) -> BigFloat {
    let n = real_from_bigint(x.numer(), p + GUARD);
    let d = real_from_bigint(x.denom(), p + GUARD);
    n.div(&d, p, RM)
}

fn real_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    // Display renders a decimal scientific string that f64 parsing accepts.
    format!("{x}").parse::<f64>().unwrap_or(f64::NAN)
}

/// A complex number with multiprecision real and imaginary parts.
#[derive(Clone, Debug)]
pub struct Cx {
    re: BigFloat,
    im: BigFloat,
}

impl Cx {
    pub fn zero() -> Cx {
        let p = precision();
        Cx { re: BigFloat::from_i64(0, p), im: BigFloat::from_i64(0, p) }
    }

    pub fn one() -> Cx {
        Cx::from_i64(1)
    }

    pub fn from_i64(k: i64) -> Cx {
        let p = precision();
        Cx { re: BigFloat::from_i64(k, p), im: BigFloat::from_i64(0, p) }
    }

    pub fn from_q(x: &Q) -> Cx {
        let p = precision();
        Cx { re: real_from_q(x, p), im: BigFloat::from_i64(0, p) }
    }

    pub fn from_f64(re: f64, im: f64) -> Cx {
        let p = precision();
        Cx { re: BigFloat::from_f64(re, p), im: BigFloat::from_f64(im, p) }
    }

    pub fn i() -> Cx {
        let p = precision();
        Cx { re: BigFloat::from_i64(0, p), im: BigFloat::from_i64(1, p) }
    }

    /// `e^{2πi r}`. Multiples of a quarter turn are exact.
    pub fn root_of_unity(r: &Q) -> Cx {
        let one = Q::from_integer(1.into());
        let frac = r - r.floor();
        let four = &frac * Q::from_integer(4.into());
        if four.is_integer() {
            return match four.to_integer().mod_floor(&BigInt::from(4)).to_i64().unwrap_or(0) {
                0 => Cx::one(),
                1 => Cx::i(),
                2 => Cx::from_i64(-1),
                _ => -Cx::i(),
            };
        }
        debug_assert!(frac < one);
        let p = precision();
        let wp = p + GUARD;
        let angle = with_cc(|cc| {
            let pi = cc.pi(wp, RM);
            pi.mul(&BigFloat::from_i64(2, wp), wp, RM).mul(&real_from_q(&frac, wp), wp, RM)
        });
        let (c, s) = with_cc(|cc| (angle.cos(wp, RM, cc), angle.sin(wp, RM, cc)));
        Cx { re: round_to(&c, p), im: round_to(&s, p) }
    }

    pub fn re_f64(&self) -> f64 {
        real_to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        real_to_f64(&self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `|z|²` at working precision.
    pub fn norm_sqr(&self) -> BigFloat {
        let p = precision();
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn abs_f64(&self) -> f64 {
        let p = precision();
        real_to_f64(&self.norm_sqr().sqrt(p, RM))
    }

    pub fn conj(&self) -> Cx {
        Cx { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale_q(&self, x: &Q) -> Cx {
        let p = precision();
        let r = real_from_q(x, p);
        Cx { re: self.re.mul(&r, p, RM), im: self.im.mul(&r, p, RM) }
    }

    pub fn div(&self, o: &Cx) -> Result<Cx> {
        let p = precision();
        let den = o.norm_sqr();
        if den.is_zero() {
            return Err(Error::Singular("complex division by zero".into()));
        }
        let num = self * &o.conj();
        Ok(Cx { re: num.re.div(&den, p, RM), im: num.im.div(&den, p, RM) })
    }

    pub fn recip(&self) -> Result<Cx> {
        Cx::one().div(self)
    }

    pub fn powi(&self, n: i64) -> Result<Cx> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Cx::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Cx {
        let p = precision();
        let wp = p + GUARD;
        let (m, c, s) = with_cc(|cc| (self.re.exp(wp, RM, cc), self.im.cos(wp, RM, cc), self.im.sin(wp, RM, cc)));
        Cx { re: round_to(&m.mul(&c, wp, RM), p), im: round_to(&m.mul(&s, wp, RM), p) }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<Cx> {
        if self.is_zero() {
            return Err(Error::Precondition("logarithm of zero".into()));
        }
        let p = precision();
        let wp = p + GUARD;
        let modulus = with_cc(|cc| self.norm_sqr().ln(wp, RM, cc).div(&BigFloat::from_i64(2, wp), wp, RM));
        let arg = self.arg(wp);
        Ok(Cx { re: round_to(&modulus, p), im: round_to(&arg, p) })
    }

    fn arg(&self, wp: usize) -> BigFloat {
        let pi = with_cc(|cc| cc.pi(wp, RM));
        let half_pi = pi.div(&BigFloat::from_i64(2, wp), wp, RM);
        if self.re.is_zero() {
            return if self.im.is_negative() { -half_pi } else { half_pi };
        }
        let base = with_cc(|cc| self.im.div(&self.re, wp, RM).atan(wp, RM, cc));
        if self.re.is_positive() {
            base
        } else if self.im.is_negative() {
            base.sub(&pi, wp, RM)
        } else {
            base.add(&pi, wp, RM)
        }
    }

    /// Nearest integer to the real part, with `|z − n|` as the residual.
    pub fn nearest_integer(&self) -> Result<(i64, f64)> {
        let re = self.re_f64();
        if !re.is_finite() || re.abs() > 9.0e15 {
            return Err(Error::IntegerGate(format!("value {re} is out of range")));
        }
        let n = re.round() as i64;
        let diff = self - &Cx::from_i64(n);
        Ok((n, diff.abs_f64()))
    }

    /// Decimal rendering of the real and imaginary parts.
    pub fn render(&self, digits: usize) -> (String, String) {
        (fmt_real(&self.re, digits), fmt_real(&self.im, digits))
    }
}

fn round_to(x: &BigFloat, p: usize) -> BigFloat {
    let mut y = x.clone();
    // Lowering precision of a finite value cannot fail.
    let _ = y.set_precision(p, RM);
    y
}

fn fmt_real(x: &BigFloat, digits: usize) -> String {
    let f = real_to_f64(x);
    if f == 0.0 {
        "0".into()
    } else {
        format!("{f:.digits$e}")
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.re_f64(), self.im_f64())
    }
}

impl PartialEq for Cx {
    fn eq(&self, o: &Cx) -> bool {
        self.re.cmp(&o.re) == Some(0) && self.im.cmp(&o.im) == Some(0)
    }
}

impl Add for &Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        let p = precision();
        Cx { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM) }
    }
}

impl Sub for &Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        let p = precision();
        Cx { re: self.re.sub(&o.re, p, RM), im: self.im.sub(&o.im, p, RM) }
    }
}

impl Mul for &Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        let p = precision();
        let rr = self.re.mul(&o.re, p, RM);
        let ii = self.im.mul(&o.im, p, RM);
        let ri = self.re.mul(&o.im, p, RM);
        let ir = self.im.mul(&o.re, p, RM);
        Cx { re: rr.sub(&ii, p, RM), im: ri.add(&ir, p, RM) }
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re.clone(), im: -self.im.clone() }
    }
}

/// `|x|` as an `f64` for a rational.
pub fn q_abs_f64(x: &Q) -> f64 {
    crate::linalg::q_to_f64(&x.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qf;

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(Cx::root_of_unity(&qf(1, 4)), Cx::i());
        assert_eq!(Cx::root_of_unity(&qf(-1, 2)), Cx::from_i64(-1));
        assert_eq!(Cx::root_of_unity(&qf(7, 1)), Cx::one());
    }

    #[test]
    fn cube_root_of_unity_cubes_to_one() {
        let w = Cx::root_of_unity(&qf(1, 3));
        let c = w.powi(3).unwrap();
        assert!((&c - &Cx::one()).abs_f64() < 1e-35);
        assert!((w.re_f64() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn exp_ln_round_trip() {
        let z = Cx::from_f64(-0.75, 2.5);
        let back = z.ln().unwrap().exp();
        assert!((&back - &z).abs_f64() < 1e-33);
        let w = Cx::from_f64(-3.0, -0.5);
        assert!((&w.ln().unwrap().exp() - &w).abs_f64() < 1e-33);
    }

    #[test]
    fn division_and_rationals() {
        let a = Cx::from_q(&qf(1, 3));
        let b = a.recip().unwrap();
        assert!((&b - &Cx::from_i64(3)).abs_f64() < 1e-35);
        assert_eq!(Cx::from_i64(5).nearest_integer().unwrap().0, 5);
    }
}
