//! Binary floating point at configurable precision, backed by `astro-float`,
//! with a minimal complex type on top.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat as Raw, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

const RM: RoundingMode = RoundingMode::ToEven;

/// Smallest precision (in bits) accepted anywhere.
pub const MIN_PRECISION: usize = 64;
pub const DEFAULT_PRECISION: usize = 256;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("allocating the constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// A real number carried at a fixed binary precision, rounding to nearest.
#[derive(Clone)]
pub struct BigFloat {
    v: Raw,
    prec: usize,
}

impl BigFloat {
    fn wrap(v: Raw, prec: usize) -> Self {
        BigFloat { v, prec }
    }

    fn clamp_prec(prec: usize) -> usize {
        prec.max(MIN_PRECISION)
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        let prec = Self::clamp_prec(prec);
        Self::wrap(Raw::from_i64(n, prec), prec)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        let prec = Self::clamp_prec(prec);
        Self::wrap(Raw::from_f64(x, prec), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        let prec = Self::clamp_prec(prec);
        let (sign, digits) = n.to_u64_digits();
        let base = Raw::from_u64(1 << 32, prec).mul(&Raw::from_u64(1 << 32, prec), prec, RM);
        let mut acc = Raw::from_u64(0, prec);
        for d in digits.iter().rev() {
            acc = acc.mul(&base, prec, RM).add(&Raw::from_u64(*d, prec), prec, RM);
        }
        if sign == num_bigint::Sign::Minus {
            acc = acc.neg();
        }
        Self::wrap(acc, prec)
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        BigFloat::div(&Self::from_bigint(q.numer(), prec), &Self::from_bigint(q.denom(), prec))
    }

    /// `n / d` rounded once.
    pub fn from_ratio(n: i64, d: i64, prec: usize) -> Self {
        BigFloat::div(&Self::from_i64(n, prec), &Self::from_i64(d, prec))
    }

    pub fn pi(prec: usize) -> Self {
        let prec = Self::clamp_prec(prec);
        Self::wrap(with_consts(|cc| cc.pi(prec, RM)), prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    /// The same value rounded to a new working precision.
    pub fn with_precision(&self, prec: usize) -> Self {
        let prec = Self::clamp_prec(prec);
        let mut v = self.v.clone();
        // Only fails on NaN/inf payloads, which keep their meaning.
        let _ = v.set_precision(prec, RM);
        Self::wrap(v, prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        Self::wrap(self.v.add(&o.v, p, RM), p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        Self::wrap(self.v.sub(&o.v, p, RM), p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        Self::wrap(self.v.mul(&o.v, p, RM), p)
    }

    pub fn div(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        Self::wrap(self.v.div(&o.v, p, RM), p)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self::wrap(self.v.mul(&Raw::from_i64(k, 64), self.prec, RM), self.prec)
    }

    pub fn neg(&self) -> Self {
        Self::wrap(-self.v.clone(), self.prec)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.prec)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.exp(p, RM, cc)), p)
    }

    /// Natural logarithm; NaN for non-positive input.
    pub fn ln(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.ln(p, RM, cc)), p)
    }

    pub fn sin(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.sin(p, RM, cc)), p)
    }

    pub fn cos(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.cos(p, RM, cc)), p)
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.v.powi(n, self.prec, RM), self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    /// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero and non-finite values.
    pub fn exponent(&self) -> Option<i64> {
        if self.v.is_zero() || !self.is_finite() {
            return None;
        }
        self.v.exponent().map(|e| e as i64)
    }

    /// Nearest `f64` (may overflow to infinity or underflow to zero).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        match self.v.as_raw_parts() {
            None => f64::NAN,
            Some((words, _, sign, exp, _)) => {
                if self.v.is_zero() {
                    return 0.0;
                }
                let top = *words.last().unwrap_or(&0) as f64;
                let mag = top * 2f64.powi(exp.saturating_sub(64).max(-1100));
                if sign == Sign::Neg {
                    -mag
                } else {
                    mag
                }
            }
        }
    }

    /// `log2 |x|` as an `f64`, valid far outside the `f64` exponent range.
    pub fn log2_abs(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((words, _, _, exp, _)) if !self.v.is_zero() => {
                let top = *words.last().unwrap_or(&1) as f64;
                top.log2() - 64.0 + exp as f64
            }
            _ => f64::NEG_INFINITY,
        }
    }

    /// Nearest integer as `i64` (saturating), for already-small values.
    pub fn round_to_i64(&self) -> i64 {
        self.to_f64().round() as i64
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}[{}b]", self.to_f64(), self.prec)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = f.precision() {
            write!(f, "{:.*}", p, self.to_f64())
        } else {
            write!(f, "{}", self.to_f64())
        }
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $m(self, o: &BigFloat) -> BigFloat {
                BigFloat::$m(self, o)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat::neg(self)
    }
}

/// A complex number as a pair of [`BigFloat`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBig {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl ComplexBig {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        ComplexBig { re, im }
    }

    pub fn zero(prec: usize) -> Self {
        Self::new(BigFloat::zero(prec), BigFloat::zero(prec))
    }

    pub fn one(prec: usize) -> Self {
        Self::new(BigFloat::one(prec), BigFloat::zero(prec))
    }

    pub fn from_real(re: BigFloat) -> Self {
        let p = re.precision();
        Self::new(re, BigFloat::zero(p))
    }

    /// `e^{i theta}`.
    pub fn cis(theta: &BigFloat) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    /// `e^{2 pi i k / n}`, with `k` reduced first so the argument stays small.
    pub fn root_of_unity(k: i64, n: u64, prec: usize) -> Self {
        let k = k.rem_euclid(n as i64);
        if k == 0 {
            return Self::one(prec);
        }
        let theta = BigFloat::div(
            &BigFloat::pi(prec + 16).mul_i64(2 * k),
            &BigFloat::from_i64(n as i64, prec + 16),
        );
        let c = Self::cis(&theta);
        Self::new(c.re.with_precision(prec), c.im.with_precision(prec))
    }

    pub fn precision(&self) -> usize {
        self.re.precision().max(self.im.precision())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }

    pub fn div(&self, o: &Self) -> Self {
        let den = o.norm_sqr();
        let num = self.mul(&o.conj());
        Self::new(&num.re / &den, &num.im / &den)
    }

    pub fn scale(&self, s: &BigFloat) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self::new(self.re.mul_i64(k), self.im.mul_i64(k))
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.re, -&self.im)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> BigFloat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt()
    }

    /// `e^{z}`.
    pub fn exp(&self) -> Self {
        Self::cis(&self.im).scale(&self.re.exp())
    }

    pub fn with_precision(&self, prec: usize) -> Self {
        Self::new(self.re.with_precision(prec), self.im.with_precision(prec))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for ComplexBig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64_pair();
        if im.is_sign_negative() {
            write!(f, "{re:.12} - {:.12}i", -im)
        } else {
            write!(f, "{re:.12} + {im:.12}i")
        }
    }
}

/// `|a - b| <= tol` for reals.
pub fn close(a: &BigFloat, b: &BigFloat, tol: &BigFloat) -> bool {
    (a - b).abs() <= *tol
}

/// Rational approximation used by tests and reports: `x` must be finite.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_negative() {
        -rational_to_f64(&-q)
    } else {
        BigFloat::from_rational(q, 128).to_f64()
    }
}
