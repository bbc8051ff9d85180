//! Exact arithmetic in cyclotomic fields.
//!
//! [`CyclotomicNumber`] is the canonical form: rational coordinates in the power
//! basis of `Q[x]/Phi_E`. [`RootSum`] is the redundant integer form `sum c_j zeta_E^j`
//! used by the hot loops; it carries an exact zero test of its own and converts
//! to the canonical form on demand.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::float::{BigFloat, ComplexBig};
use super::int::{euler_phi, gcd, lcm, prime_factors};
use crate::error::{Error, Result};

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den is monic
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; num.len() - dd];
    for i in (0..q.len()).rev() {
        let c = r[i + dd];
        q[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                r[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

fn substitute_power(poly: &[i64], k: usize) -> Vec<i64> {
    let mut out = vec![0i64; (poly.len() - 1) * k + 1];
    for (i, &c) in poly.iter().enumerate() {
        out[i * k] = c;
    }
    out
}

fn compute_cyclotomic(n: u64) -> Vec<i64> {
    // Phi_n(x) = Phi_rad(x^{n/rad}); Phi_{rp}(x) = Phi_r(x^p) / Phi_r(x) for p not dividing r.
    let primes = prime_factors(n);
    let mut poly = vec![-1i64, 1];
    let mut r = 1u64;
    for &p in &primes {
        let lifted = substitute_power(&poly, p as usize);
        poly = poly_div_exact(&lifted, &poly);
        r *= p;
    }
    substitute_power(&poly, (n / r) as usize)
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of the cyclotomic polynomial `Phi_n`, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic_polynomial needs n >= 1");
    let mut cache = cyclotomic_cache().lock().expect("cyclotomic cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(compute_cyclotomic(n)))
        .clone()
}

/// Reduce a polynomial in `zeta` (coefficient of `zeta^j` at index `j`) modulo `Phi_n`.
fn reduce_bigint(mut c: Vec<BigInt>, n: u64) -> Vec<BigInt> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    if c.len() < deg {
        c.resize(deg, BigInt::zero());
        return c;
    }
    for i in (deg..c.len()).rev() {
        if c[i].is_zero() {
            continue;
        }
        let t = std::mem::take(&mut c[i]);
        for (j, &pj) in phi.iter().enumerate().take(deg) {
            if pj != 0 {
                c[i - deg + j] -= &t * pj;
            }
        }
    }
    c.truncate(deg);
    c
}

fn reduce_i128(mut c: Vec<i128>, n: u64) -> Vec<i128> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    if c.len() < deg {
        c.resize(deg, 0);
        return c;
    }
    for i in (deg..c.len()).rev() {
        let t = c[i];
        if t == 0 {
            continue;
        }
        c[i] = 0;
        for (j, &pj) in phi.iter().enumerate().take(deg) {
            c[i - deg + j] -= t * pj as i128;
        }
    }
    c.truncate(deg);
    c
}

/// An exact element of `Q(zeta_E)`.
#[derive(Clone, Serialize, Deserialize)]
pub struct CyclotomicNumber {
    order: u64,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    /// Build from power-basis coordinates; `coeffs.len()` must be `phi(order)`.
    pub fn from_coeffs(order: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        if order == 0 || coeffs.len() as u64 != euler_phi(order) {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates for order {order}",
                euler_phi(order.max(1))
            )));
        }
        Ok(CyclotomicNumber { order, coeffs })
    }

    pub fn zero(order: u64) -> Self {
        let n = euler_phi(order) as usize;
        CyclotomicNumber {
            order,
            coeffs: vec![BigRational::zero(); n],
        }
    }

    pub fn from_rational(q: BigRational, order: u64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = q;
        z
    }

    pub fn from_integer(n: i64, order: u64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()), order)
    }

    pub fn one(order: u64) -> Self {
        Self::from_integer(1, order)
    }

    /// `zeta_E^k`.
    pub fn root_of_unity(order: u64, k: i64) -> Self {
        let mut v = vec![0i64; order as usize];
        v[k.rem_euclid(order as i64) as usize] = 1;
        Self::from_exponent_coeffs(order, &v)
    }

    pub fn zeta(order: u64) -> Self {
        Self::root_of_unity(order, 1)
    }

    /// `sum_j c[j] zeta_E^j` with `j` read modulo `E`.
    pub fn from_exponent_coeffs(order: u64, c: &[i64]) -> Self {
        let mut folded = vec![0i128; order as usize];
        for (j, &x) in c.iter().enumerate() {
            folded[j % order as usize] += x as i128;
        }
        let red = reduce_i128(folded, order);
        CyclotomicNumber {
            order,
            coeffs: red
                .into_iter()
                .map(|x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        }
    }

    fn from_exponent_rationals(order: u64, c: Vec<BigRational>) -> Self {
        let (num, den) = common_denominator(&c);
        let red = reduce_bigint(num, order);
        CyclotomicNumber {
            order,
            coeffs: red
                .into_iter()
                .map(|x| BigRational::new(x, den.clone()))
                .collect(),
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, if the number lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// The same number viewed in `Q(zeta_M)` for a multiple `M` of the order.
    pub fn coerce(&self, new_order: u64) -> Result<Self> {
        if !new_order.is_multiple_of(self.order) {
            return Err(Error::InvalidInput(format!(
                "cannot coerce order {} into order {new_order}",
                self.order
            )));
        }
        if new_order == self.order {
            return Ok(self.clone());
        }
        let step = (new_order / self.order) as usize;
        let mut v = vec![BigRational::zero(); new_order as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * step] = c.clone();
        }
        Ok(Self::from_exponent_rationals(new_order, v))
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let m = lcm(a.order, b.order);
        (
            a.coerce(m).expect("lcm is a multiple"),
            b.coerce(m).expect("lcm is a multiple"),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = Self::common(self, o);
        CyclotomicNumber {
            order: a.order,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b) = Self::common(self, o);
        CyclotomicNumber {
            order: a.order,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = Self::common(self, o);
        let (na, da) = common_denominator(&a.coeffs);
        let (nb, db) = common_denominator(&b.coeffs);
        let mut prod = vec![BigInt::zero(); na.len() + nb.len()];
        for (i, x) in na.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in nb.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let den = da * db;
        let red = reduce_bigint(prod, a.order);
        CyclotomicNumber {
            order: a.order,
            coeffs: red
                .into_iter()
                .map(|x| BigRational::new(x, den.clone()))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CyclotomicNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * q).collect(),
        }
    }

    /// Image under the automorphism `zeta_E -> zeta_E^k`.
    pub fn galois(&self, k: i64) -> Result<Self> {
        let e = self.order;
        let kk = k.rem_euclid(e as i64) as u64;
        if gcd(kk, e) != 1 {
            return Err(Error::InvalidInput(format!(
                "{k} is not a unit modulo {e}"
            )));
        }
        let mut v = vec![BigRational::zero(); e as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[((i as u64 * kk) % e) as usize] += c;
        }
        Ok(Self::from_exponent_rationals(e, v))
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is always a unit")
    }

    /// Numerical value under `zeta_E -> e^{2 pi i k / E}`.
    pub fn embed(&self, k: i64, prec: usize) -> Result<ComplexBig> {
        let e = self.order;
        let kk = k.rem_euclid(e as i64) as u64;
        if gcd(kk, e) != 1 {
            return Err(Error::InvalidInput(format!(
                "embedding index {k} is not a unit modulo {e}"
            )));
        }
        let wp = prec + 32;
        let mut acc = ComplexBig::zero(wp);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = ComplexBig::root_of_unity((i as u64 * kk % e) as i64, e, wp);
            acc = acc.add(&z.scale(&BigFloat::from_rational(c, wp)));
        }
        Ok(acc.with_precision(prec))
    }

    /// Embedding at `k = 1`.
    pub fn to_complex(&self, prec: usize) -> ComplexBig {
        self.embed(1, prec).expect("1 is a unit")
    }

    /// Smallest order `M | E` with the number lying in `Q(zeta_M)` (up to the
    /// factor-two ambiguity `Q(zeta_M) = Q(zeta_{2M})` for odd `M`).
    pub fn minimal_order(&self) -> u64 {
        let mut best = self.order;
        for d in super::int::divisors(self.order) {
            if d >= best {
                break;
            }
            // The number lies in Q(zeta_d) iff it is fixed by every k = 1 mod d.
            let fixed = (0..self.order / d).all(|t| {
                let k = 1 + t * d;
                gcd(k, self.order) != 1
                    || self.galois(k as i64).map(|g| &g == self).unwrap_or(false)
            });
            if fixed {
                best = d;
            }
        }
        best
    }
}

fn common_denominator(c: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::one();
    for x in c {
        if !x.denom().is_one() {
            den = den.lcm(x.denom());
        }
    }
    let num = c
        .iter()
        .map(|x| x.numer() * (&den / x.denom()))
        .collect();
    (num, den)
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            self.coeffs == other.coeffs
        } else {
            self.sub(other).is_zero()
        }
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write!(f, "z^{i}")?,
                _ => write!(f, "{a}*z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if self.order > 2 && self.coeffs.len() > 1 {
            write!(f, " [z = zeta_{}]", self.order)?;
        }
        Ok(())
    }
}

/// `sum_j c_j zeta_E^j` with integer `c_j` indexed by exponent mod `E`.
///
/// Many representations denote the same number; equality must go through
/// [`RootSum::is_zero`] or the canonical [`CyclotomicNumber`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSum {
    order: u64,
    coeffs: Vec<i64>,
}

impl RootSum {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1);
        RootSum {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn from_coeffs(order: u64, coeffs: Vec<i64>) -> Self {
        assert_eq!(coeffs.len() as u64, order);
        RootSum { order, coeffs }
    }

    pub fn monomial(order: u64, exp: i64, c: i64) -> Self {
        let mut r = Self::zero(order);
        r.add_term(exp, c);
        r
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    #[inline]
    pub fn add_term(&mut self, exp: i64, c: i64) {
        let e = exp.rem_euclid(self.order as i64) as usize;
        self.coeffs[e] += c;
    }

    pub fn add_assign(&mut self, o: &RootSum) {
        assert_eq!(self.order, o.order, "RootSum orders must agree");
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
    }

    pub fn add(&self, o: &RootSum) -> RootSum {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn sub(&self, o: &RootSum) -> RootSum {
        self.add(&o.scaled(-1))
    }

    pub fn scaled(&self, k: i64) -> RootSum {
        RootSum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * k).collect(),
        }
    }

    /// Multiply by `zeta_E^k`.
    pub fn rotate(&self, k: i64) -> RootSum {
        let e = self.order as i64;
        let mut r = Self::zero(self.order);
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                r.coeffs[(j as i64 + k).rem_euclid(e) as usize] += c;
            }
        }
        r
    }

    /// Image under `zeta_E -> zeta_E^k` (any integer `k`; a field automorphism when it is a unit).
    pub fn galois(&self, k: i64) -> RootSum {
        let e = self.order as i64;
        let mut r = Self::zero(self.order);
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                r.coeffs[(j as i64 * k).rem_euclid(e) as usize] += c;
            }
        }
        r
    }

    pub fn conj(&self) -> RootSum {
        self.galois(-1)
    }

    /// Same number inside `Q(zeta_M)` for a multiple `M` of the order.
    pub fn lift(&self, new_order: u64) -> RootSum {
        assert_eq!(new_order % self.order, 0, "lift target must be a multiple");
        let step = (new_order / self.order) as usize;
        let mut r = Self::zero(new_order);
        for (j, &c) in self.coeffs.iter().enumerate() {
            r.coeffs[j * step] = c;
        }
        r
    }

    /// Product, computed over the nonzero terms of both operands.
    pub fn mul(&self, o: &RootSum) -> RootSum {
        let m = lcm(self.order, o.order);
        let a = if self.order == m { self.clone() } else { self.lift(m) };
        let b = if o.order == m { o.clone() } else { o.lift(m) };
        let bn: Vec<(usize, i64)> = b
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j, c))
            .collect();
        let mut r = vec![0i64; m as usize];
        let mu = m as usize;
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for &(j, y) in &bn {
                let k = if i + j >= mu { i + j - mu } else { i + j };
                r[k] += x * y;
            }
        }
        RootSum { order: m, coeffs: r }
    }

    /// Exact test for `sum c_j zeta_E^j = 0`.
    ///
    /// The sum vanishes iff `c(x) * prod_{p | E} (1 - x^{E/p})` is divisible by
    /// `x^E - 1`: the product kills every `Phi_d` with `d | E, d < E` and is coprime to `Phi_E`.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|&c| c == 0) {
            return true;
        }
        let e = self.order as usize;
        let mut v: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        for p in prime_factors(self.order) {
            let s = e / p as usize;
            let prev = v.clone();
            for j in 0..e {
                v[j] = prev[j] - prev[(j + e - s) % e];
            }
        }
        v.iter().all(|&c| c == 0)
    }

    pub fn eq_value(&self, o: &RootSum) -> bool {
        let m = lcm(self.order, o.order);
        self.lift(m).sub(&o.lift(m)).is_zero()
    }

    pub fn to_cyclotomic(&self) -> CyclotomicNumber {
        CyclotomicNumber::from_exponent_coeffs(self.order, &self.coeffs)
    }

    /// Divide by a positive integer in the canonical form.
    pub fn to_cyclotomic_over(&self, den: u64) -> CyclotomicNumber {
        let q = BigRational::new(BigInt::one(), BigInt::from(den));
        self.to_cyclotomic().scale(&q)
    }

    pub fn to_complex(&self, prec: usize) -> ComplexBig {
        let wp = prec + 32;
        let mut acc = ComplexBig::zero(wp);
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&ComplexBig::root_of_unity(j as i64, self.order, wp).mul_i64(c));
            }
        }
        acc.with_precision(prec)
    }

    /// Value as an integer when all weight sits on `zeta^0`, after canonical reduction.
    pub fn to_integer(&self) -> Option<i64> {
        self.to_cyclotomic()
            .to_rational()
            .filter(|q| q.is_integer())
            .and_then(|q| q.numer().to_i64())
    }
}
