//! Fourier coefficients of the weight-2 newform attached to an elliptic curve,
//! from point counts and the Hecke recursions, and certified evaluation of the
//! truncated q-expansion.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::float::{BigFloat, ComplexBig};
use crate::arith::int::{isqrt, spf_sieve};
use crate::error::{Error, Result};

/// Above this size `a_p` is computed by baby-step giant-step on point orders.
const BSGS_THRESHOLD: u64 = 5000;

/// A curve `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` with its (trusted) conductor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCoefficients {
    pub label: String,
    pub n: u64,
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

impl CurveCoefficients {
    pub fn new(label: &str, n: u64, a: [i64; 5]) -> Result<Self> {
        let c = CurveCoefficients {
            label: label.to_string(),
            n,
            a1: a[0],
            a2: a[1],
            a3: a[2],
            a4: a[3],
            a6: a[4],
        };
        if n == 0 {
            return Err(Error::InvalidInput(format!("{label}: conductor must be positive")));
        }
        if c.discriminant().is_zero() {
            return Err(Error::InvalidInput(format!("{label}: singular model")));
        }
        Ok(c)
    }

    fn b_invariants(&self) -> [BigInt; 4] {
        let [a1, a2, a3, a4, a6] = [self.a1, self.a2, self.a3, self.a4, self.a6].map(BigInt::from);
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> BigInt {
        let [b2, b4, b6, b8] = self.b_invariants();
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    /// `(c4, c6)`.
    pub fn c_invariants(&self) -> (BigInt, BigInt) {
        let [b2, b4, b6, _] = self.b_invariants();
        let c4 = &b2 * &b2 - 24 * &b4;
        let c6 = -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * &b6;
        (c4, c6)
    }

    /// Number of projective points of the reduction mod `p`, singular point included.
    pub fn count_points(&self, p: u64) -> u64 {
        if p <= 3 {
            return self.count_points_exhaustive(p);
        }
        let [b2, b4, b6, _] = self.b_invariants();
        let r = |x: &BigInt| -> u64 {
            let m = BigInt::from(p);
            let v = ((x % &m) + &m) % &m;
            v.try_into().expect("reduced residue")
        };
        // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
        let (c3, c2, c1, c0) = (4 % p, r(&b2), 2 * r(&b4) % p, r(&b6));
        let mut chi = vec![-1i8; p as usize];
        chi[0] = 0;
        for t in 1..=p / 2 {
            chi[(t * t % p) as usize] = 1;
        }
        // forward differences of the cubic at x = 0, 1, 2, ...
        let f = |x: u64| (((c3 * x + c2) % p * x + c1) % p * x + c0) % p;
        let (f0, f1, f2, f3) = (f(0), f(1), f(2), f(3));
        let mut v = f0;
        let mut d1 = (f1 + p - f0) % p;
        let mut d2 = (f2 + 2 * (p - f1) + f0) % p;
        let d3 = (f3 + 3 * (p - f2) + 3 * f1 + (p - f0)) % p;
        let mut count: i64 = 1 + p as i64;
        for _ in 0..p {
            count += chi[v as usize] as i64;
            v += d1;
            if v >= p {
                v -= p;
            }
            d1 += d2;
            if d1 >= p {
                d1 -= p;
            }
            d2 += d3;
            if d2 >= p {
                d2 -= p;
            }
        }
        count as u64
    }

    fn count_points_exhaustive(&self, p: u64) -> u64 {
        let m = p as i64;
        let [a1, a2, a3, a4, a6] =
            [self.a1, self.a2, self.a3, self.a4, self.a6].map(|a| a.rem_euclid(m));
        let mut count = 1;
        for x in 0..m {
            for y in 0..m {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if (lhs - rhs).rem_euclid(m) == 0 {
                    count += 1;
                }
            }
        }
        count
    }

    /// `p + 1 - #E(F_p)`, all points of the reduction counted; on the minimal
    /// model this is the Hecke eigenvalue at good and bad primes alike.
    pub fn a_p(&self, p: u64) -> Result<i64> {
        let disc = self.discriminant();
        let bad_model = (&disc % BigInt::from(p)).is_zero();
        let bad_conductor = self.n.is_multiple_of(p);
        if bad_model != bad_conductor {
            return Err(Error::ModelMismatch {
                label: self.label.clone(),
                p,
            });
        }
        let ap = if !bad_model && p > BSGS_THRESHOLD {
            match self.a_p_bsgs(p) {
                Some(a) => a,
                None => p as i64 + 1 - self.count_points(p) as i64,
            }
        } else {
            p as i64 + 1 - self.count_points(p) as i64
        };
        if bad_conductor {
            if ap.abs() > 1 {
                return Err(Error::Invariant(format!(
                    "{}: a_{p} = {ap} at a bad prime",
                    self.label
                )));
            }
        } else if (ap * ap) as u64 > 4 * p {
            return Err(Error::Invariant(format!(
                "{}: a_{p} = {ap} violates the Hasse bound",
                self.label
            )));
        }
        Ok(ap)
    }

    /// `a_p` at a good prime `p > 3` from orders of random points; `None` when the
    /// candidates for `#E` never narrow to one value.
    fn a_p_bsgs(&self, p: u64) -> Option<i64> {
        let (c4, c6) = self.c_invariants();
        let m = BigInt::from(p);
        let red = |x: BigInt| -> u64 { ((x % &m + &m) % &m).try_into().unwrap() };
        // y^2 = x^3 - 27 c4 x - 54 c6 is isomorphic over F_p for p > 3
        let a = red(-27 * c4);
        let b = red(-54 * c6);
        let l = 2 * isqrt(p) + 2;
        let mut candidates: Option<Vec<i64>> = None;
        let mut x = 1u64;
        for _ in 0..40 {
            // find x with f(x) != 0 and a square, then use the twist trick
            let (fx, xx) = loop {
                x += 1;
                if x >= p {
                    return None;
                }
                let fx = (mulm(mulm(x, x, p), x, p) + mulm(a, x, p) + b) % p;
                if fx != 0 && powm(fx, (p - 1) / 2, p) == 1 {
                    break (fx, x);
                }
            };
            // curve Y^2 = X^3 + A f^2 X + B f^3 with point (x f, f^2)
            let f2 = mulm(fx, fx, p);
            let curve = Short {
                p,
                a: mulm(a, f2, p),
            };
            let pt = Some((mulm(xx, fx, p), f2));
            let found = curve.orders_in_window(pt, p + 1, l);
            let next: Vec<i64> = match &candidates {
                None => found,
                Some(c) => c.iter().copied().filter(|t| found.contains(t)).collect(),
            };
            if next.len() == 1 {
                return Some(next[0]);
            }
            candidates = Some(next);
        }
        None
    }
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

type Pt = Option<(u64, u64)>;

// y^2 = x^3 + a x + b over F_p; b is implicit in the points
struct Short {
    p: u64,
    a: u64,
}

impl Short {
    fn add(&self, u: Pt, v: Pt) -> Pt {
        let p = self.p;
        let (Some((x1, y1)), Some((x2, y2))) = (u, v) else {
            return u.or(v);
        };
        let lam = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return None;
            }
            let num = (3 * mulm(x1, x1, p) + self.a) % p;
            mulm(num, powm(2 * y1 % p, p - 2, p), p)
        } else {
            mulm((y2 + p - y1) % p, powm((x2 + p - x1) % p, p - 2, p), p)
        };
        let x3 = (mulm(lam, lam, p) + 2 * p - x1 - x2) % p;
        let y3 = (mulm(lam, (x1 + p - x3) % p, p) + p - y1) % p;
        Some((x3, y3))
    }

    fn neg(&self, u: Pt) -> Pt {
        u.map(|(x, y)| (x, (self.p - y) % self.p))
    }

    fn mul(&self, mut k: u64, u: Pt) -> Pt {
        let mut acc = None;
        let mut base = u;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// All `t` in `[-l, l]` with `(c - t) P = O`.
    fn orders_in_window(&self, pt: Pt, c: u64, l: u64) -> Vec<i64> {
        // (c - t) P = O  <=>  c P = t P; write t = -l + i s + j
        let s = isqrt(2 * l + 1) + 1;
        let mut baby: HashMap<Pt, Vec<u64>> = HashMap::new();
        let mut jp = None;
        for j in 0..s {
            baby.entry(jp).or_default().push(j);
            jp = self.add(jp, pt);
        }
        let target = self.mul(c, pt);
        // G_i = cP + lP - i s P
        let step = self.neg(self.mul(s, pt));
        let mut g = self.add(target, self.mul(l, pt));
        let mut out = Vec::new();
        let mut i = 0u64;
        while i * s <= 2 * l {
            if let Some(js) = baby.get(&g) {
                for &j in js {
                    let t = i * s + j;
                    if t <= 2 * l {
                        out.push(t as i64 - l as i64);
                    }
                }
            }
            g = self.add(g, step);
            i += 1;
        }
        out
    }
}

/// `a_1, ..., a_B` (index `n` holds `a_n`; index 0 is unused).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub bound: usize,
    pub values: Vec<i64>,
}

impl CoefficientTable {
    pub fn get(&self, n: usize) -> i64 {
        self.values[n]
    }
}

/// The Hecke eigenvalues up to `B` by multiplicativity and the prime-power recursions.
pub fn an_table(curve: &CurveCoefficients, bound: usize) -> Result<CoefficientTable> {
    if bound == 0 {
        return Err(Error::InvalidInput("coefficient bound must be positive".into()));
    }
    let spf = spf_sieve(bound);
    let mut a = vec![0i64; bound + 1];
    a[1] = 1;
    for n in 2..=bound {
        let p = spf[n] as usize;
        let mut pk = p;
        while (n / pk).is_multiple_of(p) {
            pk *= p;
        }
        a[n] = if pk == n {
            if pk == p {
                curve.a_p(p as u64)?
            } else if curve.n.is_multiple_of(p as u64) {
                a[p] * a[n / p]
            } else {
                a[p] * a[n / p] - p as i64 * a[n / p / p]
            }
        } else {
            a[pk] * a[n / pk]
        };
    }
    Ok(CoefficientTable {
        bound,
        values: a,
    })
}

/// Certified bound on `sum_{n > B} n |q|^n`, i.e.
/// `|q|^{B+1} ((B+1)(1-|q|) + |q|) / (1-|q|)^2`.
pub fn tail_bound(abs_q: &BigFloat, bound: usize) -> BigFloat {
    let prec = abs_q.precision();
    let one = BigFloat::one(prec);
    let om = one.sub(abs_q);
    let b1 = BigFloat::from_i64(bound as i64 + 1, prec);
    let num = b1.mul(&om).add(abs_q);
    abs_q.powi(bound + 1).mul(&num).div(&om.mul(&om))
}

fn log2_tail(log2_q: f64, om: f64, b: usize) -> f64 {
    let q = log2_q.exp2();
    (b as f64 + 1.0) * log2_q + ((b as f64 + 1.0) * om + q).log2() - 2.0 * om.log2()
}

/// Smallest `B` whose tail bound is at most `target`.
pub fn minimal_bound(abs_q: &BigFloat, target: &BigFloat) -> usize {
    let lq = abs_q.log2_abs();
    let om = {
        // 1 - |q| without cancellation when |q| is close to 1
        let v = BigFloat::one(abs_q.precision()).sub(abs_q);
        v.to_f64()
    };
    let lt = target.log2_abs();
    let mut hi = 1usize;
    while log2_tail(lq, om, hi) > lt - 1.0 {
        hi *= 2;
    }
    let mut lo = 0usize;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if log2_tail(lq, om, mid) > lt {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // settle against the exact bound
    let mut b = hi.max(1);
    while b > 1 && tail_bound(abs_q, b - 1) <= *target {
        b -= 1;
    }
    while tail_bound(abs_q, b) > *target {
        b += 1;
    }
    b
}

fn check_tail(table: &CoefficientTable, abs_q: &BigFloat, target: &BigFloat) -> Result<()> {
    if *abs_q >= BigFloat::one(abs_q.precision()) {
        return Err(Error::InvalidInput("Im z must be positive".into()));
    }
    if tail_bound(abs_q, table.bound) > *target {
        return Err(Error::InsufficientTerms {
            required: minimal_bound(abs_q, target),
            available: table.bound,
        });
    }
    Ok(())
}

/// `sum_{n <= B} a_n q^n`, `q = e^{2 pi i z}`, with the truncation error certified
/// below `target` under `|a_n| <= n`.
pub fn evaluate_f(table: &CoefficientTable, z: &ComplexBig, target: &BigFloat) -> Result<ComplexBig> {
    let prec = z.precision();
    if z.im.is_negative() || z.im.is_zero() {
        return Err(Error::InvalidInput("Im z must be positive".into()));
    }
    let two_pi = BigFloat::pi(prec).mul_i64(2);
    let q = ComplexBig::new(two_pi.mul(&z.im).neg(), two_pi.mul(&z.re)).exp();
    let abs_q = two_pi.mul(&z.im).neg().exp();
    check_tail(table, &abs_q, target)?;
    let mut s = ComplexBig::zero(prec);
    for n in (1..=table.bound).rev() {
        s = s.mul(&q);
        let an = table.values[n];
        if an != 0 {
            s.re = s.re.add(&BigFloat::from_i64(an, prec));
        }
    }
    Ok(s.mul(&q))
}

/// `f(a/d + i Y)` by residue classes mod `d`: real partial sums
/// `S_j = sum_{n = j mod d} a_n r^n`, `r = e^{-2 pi Y}`, then `sum_j zeta_d^{a j} S_j`.
pub fn evaluate_at_cusp_offset(
    table: &CoefficientTable,
    a: i64,
    d: u64,
    y: &BigFloat,
    target: &BigFloat,
) -> Result<ComplexBig> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be positive".into()));
    }
    if y.is_negative() || y.is_zero() {
        return Err(Error::InvalidInput("Im z must be positive".into()));
    }
    let prec = y.precision();
    let r = BigFloat::pi(prec).mul_i64(2).mul(y).neg().exp();
    check_tail(table, &r, target)?;
    let d = d as usize;
    let mut acc = vec![BigFloat::zero(prec); d];
    let mut rn = BigFloat::one(prec);
    for n in 1..=table.bound {
        rn = rn.mul(&r);
        let an = table.values[n];
        if an != 0 {
            let j = n % d;
            acc[j] = acc[j].add(&rn.mul_i64(an));
        }
    }
    let mut s = ComplexBig::zero(prec);
    for (j, sj) in acc.iter().enumerate() {
        if sj.is_zero() {
            continue;
        }
        let w = ComplexBig::root_of_unity(a * j as i64, d as u64, prec);
        s = s.add(&w.scale(sj));
    }
    Ok(s)
}

/// Parse `label N a1 a2 a3 a4 a6` lines; `#` starts a comment.
pub fn parse_curve_file(text: &str) -> Result<Vec<CurveCoefficients>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 7 {
            return Err(parse_err(format!("expected 7 fields, found {}", toks.len())));
        }
        let n: u64 = toks[1]
            .parse()
            .map_err(|_| parse_err(format!("bad conductor {:?}", toks[1])))?;
        let mut a = [0i64; 5];
        for (k, t) in toks[2..].iter().enumerate() {
            a[k] = t
                .parse()
                .map_err(|_| parse_err(format!("bad coefficient {t:?}")))?;
        }
        out.push(CurveCoefficients::new(toks[0], n, a).map_err(|e| parse_err(e.to_string()))?);
    }
    Ok(out)
}

/// Whether the model's discriminant is divisible exactly by the primes of `N`.
pub fn conductor_consistent(curve: &CurveCoefficients) -> bool {
    let d = curve.discriminant().abs();
    crate::arith::int::primes_up_to(curve.n as usize)
        .into_iter()
        .filter(|&p| curve.n.is_multiple_of(p))
        .all(|p| (&d % BigInt::from(p)).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve11() -> CurveCoefficients {
        // y^2 + y = x^3 - x^2
        CurveCoefficients::new("11a3", 11, [0, -1, 1, 0, 0]).unwrap()
    }

    #[test]
    fn eigenvalues_of_11() {
        let e = curve11();
        assert_eq!(e.a_p(2).unwrap(), -2);
        assert_eq!(e.a_p(3).unwrap(), -1);
        assert_eq!(e.a_p(11).unwrap(), 1);
        assert_eq!(e.a_p(5).unwrap(), 1);
        assert_eq!(e.a_p(7).unwrap(), -2);
    }

    #[test]
    fn difference_count_matches_exhaustive() {
        let e = CurveCoefficients::new("x", 37, [0, 0, 1, -1, 0]).unwrap();
        for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 41] {
            assert_eq!(e.count_points(p), e.count_points_exhaustive(p), "p={p}");
        }
    }

    #[test]
    fn bsgs_matches_naive() {
        let e = CurveCoefficients::new("x", 37, [0, 0, 1, -1, 0]).unwrap();
        for p in crate::arith::int::primes_up_to(3000).into_iter().filter(|&p| p > 40) {
            let naive = p as i64 + 1 - e.count_points(p) as i64;
            assert_eq!(e.a_p_bsgs(p), Some(naive), "p={p}");
        }
    }

    #[test]
    fn table_recursions() {
        let t = an_table(&curve11(), 200).unwrap();
        assert_eq!(t.get(1), 1);
        assert_eq!(t.get(4), t.get(2) * t.get(2) - 2);
        assert_eq!(t.get(6), t.get(2) * t.get(3));
        assert_eq!(t.get(121), 1);
        // q prod (1-q^n)^2 (1-q^11n)^2 starts q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7
        assert_eq!(&t.values[1..=7], &[1, -2, -1, 2, 1, 2, -2]);
    }

    #[test]
    fn tail_certificate() {
        let q = BigFloat::from_ratio(1, 2, 256);
        let t = tail_bound(&q, 60);
        assert!(t.log2_abs() < -50.0);
        let target = BigFloat::from_f64(1e-30, 256);
        let b = minimal_bound(&q, &target);
        assert!(tail_bound(&q, b) <= target);
        assert!(tail_bound(&q, b - 1) > target);
    }

    #[test]
    fn evaluation_leading_term_and_realness() {
        let t = an_table(&curve11(), 400).unwrap();
        let prec = 256;
        let z = ComplexBig::new(BigFloat::zero(prec), BigFloat::from_i64(3, prec));
        let target = BigFloat::from_f64(1e-60, prec);
        let v = evaluate_f(&t, &z, &target).unwrap();
        assert!(v.im.is_zero() || v.im.abs().log2_abs() < -200.0);
        let q = BigFloat::pi(prec).mul_i64(-6).exp();
        // f = q + a_2 q^2 + ..., so the relative error is about |a_2| |q|
        let rel = v.re.sub(&q).abs().div(&q);
        assert!(rel < q.mul_i64(t.get(2).abs() + 1));
        assert!(rel > q.mul_i64(t.get(2).abs() - 1));
        let small = ComplexBig::new(BigFloat::zero(prec), BigFloat::from_ratio(1, 100, prec));
        assert!(matches!(
            evaluate_f(&t, &small, &target),
            Err(Error::InsufficientTerms { .. })
        ));
    }

    #[test]
    fn residue_class_route_matches_horner() {
        let t = an_table(&curve11(), 3000).unwrap();
        let prec = 256;
        let y = BigFloat::from_ratio(1, 20, prec);
        let target = BigFloat::from_f64(1e-40, prec);
        let a = evaluate_at_cusp_offset(&t, 3, 7, &y, &target).unwrap();
        let x = BigFloat::from_ratio(3, 7, prec);
        let b = evaluate_f(&t, &ComplexBig::new(x, y), &target).unwrap();
        assert!(a.sub(&b).abs().log2_abs() < -120.0);
    }

    #[test]
    fn parsing() {
        let cs = parse_curve_file("# c\n11a 11 0 -1 1 -10 -20 # tail\n\n").unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].a4, -10);
        assert!(matches!(parse_curve_file("x 11 0 0"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_curve_file("x 11 0 0 0 0 0").is_err());
    }
}
