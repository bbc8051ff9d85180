//! Cusps of `X_0(N)`: canonical representatives, levels, Atkin-Lehner
//! involutions and the reduction of a level `d` to `gcd(d, N/d)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::int::{divisors, euler_phi, factor, gcd, gcd_i64, inv_mod, valuation};
use crate::error::{Error, Result};

/// A `Gamma_0(N)` class of cusps, stored as a canonical pair `(a, b)` meaning `a/b`;
/// `(1, 0)` is infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CuspClass {
    pub n: u64,
    pub a: i64,
    pub b: i64,
    pub level: u64,
}

impl fmt::Display for CuspClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (_, 0) => write!(f, "oo"),
            (0, _) => write!(f, "0"),
            (a, b) => write!(f, "{a}/{b}"),
        }
    }
}

/// `gcd(b, N)` for the cusp `a/b`.
pub fn cusp_level(a: i64, b: i64, n: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(Error::InvalidInput("(0, 0) is not a cusp".into()));
    }
    let g = gcd_i64(a, b) as i64;
    Ok(gcd((b / g).unsigned_abs(), n))
}

// s with a s = 1 mod c (c = 0 allowed, then a = +-1)
fn cremona_s(a: i64, c: i64) -> i64 {
    if c == 0 {
        return a.signum();
    }
    inv_mod(a, c.unsigned_abs()).expect("a/c in lowest terms") as i64
}

/// `Gamma_0(N)`-equivalence of `a1/c1` and `a2/c2` (both in lowest terms):
/// `s1 c2 = s2 c1 mod gcd(c1 c2, N)` with `a_j s_j = 1 mod c_j`.
pub fn cusps_equivalent(a1: i64, c1: i64, a2: i64, c2: i64, n: u64) -> bool {
    let s1 = cremona_s(a1, c1) as i128;
    let s2 = cremona_s(a2, c2) as i128;
    let m = gcd((c1 as i128 * c2 as i128).unsigned_abs() as u64, n) as i128;
    if m <= 1 {
        return true;
    }
    (s1 * c2 as i128 - s2 * c1 as i128).rem_euclid(m) == 0
}

fn lowest_terms(a: i64, b: i64) -> (i64, i64) {
    let g = gcd_i64(a, b) as i64;
    let (a, b) = (a / g, b / g);
    if b < 0 || (b == 0 && a < 0) {
        (-a, -b)
    } else {
        (a, b)
    }
}

/// The canonical representatives of the cusps of level `d`:
/// `(0, 1)` for `d = 1`, `(1, 0)` for `d = N`, otherwise `a/d` for the
/// units `a` modulo `gcd(d, N/d)`, each lifted to be coprime to `d`.
pub fn cusps_of_level(n: u64, d: u64) -> Result<Vec<CuspClass>> {
    if n == 0 || d == 0 || !n.is_multiple_of(d) {
        return Err(Error::InvalidInput(format!("{d} does not divide {n}")));
    }
    if d == n {
        return Ok(vec![CuspClass { n, a: 1, b: 0, level: n }]);
    }
    if d == 1 {
        return Ok(vec![CuspClass { n, a: 0, b: 1, level: 1 }]);
    }
    let g = gcd(d, n / d);
    let mut out = Vec::new();
    for a in 0..g.max(1) {
        if gcd(a, g) != 1 {
            continue;
        }
        let lift = (0..)
            .map(|t| a + t * g)
            .find(|&x| gcd(x, d) == 1)
            .expect("units lift along residue classes");
        out.push(CuspClass {
            n,
            a: lift as i64,
            b: d as i64,
            level: d,
        });
    }
    Ok(out)
}

/// One canonical representative per `Gamma_0(N)` class, ordered by level.
pub fn enumerate_cusps(n: u64) -> Result<Vec<CuspClass>> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let mut out = Vec::new();
    for d in divisors(n) {
        out.extend(cusps_of_level(n, d)?);
    }
    Ok(out)
}

/// `(d, number of classes of level d)` for every `d | N`.
pub fn cusp_counts_by_level(n: u64) -> Result<Vec<(u64, usize)>> {
    divisors(n)
        .into_iter()
        .map(|d| Ok((d, cusps_of_level(n, d)?.len())))
        .collect()
}

/// `sum_{d | N} phi(gcd(d, N/d))`.
pub fn cusp_count_formula(n: u64) -> u64 {
    divisors(n).into_iter().map(|d| euler_phi(gcd(d, n / d))).sum()
}

/// The canonical class of an arbitrary cusp `a/b`.
pub fn canonical_cusp(a: i64, b: i64, n: u64) -> Result<CuspClass> {
    let d = cusp_level(a, b, n)?;
    let (a, b) = lowest_terms(a, b);
    cusps_of_level(n, d)?
        .into_iter()
        .find(|c| cusps_equivalent(a, b, c.a, c.b, n))
        .ok_or_else(|| Error::Invariant(format!("no canonical class for {a}/{b} at level {n}")))
}

/// `W_Q = [[Q u, v], [N, Q]]` with `Q u - (N/Q) v = 1`.
pub fn atkin_lehner_matrix(n: u64, q: u64) -> Result<[[i64; 2]; 2]> {
    if q == 0 || !n.is_multiple_of(q) || gcd(q, n / q) != 1 {
        return Err(Error::InvalidInput(format!("{q} is not an exact divisor of {n}")));
    }
    let r = n / q;
    // Q u = 1 mod r
    let u = inv_mod(q as i64, r).expect("exact divisor") as i64;
    let v = (q as i64 * u - 1) / r as i64;
    Ok([[q as i64 * u, v], [n as i64, q as i64]])
}

/// Image of `(a : b)` under an integer matrix, in lowest terms.
pub fn apply_matrix(m: &[[i64; 2]; 2], a: i64, b: i64) -> (i64, i64) {
    let x = m[0][0] as i128 * a as i128 + m[0][1] as i128 * b as i128;
    let y = m[1][0] as i128 * a as i128 + m[1][1] as i128 * b as i128;
    let g = {
        let (mut p, mut q) = (x.unsigned_abs(), y.unsigned_abs());
        while q != 0 {
            (p, q) = (q, p % q);
        }
        p as i128
    };
    lowest_terms((x / g) as i64, (y / g) as i64)
}

pub fn atkin_lehner_on_cusp(q: u64, cusp: &CuspClass) -> Result<CuspClass> {
    let w = atkin_lehner_matrix(cusp.n, q)?;
    let (a, b) = apply_matrix(&w, cusp.a, cusp.b);
    canonical_cusp(a, b, cusp.n)
}

/// Level of the `W_Q` image of a level-`d` cusp: `(Q / d_Q) d_{Q'}`.
pub fn atkin_lehner_level(q: u64, d: u64) -> u64 {
    let d_q = gcd(d, q);
    let d_qp = d / d_q;
    q / d_q * d_qp
}

/// `(Q, delta)` with `W_Q` carrying level `d` to `delta = gcd(d, N/d)`, `delta^2 | N`.
///
/// `Q` collects the full prime powers of `N` at the primes where `d` holds
/// more than half of `v_p(N)`.
pub fn reduce_level(n: u64, d: u64) -> Result<(u64, u64)> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::InvalidInput(format!("{d} does not divide {n}")));
    }
    let mut q = 1;
    for (p, e) in factor(n) {
        let vd = if d.is_multiple_of(p) { valuation(d, p) } else { 0 };
        if vd > e - vd {
            q *= p.pow(e);
        }
    }
    let delta = gcd(d, n / d);
    debug_assert_eq!(atkin_lehner_level(q, d), delta);
    Ok((q, delta))
}

/// Exact divisors `Q` of `N` (`gcd(Q, N/Q) = 1`).
pub fn exact_divisors(n: u64) -> Vec<u64> {
    divisors(n)
        .into_iter()
        .filter(|&q| gcd(q, n / q) == 1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels() {
        assert_eq!(cusp_level(1, 0, 48).unwrap(), 48);
        assert_eq!(cusp_level(0, 1, 48).unwrap(), 1);
        assert_eq!(cusp_level(1, 4, 48).unwrap(), 4);
        assert!(cusp_level(0, 0, 5).is_err());
    }

    #[test]
    fn small_enumerations() {
        let c4 = enumerate_cusps(4).unwrap();
        assert_eq!(c4.iter().map(|c| c.level).collect::<Vec<_>>(), vec![1, 2, 4]);
        for p in [2u64, 3, 11, 97] {
            assert_eq!(enumerate_cusps(p).unwrap().len(), 2);
        }
        let c25 = cusp_counts_by_level(25).unwrap();
        assert_eq!(c25, vec![(1, 1), (5, 4), (25, 1)]);
    }

    #[test]
    fn canonical_representatives_are_pairwise_inequivalent() {
        for n in 1..=120u64 {
            let cs = enumerate_cusps(n).unwrap();
            for (i, x) in cs.iter().enumerate() {
                for y in &cs[i + 1..] {
                    assert!(!cusps_equivalent(x.a, x.b, y.a, y.b, n), "N={n}: {x} ~ {y}");
                }
            }
        }
    }

    #[test]
    fn every_fraction_has_a_class() {
        for n in [12u64, 25, 48, 72] {
            for b in 0..=2 * n as i64 {
                for a in -(n as i64)..=n as i64 {
                    if gcd_i64(a, b) != 1 {
                        continue;
                    }
                    let c = canonical_cusp(a, b, n).unwrap();
                    assert_eq!(c.level, cusp_level(a, b, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn atkin_lehner_examples() {
        let inf = CuspClass { n: 48, a: 1, b: 0, level: 48 };
        let img = atkin_lehner_on_cusp(48, &inf).unwrap();
        assert_eq!((img.a, img.b, img.level), (0, 1, 1));
        let c = cusps_of_level(48, 4).unwrap()[0];
        assert_eq!(atkin_lehner_on_cusp(3, &c).unwrap().level, 12);
        assert!(atkin_lehner_matrix(48, 4).is_err());
    }

    #[test]
    fn reductions() {
        assert_eq!(reduce_level(48, 12).unwrap().1, 4);
        assert_eq!(reduce_level(144, 12).unwrap(), (1, 12));
        assert_eq!(reduce_level(7, 7).unwrap(), (7, 1));
        assert_eq!(reduce_level(48, 16).unwrap(), (16, 1));
    }
}
