//! Arithmetic in prime fields `F_l` with `l < 2^32`, plus the polynomial
//! and linear-algebra routines the modular character-table method needs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::int::{factor, is_prime, pow_mod};

/// The prime field `F_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    pub l: u64,
}

impl Fp {
    pub fn new(l: u64) -> Self {
        assert!(l < 1 << 32 && is_prime(l), "field characteristic must be a prime below 2^32");
        Fp { l }
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.l {
            s - self.l
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.l - b
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.l
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.l - a
        }
    }

    pub fn pow(self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.l)
    }

    pub fn inv(self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.l), "inverse of zero in F_{}", self.l);
        self.pow(a, self.l - 2)
    }

    pub fn from_i64(self, a: i64) -> u64 {
        a.rem_euclid(self.l as i64) as u64
    }

    /// Centered lift to `(-l/2, l/2]`.
    pub fn centered(self, a: u64) -> i64 {
        if a > self.l / 2 {
            a as i64 - self.l as i64
        } else {
            a as i64
        }
    }

    pub fn primitive_root(self) -> u64 {
        let fs = factor(self.l - 1);
        (2..self.l)
            .find(|&g| fs.iter().all(|&(q, _)| self.pow(g, (self.l - 1) / q) != 1))
            .expect("a prime field has a primitive root")
    }

    /// A primitive `n`-th root of unity; requires `n | l - 1`.
    pub fn root_of_unity(self, n: u64) -> u64 {
        assert_eq!((self.l - 1) % n, 0);
        self.pow(self.primitive_root(), (self.l - 1) / n)
    }

    /// Square root of a perfect square below `l/2`, as an integer.
    pub fn integer_sqrt_of_square(self, a: u64) -> Option<u64> {
        let r = super::int::isqrt(a);
        (r * r == a).then_some(r)
    }
}

/// Smallest prime `l > lower` with `l = 1 (mod n)`.
pub fn prime_one_mod(n: u64, lower: u64) -> u64 {
    let mut t = lower / n + 1;
    loop {
        let l = t * n + 1;
        if l > lower && is_prime(l) {
            return l;
        }
        t += 1;
    }
}

/// Dense polynomial over `F_l`, constant term first, no trailing zeros.
pub type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn poly_mul(f: Fp, a: &[u64], b: &[u64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = f.add(r[i + j], f.mul(x, y));
        }
    }
    trim(r)
}

/// Quotient and remainder of `a` by nonzero `b`.
pub fn poly_divrem(f: Fp, a: &[u64], b: &[u64]) -> (Poly, Poly) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let inv_lead = f.inv(b[db]);
    let mut q = vec![0u64; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = f.mul(r[i + db], inv_lead);
        q[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = f.sub(r[i + j], f.mul(c, bj));
            }
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

pub fn poly_rem(f: Fp, a: &[u64], b: &[u64]) -> Poly {
    poly_divrem(f, a, b).1
}

pub fn poly_gcd(f: Fp, a: &[u64], b: &[u64]) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = r;
    }
    make_monic(f, a)
}

pub fn make_monic(f: Fp, a: Poly) -> Poly {
    match a.last() {
        None => a,
        Some(&lead) => {
            let inv = f.inv(lead);
            a.into_iter().map(|x| f.mul(x, inv)).collect()
        }
    }
}

/// `base^e mod m`.
pub fn poly_powmod(f: Fp, base: &[u64], mut e: u64, m: &[u64]) -> Poly {
    let mut result: Poly = vec![1];
    let mut b = poly_rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_rem(f, &poly_mul(f, &result, &b), m);
        }
        b = poly_rem(f, &poly_mul(f, &b, &b), m);
        e >>= 1;
    }
    result
}

fn poly_sub(f: Fp, a: &[u64], b: &[u64]) -> Poly {
    let n = a.len().max(b.len());
    let mut r = vec![0u64; n];
    for (i, slot) in r.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = f.sub(x, y);
    }
    trim(r)
}

/// All roots of a monic polynomial that splits into distinct linear factors.
/// Returns `None` if it does not.
pub fn split_roots(f: Fp, poly: &[u64], seed: u64) -> Option<Vec<u64>> {
    let poly = make_monic(f, trim(poly.to_vec()));
    let deg = poly.len().checked_sub(1)?;
    if deg == 0 {
        return Some(Vec::new());
    }
    // gcd(x^l - x, poly) must be poly itself.
    let xl = poly_powmod(f, &[0, 1], f.l, &poly);
    let split = poly_gcd(f, &poly_sub(f, &xl, &[0, 1]), &poly);
    if split.len() != poly.len() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roots = Vec::with_capacity(deg);
    let mut stack = vec![poly];
    while let Some(g) = stack.pop() {
        match g.len() {
            0 | 1 => {}
            2 => roots.push(f.neg(g[0])),
            _ => loop {
                let a = rng.random_range(0..f.l);
                let h = poly_powmod(f, &[a, 1], (f.l - 1) / 2, &g);
                let d = poly_gcd(f, &poly_sub(f, &h, &[1]), &g);
                if d.len() > 1 && d.len() < g.len() {
                    let (q, _) = poly_divrem(f, &g, &d);
                    stack.push(d);
                    stack.push(make_monic(f, q));
                    break;
                }
            },
        }
    }
    roots.sort_unstable();
    if roots.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(roots)
}

/// Solve `a x = b` for square `a` (row-major, `n x n`); `None` if singular.
pub fn solve(f: Fp, mut a: Vec<Vec<u64>>, mut b: Vec<u64>) -> Option<Vec<u64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = f.inv(a[col][col]);
        for x in a[col][col..].iter_mut() {
            *x = f.mul(*x, inv);
        }
        b[col] = f.mul(b[col], inv);
        let pivot_row = a[col].clone();
        let pivot_b = b[col];
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let c = a[r][col];
            for (x, &y) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x = f.sub(*x, f.mul(c, y));
            }
            b[r] = f.sub(b[r], f.mul(c, pivot_b));
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_primes_in_progressions() {
        let l = prime_one_mod(120, 1 << 30);
        assert!(is_prime(l) && l % 120 == 1 && l > 1 << 30);
        let f = Fp::new(l);
        let z = f.root_of_unity(120);
        assert_eq!(f.pow(z, 120), 1);
        assert_ne!(f.pow(z, 60), 1);
        assert_ne!(f.pow(z, 40), 1);
    }

    #[test]
    fn roots_of_split_polynomial() {
        let f = Fp::new(101);
        let mut p: Poly = vec![1];
        for r in [3u64, 17, 50, 99] {
            p = poly_mul(f, &p, &[f.neg(r), 1]);
        }
        assert_eq!(split_roots(f, &p, 7), Some(vec![3, 17, 50, 99]));
        // x^2 + 1 has no roots mod 103 (103 = 3 mod 4)
        assert_eq!(split_roots(Fp::new(103), &[1, 0, 1], 7), None);
        // repeated root is rejected
        let sq = poly_mul(f, &[f.neg(5), 1], &[f.neg(5), 1]);
        assert_eq!(split_roots(f, &sq, 7), None);
    }

    #[test]
    fn linear_solve() {
        let f = Fp::new(97);
        let a = vec![vec![2, 1], vec![1, 3]];
        let x = solve(f, a, vec![5, 10]).unwrap();
        assert_eq!(f.add(f.mul(2, x[0]), x[1]), 5);
        assert_eq!(f.add(x[0], f.mul(3, x[1])), 10);
        assert!(solve(f, vec![vec![1, 2], vec![2, 4]], vec![1, 1]).is_none());
    }
}
