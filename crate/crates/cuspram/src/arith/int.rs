//! Machine-integer number theory helpers used throughout the crate.

/// Greatest common divisor of two unsigned integers.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Greatest common divisor of the absolute values.
pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Reduce `a` into `[0, m)`.
pub fn rem(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists. `inv_mod(x, 1)` is `Some(0)`.
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (rem(a, m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Prime factorization by trial division, primes in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_factors(n: u64) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

/// All positive divisors of `n`, sorted.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_squarefree(n: u64) -> bool {
    factor(n).iter().all(|&(_, e)| e == 1)
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest-prime-factor sieve on `0..=n` (entries 0 and 1 are 0).
pub fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    spf_sieve(n)
        .iter()
        .enumerate()
        .filter(|&(i, &s)| s as usize == i && i >= 2)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn mult_order(a: u64, m: u64) -> u64 {
    let phi = euler_phi(m);
    let mut ord = phi;
    for (p, _) in factor(phi) {
        while ord.is_multiple_of(p) && pow_mod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

/// Smallest generator of the cyclic group `(Z/m)^x`; `m` must be 2, 4, p^k or 2p^k.
pub fn primitive_root(m: u64) -> Option<u64> {
    if m <= 2 {
        return Some(1);
    }
    let phi = euler_phi(m);
    (1..m).find(|&g| gcd(g, m) == 1 && mult_order(g, m) == phi)
}

/// Integer square root, floor.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Kronecker symbol (d / n) for n >= 1.
pub fn kronecker(d: i64, n: u64) -> i32 {
    if n == 0 {
        return if d.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    let mut v = 0;
    while n.is_multiple_of(2) {
        n /= 2;
        v += 1;
    }
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if v % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    // Jacobi symbol (d / n) for odd n.
    let mut a = d.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Fundamental discriminants `D != 1` with `|D|` dividing `e`.
pub fn fundamental_discriminants_dividing(e: u64) -> Vec<i64> {
    let mut out = Vec::new();
    for f in divisors(e) {
        for d in [f as i64, -(f as i64)] {
            if d != 1 && is_fundamental_discriminant(d) {
                out.push(d);
            }
        }
    }
    out
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        return (mr == 2 || mr == 3) && is_squarefree(m.unsigned_abs());
    }
    false
}

/// Squarefree kernel with sign, so that Q(sqrt(D)) = Q(sqrt(squarefree_part(D))).
pub fn squarefree_part(d: i64) -> i64 {
    let sign = d.signum();
    let core: u64 = factor(d.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product();
    sign * core as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisors_and_phi() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(25), 20);
        assert_eq!(euler_phi(48), 16);
    }

    #[test]
    fn inverse_and_order() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(-1, 12), Some(11));
        assert_eq!(inv_mod(4, 12), None);
        assert_eq!(mult_order(2, 25), 20);
        assert_eq!(primitive_root(25), Some(2));
        assert_eq!(primitive_root(7), Some(3));
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let sieve = primes_up_to(2000);
        let mr: Vec<u64> = (0..=2000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn kronecker_small_table() {
        // (5 / n) is +1 exactly for n = +-1 mod 5.
        for n in 1..50u64 {
            let expect = match n % 5 {
                0 => 0,
                1 | 4 => 1,
                _ => -1,
            };
            assert_eq!(kronecker(5, n), expect, "n = {n}");
        }
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(8, 3), -1);
    }

    #[test]
    fn fundamental_discriminants() {
        let mut ds = fundamental_discriminants_dividing(24);
        ds.sort();
        assert_eq!(ds, vec![-24, -8, -4, -3, 8, 12, 24]);
        assert_eq!(squarefree_part(12), 3);
        assert_eq!(squarefree_part(-4), -1);
    }
}
