//! Dirichlet characters, additive characters of `Z/p^k`, Gauss sums, and the
//! character sets that index the twists appearing at a cusp of level `d`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::int::{
    divisors, euler_phi, factor, gcd, inv_mod, is_prime, is_squarefree, lcm, primitive_root,
    valuation,
};
use crate::arith::{CyclotomicNumber, RootSum};
use crate::error::{Error, Result};

/// `(Z/m)^x` with a fixed generating set and a discrete-log table.
///
/// Generators come from the prime-power factors: a primitive root for odd `p`,
/// `-1` for `4`, and `-1, 5` for `2^k` with `k >= 3`, each lifted by CRT.
#[derive(Debug)]
pub struct UnitGroup {
    modulus: u64,
    gens: Vec<u64>,
    orders: Vec<u64>,
    exponent: u64,
    // dlog[a * ngens + i], or u32::MAX for non-units
    dlog: Vec<u32>,
}

fn crt_lift(residue: u64, pk: u64, m: u64) -> u64 {
    // x = residue mod pk, x = 1 mod m / pk
    let rest = m / pk;
    if rest == 1 {
        return residue % m;
    }
    let inv = inv_mod(rest as i64, pk).expect("coprime factors");
    // x = 1 + rest * t with rest * t = residue - 1 mod pk
    let t = ((residue + pk - 1) % pk) as u128 * inv as u128 % pk as u128;
    ((1 + rest as u128 * t) % m as u128) as u64
}

impl UnitGroup {
    fn build(m: u64) -> Self {
        assert!(m >= 1);
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for (p, k) in factor(m) {
            let pk = p.pow(k);
            if p == 2 {
                if k == 2 {
                    gens.push(crt_lift(3, pk, m));
                    orders.push(2);
                } else if k >= 3 {
                    gens.push(crt_lift(pk - 1, pk, m));
                    orders.push(2);
                    gens.push(crt_lift(5, pk, m));
                    orders.push(pk / 4);
                }
            } else {
                let g = primitive_root(pk).expect("odd prime powers are cyclic");
                gens.push(crt_lift(g, pk, m));
                orders.push(pk / p * (p - 1));
            }
        }
        let ng = gens.len();
        let mut dlog = vec![u32::MAX; m as usize * ng.max(1)];
        let exponent = orders.iter().fold(1, |a, &b| lcm(a, b));
        // Walk all exponent tuples in mixed radix.
        let total: u64 = orders.iter().product();
        let mut tuple = vec![0u64; ng];
        let mut elt = 1 % m;
        for _ in 0..total {
            for i in 0..ng {
                dlog[elt as usize * ng + i] = tuple[i] as u32;
            }
            if ng == 0 {
                dlog[elt as usize] = 0;
            }
            // increment
            for i in 0..ng {
                tuple[i] += 1;
                elt = (elt as u128 * gens[i] as u128 % m as u128) as u64;
                if tuple[i] < orders[i] {
                    break;
                }
                tuple[i] = 0;
                // gens[i]^orders[i] = 1, so elt is already back on track
            }
        }
        UnitGroup {
            modulus: m,
            gens,
            orders,
            exponent,
            dlog,
        }
    }

    /// Shared instance for modulus `m`.
    pub fn get(m: u64) -> Arc<UnitGroup> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<UnitGroup>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("unit group cache poisoned");
        guard
            .entry(m)
            .or_insert_with(|| Arc::new(UnitGroup::build(m)))
            .clone()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[u64] {
        &self.gens
    }

    pub fn generator_orders(&self) -> &[u64] {
        &self.orders
    }

    /// Exponent of the group (lcm of generator orders).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponent vector of a unit, `None` for non-units.
    pub fn dlog(&self, a: i64) -> Option<&[u32]> {
        let m = self.modulus;
        let r = a.rem_euclid(m as i64) as usize;
        let ng = self.gens.len();
        if ng == 0 {
            return (gcd(r as u64, m) == 1).then_some(&[]);
        }
        let v = &self.dlog[r * ng..(r + 1) * ng];
        (v[0] != u32::MAX).then_some(v)
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.modulus).filter(move |&a| gcd(a, self.modulus) == 1)
    }
}

/// A Dirichlet character, stored by its exponents on the generators of
/// [`UnitGroup`]: `chi(g_i) = zeta_{n_i}^{e_i}`.
#[derive(Clone)]
pub struct MultiplicativeCharacter {
    group: Arc<UnitGroup>,
    exps: Vec<u64>,
}

impl PartialEq for MultiplicativeCharacter {
    fn eq(&self, o: &Self) -> bool {
        self.group.modulus == o.group.modulus && self.exps == o.exps
    }
}

impl Eq for MultiplicativeCharacter {}

impl std::hash::Hash for MultiplicativeCharacter {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.group.modulus.hash(state);
        self.exps.hash(state);
    }
}

impl fmt::Debug for MultiplicativeCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi_{}{:?}", self.group.modulus, self.exps)
    }
}

impl MultiplicativeCharacter {
    pub fn trivial(m: u64) -> Self {
        let group = UnitGroup::get(m);
        let exps = vec![0; group.gens.len()];
        MultiplicativeCharacter { group, exps }
    }

    pub fn from_exponents(m: u64, exps: Vec<u64>) -> Result<Self> {
        let group = UnitGroup::get(m);
        if exps.len() != group.gens.len() {
            return Err(Error::InvalidInput(format!(
                "modulus {m} has {} generators, got {} exponents",
                group.gens.len(),
                exps.len()
            )));
        }
        let exps = exps
            .iter()
            .zip(&group.orders)
            .map(|(e, n)| e % n)
            .collect();
        Ok(MultiplicativeCharacter { group, exps })
    }

    /// Character mod `m` whose value at each unit is `zeta_E^{f(a)}`, `E` the group exponent.
    /// `f` is only queried on the generators.
    pub fn from_value_exponents(m: u64, f: impl Fn(u64) -> u64) -> Result<Self> {
        let group = UnitGroup::get(m);
        let e = group.exponent;
        let mut exps = Vec::with_capacity(group.gens.len());
        for (&g, &n) in group.gens.iter().zip(&group.orders) {
            let v = f(g) % e;
            let scale = e / n;
            if !v.is_multiple_of(scale) {
                return Err(Error::InvalidInput(format!(
                    "value at generator {g} is not an {n}-th root of unity"
                )));
            }
            exps.push(v / scale);
        }
        Ok(MultiplicativeCharacter { group, exps })
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    /// Order of the character in the dual group.
    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.group.orders)
            .fold(1, |acc, (&e, &n)| lcm(acc, n / gcd(e, n)))
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// `chi(a)` as an exponent of `zeta_E`, `E` the exponent of `(Z/m)^x`; `None` off the units.
    pub fn value_exponent(&self, a: i64) -> Option<u64> {
        let g = &self.group;
        let d = g.dlog(a)?;
        let e = g.exponent;
        let mut acc = 0u64;
        for ((&x, &ex), &n) in d.iter().zip(&self.exps).zip(&g.orders) {
            acc = (acc + x as u64 * ex % n * (e / n)) % e;
        }
        Some(acc)
    }

    /// Order of the roots of unity returned by [`Self::value_exponent`].
    pub fn value_order(&self) -> u64 {
        self.group.exponent
    }

    /// `chi(a)` exactly; zero on non-units.
    pub fn value(&self, a: i64) -> CyclotomicNumber {
        let e = self.group.exponent;
        match self.value_exponent(a) {
            Some(k) => CyclotomicNumber::root_of_unity(e, k as i64),
            None => CyclotomicNumber::zero(e),
        }
    }

    pub fn conj(&self) -> Self {
        MultiplicativeCharacter {
            group: self.group.clone(),
            exps: self
                .exps
                .iter()
                .zip(&self.group.orders)
                .map(|(&e, &n)| (n - e) % n)
                .collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.modulus() != o.modulus() {
            return Err(Error::InvalidInput("characters of different moduli".into()));
        }
        Ok(MultiplicativeCharacter {
            group: self.group.clone(),
            exps: self
                .exps
                .iter()
                .zip(&o.exps)
                .zip(&self.group.orders)
                .map(|((&a, &b), &n)| (a + b) % n)
                .collect(),
        })
    }

    /// `chi(-1) = +-1`.
    pub fn parity(&self) -> i64 {
        match self.value_exponent(-1) {
            Some(0) => 1,
            _ => -1,
        }
    }

    /// Smallest `f | m` such that `chi` is trivial on units congruent to 1 mod `f`.
    pub fn conductor(&self) -> u64 {
        let m = self.modulus();
        for f in divisors(m) {
            let trivial_on_kernel = self
                .group
                .units()
                .filter(|&a| a % f == 1 % f)
                .all(|a| self.value_exponent(a as i64) == Some(0));
            if trivial_on_kernel {
                return f;
            }
        }
        m
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    /// Transport to another modulus `d`, where either `d` is a multiple of the
    /// conductor (induction or restriction through the primitive character).
    pub fn to_modulus(&self, d: u64) -> Result<Self> {
        let f = self.conductor();
        if !d.is_multiple_of(f) {
            return Err(Error::InvalidInput(format!(
                "modulus {d} is not a multiple of the conductor {f}"
            )));
        }
        let src_e = self.group.exponent;
        let target = UnitGroup::get(d);
        let te = target.exponent;
        let m = self.modulus();
        MultiplicativeCharacter::from_value_exponents(d, |g| {
            // any unit mod m congruent to g mod f
            let lift = (0..m)
                .map(|t| g % f + t * f)
                .find(|&x| gcd(x, m) == 1)
                .expect("units mod f lift to units mod m");
            let v = self.value_exponent(lift as i64).expect("unit");
            // v / src_e as a fraction of a full turn, re-expressed over te
            let num = v as u128 * te as u128;
            assert_eq!(num % src_e as u128, 0, "value order must divide the target exponent");
            (num / src_e as u128) as u64
        })
    }

    /// The component at `p`: the character of `(Z/p^k)^x` (`p^k || m`) with
    /// `chi = prod_p chi_(p)`. With `invert`, returns its inverse instead, which is
    /// the restriction to `Z_p^x` of the adelic local character.
    pub fn local_component(&self, p: u64, invert: bool) -> Result<Self> {
        let m = self.modulus();
        if !is_prime(p) || !m.is_multiple_of(p) {
            return Err(Error::InvalidInput(format!("{p} is not a prime divisor of {m}")));
        }
        let k = valuation(m, p);
        let pk = p.pow(k);
        let target = UnitGroup::get(pk);
        let te = target.exponent;
        let se = self.group.exponent;
        let chi = MultiplicativeCharacter::from_value_exponents(pk, |g| {
            let x = crt_lift(g, pk, m);
            let v = self.value_exponent(x as i64).expect("unit");
            let num = v as u128 * te as u128;
            (num / se as u128) as u64
        })?;
        Ok(if invert { chi.conj() } else { chi })
    }
}

/// All characters modulo `m`, in lexicographic order of exponent vectors.
pub fn enumerate_characters(m: u64) -> Vec<MultiplicativeCharacter> {
    let group = UnitGroup::get(m);
    let mut out = Vec::with_capacity(group.order() as usize);
    let mut tuple = vec![0u64; group.gens.len()];
    loop {
        out.push(MultiplicativeCharacter {
            group: group.clone(),
            exps: tuple.clone(),
        });
        let mut i = 0;
        loop {
            if i == tuple.len() {
                return out;
            }
            tuple[i] += 1;
            if tuple[i] < group.orders[i] {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

pub fn primitive_characters(m: u64) -> Vec<MultiplicativeCharacter> {
    enumerate_characters(m)
        .into_iter()
        .filter(|c| c.is_primitive())
        .collect()
}

/// `tau(chi) = sum_{a unit} chi(a) e^{2 pi i a / m}` as a sum of roots of unity.
pub fn gauss_sum_roots(chi: &MultiplicativeCharacter) -> RootSum {
    let m = chi.modulus();
    let e = chi.value_order();
    let l = lcm(m, e);
    let mut s = RootSum::zero(l);
    for a in chi.group.units() {
        let v = chi.value_exponent(a as i64).expect("unit");
        s.add_term((v * (l / e) + a * (l / m)) as i64, 1);
    }
    s
}

pub fn gauss_sum(chi: &MultiplicativeCharacter) -> CyclotomicNumber {
    gauss_sum_roots(chi).to_cyclotomic()
}

/// `x -> zeta_{p^k}^{u x}` on `Z/p^k`; the level is exactly `k` because `u` is a unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct AdditiveCharacter {
    pub p: u64,
    pub level: u32,
    pub unit: u64,
}

impl AdditiveCharacter {
    pub fn new(p: u64, level: u32, unit: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let pk = p.pow(level);
        let u = unit.rem_euclid(pk.max(1) as i64) as u64;
        if level > 0 && u.is_multiple_of(p) {
            return Err(Error::NonUnit {
                n: unit,
                modulus: pk,
            });
        }
        Ok(AdditiveCharacter { p, level, unit: u })
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.level)
    }

    /// `psi(x)` as an exponent of `zeta_{p^level}`.
    pub fn value_exponent(&self, x: i64) -> u64 {
        let pk = self.modulus();
        (x.rem_euclid(pk as i64) as u128 * self.unit as u128 % pk as u128) as u64
    }
}

/// `tau(chi, psi) = sum_{x in (Z/p^k)^x} chi(x) psi(x)` for `chi` modulo `p^k`.
///
/// `psi` may have any level up to `k`; a level above `k` does not define a
/// function on `Z/p^k` and is rejected.
pub fn local_gauss_sum_roots(
    chi: &MultiplicativeCharacter,
    psi: &AdditiveCharacter,
) -> Result<RootSum> {
    let m = chi.modulus();
    let p = psi.p;
    let k = if m == 1 { 0 } else { valuation(m, p) };
    if p.pow(k) != m {
        return Err(Error::InvalidInput(format!(
            "character modulus {m} is not a power of {p}"
        )));
    }
    if psi.level > k {
        return Err(Error::LevelMismatch {
            psi_level: psi.level,
            k,
        });
    }
    let e = chi.value_order();
    let pl = psi.modulus();
    let l = lcm(e, pl);
    let mut s = RootSum::zero(l);
    for x in chi.group.units() {
        let v = chi.value_exponent(x as i64).expect("unit");
        let w = psi.value_exponent(x as i64);
        s.add_term((v * (l / e) + w * (l / pl)) as i64, 1);
    }
    Ok(s)
}

pub fn local_gauss_sum(
    chi: &MultiplicativeCharacter,
    psi: &AdditiveCharacter,
) -> Result<CyclotomicNumber> {
    Ok(local_gauss_sum_roots(chi, psi)?.to_cyclotomic())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharacterSetLabel {
    SPrime(u64),
    S(u64),
    STilde(u64, u32),
    All(u64),
}

#[derive(Clone, Debug)]
pub struct CharacterSet {
    pub label: CharacterSetLabel,
    pub members: Vec<MultiplicativeCharacter>,
}

/// `S'(d)`: primitive characters with conductor `f | d`, `gcd(f, d/f) = 1`, `d/f` squarefree;
/// `S(d)`: the same characters induced to modulus `d`.
pub fn build_s_sets(d: u64) -> (CharacterSet, CharacterSet) {
    let mut sprime = Vec::new();
    for f in divisors(d) {
        let r = d / f;
        if gcd(f, r) == 1 && is_squarefree(r) {
            sprime.extend(primitive_characters(f));
        }
    }
    let s = sprime
        .iter()
        .map(|c| c.to_modulus(d).expect("d is a multiple of the conductor"))
        .collect();
    (
        CharacterSet {
            label: CharacterSetLabel::SPrime(d),
            members: sprime,
        },
        CharacterSet {
            label: CharacterSetLabel::S(d),
            members: s,
        },
    )
}

/// Characters of `Q_p^x` with `omega(p) = 1` trivial on `1 + p^k Z_p`, and nontrivial on
/// `1 + p^{k-1} Z_p` when `k >= 2`, recorded by their restriction to `(Z/p^k)^x`.
pub fn build_s_tilde(p: u64, k: u32) -> Result<CharacterSet> {
    if !is_prime(p) || k == 0 {
        return Err(Error::InvalidInput(format!("need a prime p and k >= 1, got p={p}, k={k}")));
    }
    let pk = p.pow(k);
    let members = if k == 1 {
        enumerate_characters(pk)
    } else {
        primitive_characters(pk)
    };
    Ok(CharacterSet {
        label: CharacterSetLabel::STilde(p, k),
        members,
    })
}

/// CRT split of `a -> e^{2 pi i n^{-1} a / d}` into characters `psi'_p` of level `v_p(d)`:
/// `psi'_p(x) = e^{2 pi i c_p x / p^{m_p}}` with `c_p = n^{-1} (d / p^{m_p})^{-1} mod p^{m_p}`.
pub fn crt_gauss_factorization(d: u64, n: i64) -> Result<Vec<(u64, AdditiveCharacter)>> {
    let ninv = inv_mod(n, d).ok_or(Error::NonUnit { n, modulus: d })?;
    let mut out = Vec::new();
    for (p, k) in factor(d) {
        let pk = p.pow(k);
        let e = inv_mod((d / pk) as i64, pk).expect("coprime cofactor");
        let c = (ninv % pk) * e % pk;
        out.push((p, AdditiveCharacter::new(p, k, c as i64)?));
    }
    Ok(out)
}

/// Both sides of `tau(chi-bar) chi-bar(n) = prod_p tau(chi_p, psi'_p)` for one `chi` mod `d`,
/// with `chi_p` the inverted local component.
pub fn crt_gauss_sides(
    chi: &MultiplicativeCharacter,
    n: i64,
    invert: bool,
) -> Result<(CyclotomicNumber, CyclotomicNumber)> {
    let d = chi.modulus();
    let cb = chi.conj();
    let lhs = gauss_sum(&cb).mul(&cb.value(n));
    let mut rhs = CyclotomicNumber::one(1);
    for (p, psi) in crt_gauss_factorization(d, n)? {
        let local = chi.local_component(p, invert)?;
        rhs = rhs.mul(&local_gauss_sum(&local, &psi)?);
    }
    Ok((lhs, rhs))
}

/// Exhaustive check of the CRT factorization for every `d <= dmax`, unit `n`, and `chi in S(d)`.
/// Returns the number of identities checked, or the first failure.
pub fn verify_crt_factorization_up_to(dmax: u64) -> Result<usize> {
    let mut count = 0;
    for d in 1..=dmax {
        let (_, s) = build_s_sets(d);
        for n in 1..=d as i64 {
            if gcd(n as u64, d) != 1 {
                continue;
            }
            for chi in &s.members {
                let (l, r) = crt_gauss_sides(chi, n, true)?;
                if l != r {
                    return Err(Error::Invariant(format!(
                        "CRT factorization fails for d={d}, n={n}, {chi:?}: {l} vs {r}"
                    )));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `tau(chi) tau(chi-bar) = chi(-1) m` for every primitive `chi` modulo `m <= mmax`.
pub fn verify_gauss_norms(mmax: u64) -> Result<usize> {
    let mut count = 0;
    for m in 1..=mmax {
        for chi in primitive_characters(m) {
            let prod = gauss_sum_roots(&chi).mul(&gauss_sum_roots(&chi.conj()));
            let expect = RootSum::monomial(prod.order(), 0, chi.parity() * m as i64);
            if !prod.eq_value(&expect) {
                return Err(Error::Invariant(format!(
                    "Gauss sum norm fails for {chi:?} modulo {m}"
                )));
            }
            count += 1;
        }
    }
    Ok(count)
}

/// Size of `(Z/m)^x`, exposed for reports.
pub fn unit_count(m: u64) -> u64 {
    euler_phi(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_characters(1).len(), 1);
        assert_eq!(enumerate_characters(5).len(), 4);
        let c12 = enumerate_characters(12);
        assert_eq!(c12.len(), 4);
        assert!(c12.iter().all(|c| c.order() <= 2));
        for m in 1..=64u64 {
            let all = enumerate_characters(m);
            assert_eq!(all.len() as u64, euler_phi(m));
            let set: std::collections::HashSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len());
        }
    }

    #[test]
    fn characters_are_multiplicative() {
        for m in [7u64, 16, 24, 45, 63] {
            for chi in enumerate_characters(m) {
                for a in 0..m as i64 {
                    for b in 0..m as i64 {
                        let lhs = chi.value_exponent(a * b);
                        let rhs = match (chi.value_exponent(a), chi.value_exponent(b)) {
                            (Some(x), Some(y)) => Some((x + y) % chi.value_order()),
                            _ => None,
                        };
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn conductors() {
        assert_eq!(MultiplicativeCharacter::trivial(12).conductor(), 1);
        // 7 = 1 mod 3 and 5 = 1 mod 4, so chi(7) = 1 forces the 4-part trivial
        let c = enumerate_characters(12)
            .into_iter()
            .find(|c| c.value_exponent(7) == Some(0) && c.value_exponent(5).unwrap() != 0)
            .unwrap();
        assert_eq!(c.conductor(), 3);
        let c = enumerate_characters(12)
            .into_iter()
            .find(|c| c.value_exponent(5) == Some(0) && c.value_exponent(7).unwrap() != 0)
            .unwrap();
        assert_eq!(c.conductor(), 4);
        for c in enumerate_characters(5).into_iter().filter(|c| !c.is_trivial()) {
            assert_eq!(c.conductor(), 5);
        }
        // counts of primitive characters: multiplicative function with p^k -> phi(p^k) - phi(p^{k-1})
        assert_eq!(primitive_characters(8).len(), 2);
        assert_eq!(primitive_characters(4).len(), 1);
        assert_eq!(primitive_characters(2).len(), 0);
        assert_eq!(primitive_characters(25).len(), 16);
    }

    #[test]
    fn gauss_sums() {
        assert_eq!(gauss_sum(&MultiplicativeCharacter::trivial(1)), CyclotomicNumber::one(1));
        let q3 = enumerate_characters(3).into_iter().find(|c| !c.is_trivial()).unwrap();
        let expect = CyclotomicNumber::zeta(3).sub(&CyclotomicNumber::root_of_unity(3, 2));
        assert_eq!(gauss_sum(&q3), expect);
        assert_eq!(verify_gauss_norms(40).unwrap(), (1..=40).map(|m| primitive_characters(m).len()).sum::<usize>());
    }

    #[test]
    fn local_gauss_sums() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let psi = AdditiveCharacter::new(p, 1, 1).unwrap();
            let t = local_gauss_sum(&MultiplicativeCharacter::trivial(p), &psi).unwrap();
            assert_eq!(t, CyclotomicNumber::from_integer(-1, 1));
        }
        for p in [2u64, 3, 5] {
            let psi2 = AdditiveCharacter::new(p, 2, 1).unwrap();
            let psi1 = AdditiveCharacter::new(p, 1, 1).unwrap();
            for chi in primitive_characters(p * p) {
                let t = local_gauss_sum_roots(&chi, &psi2).unwrap();
                let n = t.mul(&t.conj());
                assert_eq!(n.to_integer(), Some((p * p) as i64));
                assert!(local_gauss_sum_roots(&chi, &psi1).unwrap().is_zero());
            }
        }
        let psi3 = AdditiveCharacter::new(3, 3, 1).unwrap();
        assert!(matches!(
            local_gauss_sum(&MultiplicativeCharacter::trivial(9), &psi3),
            Err(Error::LevelMismatch { .. })
        ));
    }

    #[test]
    fn s_sets() {
        for p in [2u64, 3, 5, 7] {
            assert_eq!(build_s_sets(p).1.members.len() as u64, p - 1);
            let (_, s) = build_s_sets(p * p);
            assert!(s.members.iter().all(|c| c.conductor() == p * p));
        }
        let (sp, s) = build_s_sets(12);
        assert_eq!(s.members.len(), 2);
        let mut conds: Vec<u64> = sp.members.iter().map(|c| c.conductor()).collect();
        conds.sort();
        assert_eq!(conds, vec![4, 12]);
        assert_eq!(build_s_tilde(5, 1).unwrap().members.len(), 4);
        assert_eq!(build_s_tilde(5, 2).unwrap().members.len(), 16);
        assert_eq!(build_s_tilde(2, 1).unwrap().members.len(), 1);
    }

    #[test]
    fn local_components_multiply_back() {
        for d in [12u64, 36, 60, 90] {
            for chi in enumerate_characters(d) {
                let parts: Vec<_> = factor(d)
                    .into_iter()
                    .map(|(p, _)| chi.local_component(p, false).unwrap())
                    .collect();
                for a in chi.group().units() {
                    let mut acc = 0u64;
                    for part in &parts {
                        let v = part.value_exponent(a as i64).unwrap();
                        acc += v * (chi.value_order() / part.value_order());
                    }
                    assert_eq!(acc % chi.value_order(), chi.value_exponent(a as i64).unwrap());
                }
            }
        }
    }

    #[test]
    fn crt_factorization_small_cases() {
        // d = 1: empty product, tau(trivial) = 1
        assert!(crt_gauss_factorization(1, 1).unwrap().is_empty());
        for p in [2u64, 3, 5, 7, 11, 13] {
            for chi in build_s_sets(p).1.members {
                let (l, r) = crt_gauss_sides(&chi, 1, true).unwrap();
                assert_eq!(l, r);
            }
        }
        for chi in build_s_sets(12).1.members {
            let (l, r) = crt_gauss_sides(&chi, 5, true).unwrap();
            assert_eq!(l, r);
        }
        assert!(matches!(crt_gauss_factorization(12, 4), Err(Error::NonUnit { .. })));
    }

    #[test]
    fn uninverted_local_component_breaks_crt() {
        // A primitive character of order 4 mod 5: chi_(p) and its inverse differ,
        // and only the inverse satisfies the identity.
        let chi = primitive_characters(5).into_iter().find(|c| c.order() == 4).unwrap();
        let (l, r) = crt_gauss_sides(&chi, 1, false).unwrap();
        assert_ne!(l, r);
    }
}
