//! Exact character tables by the Dixon-Schneider method.
//!
//! A random combination `M = sum_j w_j M_j` of the class-multiplication
//! matrices is diagonalised over `F_l` (`l = 1 mod exponent`). Its eigenvectors
//! are the vectors `omega_k = |C_k| chi(g_k) / chi(1)`. Values are lifted to
//! eigenvalue multiplicities through the power maps, which gives each
//! character value as an exact sum of roots of unity.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::group::FiniteGroupModel;
use crate::arith::cyclotomic::RootSum;
use crate::arith::int::lcm;
use crate::arith::modp::{prime_one_mod, solve, split_roots, Fp};
use crate::characters::{MultiplicativeCharacter, UnitGroup};
use crate::error::{Error, Result};

/// One irreducible character. `values[k]` lists `(j, m)`: the eigenvalue
/// `zeta_o^j` (`o` the order of class `k`) occurs with multiplicity `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharacterRow {
    pub dim: u64,
    pub values: Vec<Vec<(u32, u32)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterTable {
    pub exponent: u64,
    pub class_orders: Vec<u32>,
    pub rows: Vec<CharacterRow>,
}

fn normalise(mut v: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    v.retain(|&(_, m)| m != 0);
    v.sort_unstable();
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(v.len());
    for (j, m) in v {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += m,
            _ => out.push((j, m)),
        }
    }
    out
}

impl CharacterRow {
    /// Value at class `k` as a root sum of order `order` (a multiple of the class order).
    pub fn value_in(&self, k: usize, class_order: u32, order: u64) -> RootSum {
        assert_eq!(order % class_order as u64, 0);
        let step = (order / class_order as u64) as i64;
        let mut r = RootSum::zero(order);
        for &(j, m) in &self.values[k] {
            r.add_term(j as i64 * step, m as i64);
        }
        r
    }

    /// True when the value at class `k` equals the degree.
    pub fn is_trivial_at(&self, k: usize) -> bool {
        self.values[k].len() == 1 && self.values[k][0].0 == 0
    }

    /// Image under `zeta -> zeta^s` for `s` a unit modulo the exponent.
    pub fn galois(&self, s: u64, orders: &[u32]) -> CharacterRow {
        let values = self
            .values
            .iter()
            .zip(orders)
            .map(|(v, &o)| {
                normalise(
                    v.iter()
                        .map(|&(j, m)| ((j as u64 * s % o as u64) as u32, m))
                        .collect(),
                )
            })
            .collect();
        CharacterRow { dim: self.dim, values }
    }

    /// The contragredient character `g -> conj(chi(g))`.
    pub fn contragredient(&self, orders: &[u32]) -> CharacterRow {
        let values = self
            .values
            .iter()
            .zip(orders)
            .map(|(v, &o)| normalise(v.iter().map(|&(j, m)| ((o - j) % o, m)).collect()))
            .collect();
        CharacterRow { dim: self.dim, values }
    }

    /// `g -> eta(udet g) chi(g)`.
    pub fn twist(&self, g: &FiniteGroupModel, eta: &MultiplicativeCharacter) -> Result<CharacterRow> {
        let q = g.modulus();
        let eta = if eta.modulus() == q { eta.clone() } else { eta.to_modulus(q)? };
        let e = eta.group().exponent();
        let values = g
            .classes()
            .iter()
            .zip(&self.values)
            .map(|(c, v)| {
                let x = eta.value_exponent(g.udet(c.rep) as i64).expect("udet is a unit");
                let o = c.order as u64;
                let num = x as u128 * o as u128;
                debug_assert_eq!(num % e as u128, 0);
                let s = (num / e as u128) as u64 % o;
                normalise(
                    v.iter()
                        .map(|&(j, m)| (((j as u64 + s) % o) as u32, m))
                        .collect(),
                )
            })
            .collect();
        Ok(CharacterRow { dim: self.dim, values })
    }
}

impl CharacterTable {
    pub fn value(&self, row: usize, k: usize) -> RootSum {
        let o = self.class_orders[k];
        self.rows[row].value_in(k, o, o as u64)
    }

    /// Values of every row at every class, reduced into `F_l` via `zeta_E -> z`.
    fn reduce(&self, f: Fp, z: u64) -> Vec<Vec<u64>> {
        let e = self.exponent;
        self.rows
            .iter()
            .map(|r| {
                r.values
                    .iter()
                    .zip(&self.class_orders)
                    .map(|(v, &o)| {
                        let step = e / o as u64;
                        v.iter().fold(0, |acc, &(j, m)| {
                            f.add(acc, f.mul(m as u64 % f.l, f.pow(z, j as u64 * step)))
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Exact validation: row count, degrees, closure of the row set under
    /// `Gal(Q(zeta_E)/Q)`, and both orthogonality relations modulo two primes
    /// `l_1, l_2 = 1 mod E`.
    ///
    /// Since the row set is Galois stable, an orthogonality defect `a` is
    /// divisible by every prime above `l_i`, hence by `l_1 l_2`; every conjugate
    /// of `a` is bounded by `|G| (max dim^2 + 1) < l_1 l_2`, so `a = 0`.
    pub fn verify(&self, g: &FiniteGroupModel) -> Result<()> {
        let classes = g.classes();
        let r = classes.len();
        let order = g.order();
        let fail = |msg: String| Err(Error::Invariant(format!("{}: {msg}", g.case())));
        if self.rows.len() != r {
            return fail(format!("{} rows for {r} classes", self.rows.len()));
        }
        if self.rows.iter().map(|x| x.dim * x.dim).sum::<u64>() != order {
            return fail("sum of squared degrees differs from |G|".into());
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.is_trivial_at(0) || row.values[0][0].1 as u64 != row.dim {
                return fail(format!("row {i}: value at 1 is not the degree"));
            }
            for v in &row.values {
                if v.iter().map(|&(_, m)| m as u64).sum::<u64>() != row.dim {
                    return fail(format!("row {i}: multiplicities do not add up to the degree"));
                }
            }
        }
        let lookup: HashMap<&CharacterRow, usize> =
            self.rows.iter().enumerate().map(|(i, x)| (x, i)).collect();
        if lookup.len() != r {
            return fail("repeated rows".into());
        }
        for &s in UnitGroup::get(self.exponent).generators() {
            for row in &self.rows {
                if !lookup.contains_key(&row.galois(s, &self.class_orders)) {
                    return fail(format!("row set not stable under zeta -> zeta^{s}"));
                }
            }
        }
        let max_dim = self.rows.iter().map(|x| x.dim).max().unwrap_or(1) as u128;
        let bound = order as u128 * (max_dim * max_dim + 1);
        let l1 = prime_one_mod(self.exponent, 1 << 30);
        let l2 = prime_one_mod(self.exponent, l1);
        if l2 >= 1 << 32 || (l1 as u128 * l2 as u128) <= bound {
            return fail("no verification primes in range".into());
        }
        let inv_class = g.inverse_classes();
        for l in [l1, l2] {
            let f = Fp::new(l);
            let z = f.root_of_unity(self.exponent);
            let vals = self.reduce(f, z);
            // first relation: sum_k |C_k| chi_a(g_k) chi_b(g_k^-1) = |G| delta_ab
            let weighted: Vec<Vec<u64>> = vals
                .iter()
                .map(|row| {
                    (0..r)
                        .map(|k| f.mul(classes[k].size % l, row[inv_class[k] as usize]))
                        .collect()
                })
                .collect();
            for a in 0..r {
                for b in 0..r {
                    let s = dot(f, &vals[a], &weighted[b]);
                    let want = if a == b { order % l } else { 0 };
                    if s != want {
                        return fail(format!("first orthogonality fails for rows {a}, {b}"));
                    }
                }
            }
            // second relation: sum_chi chi(g_k) chi(g_j^-1) = delta_kj |G| / |C_k|
            let cols: Vec<Vec<u64>> = (0..r).map(|k| vals.iter().map(|x| x[k]).collect()).collect();
            for k in 0..r {
                for j in 0..r {
                    let s = dot(f, &cols[k], &cols[inv_class[j] as usize]);
                    let want = if k == j { (order / classes[k].size) % l } else { 0 };
                    if s != want {
                        return fail(format!("second orthogonality fails for classes {k}, {j}"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn dot(f: Fp, a: &[u64], b: &[u64]) -> u64 {
    let mut acc: u128 = 0;
    for (x, y) in a.iter().zip(b) {
        acc += (*x as u128) * (*y as u128);
    }
    (acc % f.l as u128) as u64
}

fn mat_vec(f: Fp, m: &[u64], r: usize, v: &[u64]) -> Vec<u64> {
    (0..r).map(|k| dot(f, &m[k * r..(k + 1) * r], v)).collect()
}

/// Compute the table, retrying with fresh random data if an eigenvalue repeats.
pub fn character_table(g: &FiniteGroupModel) -> Result<CharacterTable> {
    let mut last = None;
    for seed in 0..4u64 {
        match dixon_schneider(g, seed) {
            Ok(t) => {
                t.verify(g)?;
                return Ok(t);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

fn dixon_schneider(g: &FiniteGroupModel, seed: u64) -> Result<CharacterTable> {
    let classes = g.classes();
    let r = classes.len();
    let exponent = g.exponent();
    let f = Fp::new(prime_one_mod(exponent, 1 << 30));
    let l = f.l;
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1c0 + seed);
    let weights: Vec<u64> = (0..r).map(|_| rng.random_range(1..l)).collect();

    // M[k][l] = sum_{x} w_{cls(x)} [x^-1 g_l in C_k]
    let mut m = vec![0u64; r * r];
    let mut col = vec![0u64; r];
    for (li, c) in classes.iter().enumerate() {
        col.iter_mut().for_each(|x| *x = 0);
        for x in g.elements() {
            let k = g.class_of(g.mul(g.inv(x), c.rep)) as usize;
            col[k] += weights[g.class_of(x) as usize];
        }
        for k in 0..r {
            m[k * r + li] = col[k] % l;
        }
    }

    // Krylov sequence v, Mv, ..., M^r v and the minimal polynomial of v.
    let mut krylov: Vec<Vec<u64>> = Vec::with_capacity(r + 1);
    krylov.push((0..r).map(|_| rng.random_range(0..l)).collect());
    for i in 0..r {
        let next = mat_vec(f, &m, r, &krylov[i]);
        krylov.push(next);
    }
    let system: Vec<Vec<u64>> = (0..r).map(|k| (0..r).map(|i| krylov[i][k]).collect()).collect();
    let coeffs = solve(f, system, krylov[r].clone())
        .ok_or_else(|| Error::Invariant("random vector is not cyclic for the class matrix".into()))?;
    let mut mu: Vec<u64> = coeffs.iter().map(|&c| f.neg(c)).collect();
    mu.push(1);
    let roots = split_roots(f, &mu, seed)
        .ok_or_else(|| Error::Invariant("class matrix has repeated eigenvalues".into()))?;
    if roots.len() != r {
        return Err(Error::Invariant(format!("{} eigenvalues for {r} classes", roots.len())));
    }

    let inv_class = g.inverse_classes();
    let order = g.order();
    let mut chars: Vec<(u64, Vec<u64>)> = Vec::with_capacity(r);
    for &lam in &roots {
        // eigenvector q(M) v with q = mu / (x - lam)
        let mut b = vec![0u64; r];
        b[r - 1] = 1;
        for i in (1..r).rev() {
            b[i - 1] = f.add(mu[i], f.mul(lam, b[i]));
        }
        let mut w = vec![0u128; r];
        for (i, bi) in b.iter().enumerate() {
            if *bi == 0 {
                continue;
            }
            for (acc, x) in w.iter_mut().zip(&krylov[i]) {
                *acc += *bi as u128 * *x as u128;
                if *acc >= 1 << 120 {
                    *acc %= l as u128;
                }
            }
        }
        let w: Vec<u64> = w.iter().map(|x| (x % l as u128) as u64).collect();
        if w[0] == 0 {
            return Err(Error::Invariant("eigenvector vanishes at the identity class".into()));
        }
        let w0 = f.inv(w[0]);
        let omega: Vec<u64> = w.iter().map(|&x| f.mul(x, w0)).collect();
        let mut s = 0;
        for k in 0..r {
            let t = f.mul(omega[k], omega[inv_class[k] as usize]);
            s = f.add(s, f.mul(t, f.inv(classes[k].size % l)));
        }
        let d2 = f.mul(order % l, f.inv(s));
        let dim = f
            .integer_sqrt_of_square(d2)
            .filter(|&d| d > 0 && d * d <= order)
            .ok_or_else(|| Error::Invariant(format!("degree squared {d2} is not a square")))?;
        let vals: Vec<u64> = (0..r)
            .map(|k| f.mul(f.mul(omega[k], dim), f.inv(classes[k].size % l)))
            .collect();
        chars.push((dim, vals));
    }

    let z = f.root_of_unity(exponent);
    let power_maps = g.power_maps();
    let class_orders: Vec<u32> = classes.iter().map(|c| c.order).collect();
    let mut rows: Vec<CharacterRow> = chars
        .iter()
        .map(|(dim, _)| CharacterRow {
            dim: *dim,
            values: Vec::with_capacity(r),
        })
        .collect();
    for (k, c) in classes.iter().enumerate() {
        let o = c.order as u64;
        let zo = f.pow(z, exponent / o);
        let zinv: Vec<u64> = (0..o).map(|t| f.pow(zo, (o - t) % o)).collect();
        let o_inv = f.inv(o % l);
        let pm = &power_maps[k];
        for (row, (dim, vals)) in rows.iter_mut().zip(&chars) {
            let series: Vec<u64> = pm.iter().map(|&c| vals[c as usize]).collect();
            let mut entry = Vec::new();
            let mut total = 0u64;
            for j in 0..o {
                let mut acc: u128 = 0;
                for (t, &x) in series.iter().enumerate() {
                    acc += x as u128 * zinv[(j * t as u64 % o) as usize] as u128;
                }
                let mult = f.mul((acc % l as u128) as u64, o_inv);
                if mult > *dim {
                    return Err(Error::Invariant(format!(
                        "class {k}: eigenvalue multiplicity {mult} exceeds degree {dim}"
                    )));
                }
                if mult > 0 {
                    entry.push((j as u32, mult as u32));
                    total += mult;
                }
            }
            if total != *dim {
                return Err(Error::Invariant(format!("class {k}: multiplicities sum to {total}")));
            }
            row.values.push(entry);
        }
    }
    rows.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.values.cmp(&b.values)));
    Ok(CharacterTable {
        exponent,
        class_orders,
        rows,
    })
}

/// Conductor of a unit-group character value pattern, used when naming fields:
/// the least `f | E` such that the stabilizer contains every unit `= 1 mod f`.
pub fn stabilizer_conductor(e: u64, stab: &[u64]) -> u64 {
    let mut divs = crate::arith::int::divisors(e);
    divs.sort_unstable();
    for f in divs {
        let all = UnitGroup::get(e)
            .units()
            .filter(|&u| (u - 1) % f == 0)
            .all(|u| stab.binary_search(&u).is_ok());
        if all {
            return f;
        }
    }
    e
}

/// Units `s mod E` fixing the row.
pub fn galois_stabilizer(row: &CharacterRow, t: &CharacterTable) -> Vec<u64> {
    UnitGroup::get(t.exponent)
        .units()
        .filter(|&s| row.galois(s, &t.class_orders) == *row)
        .collect()
}

/// Lowest common order in which every value of the table and of
/// additive characters mod `q` can be written.
pub fn common_order(t: &CharacterTable, q: u64) -> u64 {
    lcm(t.exponent, q)
}

#[cfg(test)]
mod tests {
    use super::super::group::{GroupCase, DEFAULT_BUDGET};
    use super::*;

    fn table(p: u64, m: u32, ram: bool) -> (FiniteGroupModel, CharacterTable) {
        let g = FiniteGroupModel::build(GroupCase::new(p, m, ram), DEFAULT_BUDGET).unwrap();
        let t = character_table(&g).unwrap();
        (g, t)
    }

    #[test]
    fn s3_table() {
        let (_, t) = table(2, 1, false);
        let dims: Vec<u64> = t.rows.iter().map(|r| r.dim).collect();
        assert_eq!(dims, vec![1, 1, 2]);
        assert!(t.rows[0].values.iter().all(|v| v == &vec![(0, 1)]));
    }

    #[test]
    fn gl2_f3_degrees() {
        let (_, t) = table(3, 1, false);
        let dims: Vec<u64> = t.rows.iter().map(|r| r.dim).collect();
        assert_eq!(dims, vec![1, 1, 2, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn ramified_tables_verify() {
        for (p, m) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let (g, t) = table(p, m, true);
            assert_eq!(t.rows.len(), g.classes().len());
        }
    }

    #[test]
    fn tampered_table_is_rejected() {
        let (g, mut t) = table(3, 1, false);
        let last = t.rows.len() - 1;
        let k = t.rows[last].values.len() - 1;
        let o = t.class_orders[k];
        let v = &mut t.rows[last].values[k];
        v[0].0 = (v[0].0 + 1) % o;
        assert!(t.verify(&g).is_err());
    }

    #[test]
    fn twists_and_duals_stay_in_the_table() {
        let (g, t) = table(5, 1, false);
        let set: std::collections::HashSet<&CharacterRow> = t.rows.iter().collect();
        for eta in crate::characters::enumerate_characters(5) {
            for row in &t.rows {
                assert!(set.contains(&row.twist(&g, &eta).unwrap()));
                assert!(set.contains(&row.contragredient(&t.class_orders)));
            }
        }
    }
}
