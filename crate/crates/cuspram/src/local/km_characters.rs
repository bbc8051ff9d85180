//! The characters `Phi_x` of `K_m / K_2m` attached to `x in K_0` in the
//! ramified case, and the map `h_{a,d}` used to separate them.
//!
//! With `x = [[a, b], [pc, d]]` and `y = [[1+s, t], [pu, 1+v]]` in `K_m`,
//! `Phi_x(y)` is defined by `psi(tr'(xy)) psi'(det(xy)) = psi(tr' x) psi'(det x) Phi_x(y)`
//! and should equal `psi(at + bv - cs - du) psi'((ad - pbc)(s + v))`.
//! Everything is an exponent of `zeta_{p^m}`: `psi = psi_u` has level `m` and
//! `psi'(z) = psi_1(p^(m - m') lambda z)` has level `m'`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::characters::UnitGroup;
use crate::error::{Error, Result};
use crate::gl2::{FiniteGroupModel, GroupCase};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KmReport {
    pub case: GroupCase,
    /// Number of `(psi, psi')` pairs checked.
    pub characters: usize,
    pub cosets: usize,
    pub kernel_size: usize,
    pub closed_form: bool,
    pub multiplicative: bool,
    pub coset_constant: bool,
    pub distinct: bool,
    /// `h_{a,d}` injective on `(Z/p^e)^2` with `e = floor(m/2)`.
    pub h_injective: bool,
    /// The same with `e = ceil(m/2)`.
    pub h_injective_ceil: bool,
}

impl KmReport {
    pub fn passed(&self) -> bool {
        self.closed_form && self.multiplicative && self.coset_constant && self.distinct && self.h_injective
    }
}

struct Coords {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

fn coords(g: &FiniteGroupModel, i: u32) -> Coords {
    let e = g.elem(i).e;
    Coords {
        a: e[0] as i64,
        b: e[1] as i64,
        c: e[2] as i64,
        d: e[3] as i64,
    }
}

fn tr_prime(g: &FiniteGroupModel, i: u32) -> i64 {
    let x = coords(g, i);
    x.b - x.c
}

pub fn km_identities(p: u64, m: u32, budget: u64) -> Result<KmReport> {
    let case = GroupCase::new(p, m, true);
    let g = FiniteGroupModel::build(case, budget)?;
    km_identities_on(&g)
}

pub fn km_identities_on(g: &FiniteGroupModel) -> Result<KmReport> {
    let case = g.case();
    if !case.is_ramified() {
        return Err(Error::InvalidInput(format!("{case} is not a ramified case")));
    }
    let (p, m) = (case.p() as i64, case.m());
    let q = g.modulus() as i64;
    let md = |x: i64| x.rem_euclid(q);
    let base: Vec<u32> = g.elements().filter(|&i| g.elem(i).j == 0).collect();
    let kernel: Vec<u32> = base.iter().copied().filter(|&i| g.in_filtration(i, m)).collect();

    // cosets x K_m, labelled by their least element id
    let mut coset = HashMap::new();
    for &x in &base {
        let label = kernel.iter().map(|&y| g.mul(x, y)).min().expect("K_m contains 1");
        coset.insert(x, label);
    }
    let n_cosets = {
        let mut v: Vec<u32> = coset.values().copied().collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    };

    let mut report = KmReport {
        case,
        characters: 0,
        cosets: n_cosets,
        kernel_size: kernel.len(),
        closed_form: true,
        multiplicative: true,
        coset_constant: true,
        distinct: true,
        h_injective: true,
        h_injective_ceil: true,
    };

    let kpos: HashMap<u32, usize> = kernel.iter().enumerate().map(|(k, &y)| (y, k)).collect();
    for u in UnitGroup::get(q as u64).units() {
        let u = u as i64;
        for mp in 1..=m {
            let shift = p.pow(m - mp);
            for lambda in UnitGroup::get(p.pow(mp) as u64).units() {
                let w = shift * lambda as i64;
                report.characters += 1;
                let mut by_coset: HashMap<u32, Vec<i64>> = HashMap::new();
                for &x in &base {
                    let (tx, dx) = (tr_prime(g, x), g.udet(x) as i64);
                    let cx = coords(g, x);
                    let phi: Vec<i64> = kernel
                        .iter()
                        .map(|&y| {
                            let xy = g.mul(x, y);
                            let lhs = md(u * (tr_prime(g, xy) - tx) + w * (g.udet(xy) as i64 - dx));
                            let cy = coords(g, y);
                            let (s, t, uu, v) = (cy.a - 1, cy.b, cy.c, cy.d - 1);
                            let rhs = md(u * (cx.a * t + cx.b * v - cx.c * s - cx.d * uu)
                                + w * (cx.a * cx.d - p * cx.b * cx.c) * (s + v));
                            if lhs != rhs {
                                report.closed_form = false;
                            }
                            lhs
                        })
                        .collect();
                    if report.multiplicative {
                        'outer: for (i1, &y1) in kernel.iter().enumerate() {
                            for (i2, &y2) in kernel.iter().enumerate() {
                                let k = kpos[&g.mul(y1, y2)];
                                if md(phi[i1] + phi[i2]) != phi[k] {
                                    report.multiplicative = false;
                                    break 'outer;
                                }
                            }
                        }
                    }
                    match by_coset.get(&coset[&x]) {
                        Some(prev) if *prev != phi => report.coset_constant = false,
                        Some(_) => {}
                        None => {
                            by_coset.insert(coset[&x], phi);
                        }
                    }
                }
                let mut all: Vec<&Vec<i64>> = by_coset.values().collect();
                all.sort();
                all.dedup();
                if all.len() != n_cosets {
                    report.distinct = false;
                }
            }
        }
    }

    report.h_injective = h_injective_all(p as u64, m, m / 2);
    report.h_injective_ceil = h_injective_all(p as u64, m, m.div_ceil(2));
    Ok(report)
}

/// `h_{a,d}(b, c) = (b + p^(m-m') lambda (ad - pbc), -c + p^(m-m') lambda (ad - pbc))` on `(Z/p^e)^2`.
#[allow(clippy::too_many_arguments)]
pub fn h_map(p: u64, m: u32, mp: u32, lambda: u64, e: u32, a: u64, d: u64, b: u64, c: u64) -> (u64, u64) {
    let n = p.pow(e) as i128;
    let w = p.pow(m - mp) as i128 * lambda as i128;
    let det = a as i128 * d as i128 - p as i128 * b as i128 * c as i128;
    let x = (b as i128 + w * det).rem_euclid(n);
    let y = (-(c as i128) + w * det).rem_euclid(n);
    (x as u64, y as u64)
}

/// Injectivity of every `h_{a,d}` with `a, d` units mod `p^e`, over all `m'` and `lambda`.
pub fn h_injective_all(p: u64, m: u32, e: u32) -> bool {
    let n = p.pow(e);
    let units: Vec<u64> = (0..n).filter(|x| n == 1 || x % p != 0).collect();
    for mp in 1..=m {
        for lambda in UnitGroup::get(p.pow(mp)).units() {
            for &a in &units {
                for &d in &units {
                    let mut seen = vec![false; (n * n) as usize];
                    for b in 0..n {
                        for c in 0..n {
                            let (x, y) = h_map(p, m, mp, lambda, e, a, d, b, c);
                            let k = (x * n + y) as usize;
                            if seen[k] {
                                return false;
                            }
                            seen[k] = true;
                        }
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl2::DEFAULT_BUDGET;

    #[test]
    fn small_ramified_cases() {
        for (p, m) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let r = km_identities(p, m, DEFAULT_BUDGET).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.h_injective_ceil, "{r:?}");
        }
    }

    #[test]
    fn coset_count_is_the_index_of_k_m() {
        // K_0/K_1 = (F_p^x)^2, and K_1/K_2 has order p^2
        let r = km_identities(3, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.cosets, 4);
        assert_eq!(r.kernel_size, 9);
    }

    #[test]
    fn phi_of_the_identity() {
        // a = d = 1, b = c = 0: Phi(y) = psi(t - u) psi'(s + v)
        let g = FiniteGroupModel::build(GroupCase::new(3, 2, true), DEFAULT_BUDGET).unwrap();
        let q = 9i64;
        let one = g.identity();
        for y in g.elements().filter(|&y| g.in_filtration(y, 2)) {
            let xy = g.mul(one, y);
            let cy = coords(&g, y);
            let (s, t, u, v) = (cy.a - 1, cy.b, cy.c, cy.d - 1);
            let lhs = (tr_prime(&g, xy) - tr_prime(&g, one) + 3 * (g.udet(xy) as i64 - 1)).rem_euclid(q);
            assert_eq!(lhs, (t - u + 3 * (s + v)).rem_euclid(q));
        }
    }

    #[test]
    fn rejects_unramified() {
        let g = FiniteGroupModel::build(GroupCase::new(2, 1, false), DEFAULT_BUDGET).unwrap();
        assert!(km_identities_on(&g).is_err());
    }
}
