//! Local constants of strongly cuspidal characters: Bushnell's epsilon
//! factors, the character sums `T(xi, psi, psi')`, and the identity between
//! the twisted Gauss-sum combination of epsilons and a single weighted sum.
//!
//! All sums run over conjugacy classes of the finite quotient. With `c` the
//! element of the inducing datum, `psi(tr(c x))` is a level-`m` character of
//! `tr x` (unramified, `c = p^(1-m) I`) or of `tr' x = beta - gamma` (ramified).
//! Additive characters passed here are these folded level-`m` characters.

pub mod km_characters;
pub mod sweep;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::cyclotomic::{CyclotomicNumber, RootSum};
use crate::arith::float::ComplexBig;
use crate::arith::int::lcm;
use crate::characters::{build_s_tilde, local_gauss_sum_roots, AdditiveCharacter};
use crate::error::{Error, Result};
use crate::gl2::serial::table_with_cache;
use crate::gl2::{classify_irreps, CharacterRow, CharacterTable, FiniteGroupModel, GroupCase, IrrepData};

struct DomainClass {
    k: usize,
    size: u64,
    trace: u64,
    det: u64,
}

/// A group, its character table and classification, with the class data the
/// local sums need.
pub struct LocalContext {
    group: FiniteGroupModel,
    table: CharacterTable,
    irreps: Vec<IrrepData>,
    order: u64,
    domain: Vec<DomainClass>,
}

#[derive(Clone, Debug)]
pub struct EpsilonValue {
    pub exact: CyclotomicNumber,
    pub numeric: ComplexBig,
}

impl EpsilonValue {
    /// `log2 | |eps|^2 - 1 |`, or `-inf` when exact.
    pub fn unit_defect_log2(&self) -> f64 {
        let n = self.numeric.norm_sqr();
        let one = crate::arith::float::BigFloat::one(n.precision());
        let d = n.sub(&one);
        if d.is_zero() {
            f64::NEG_INFINITY
        } else {
            d.log2_abs()
        }
    }

    /// `eps * conj(eps) = 1`, exactly.
    pub fn is_unit_modulus(&self) -> bool {
        let n = self.exact.mul(&self.exact.conj());
        n == CyclotomicNumber::one(n.order())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TSumResult {
    pub case: GroupCase,
    pub irrep: usize,
    pub psi_level: u32,
    pub psi_unit: u64,
    pub k: u32,
    pub lambda: u64,
    pub value: CyclotomicNumber,
    pub is_zero: bool,
}

#[derive(Clone, Debug)]
pub struct TwistedSumCheck {
    pub lhs: CyclotomicNumber,
    pub rhs: CyclotomicNumber,
    pub equal: bool,
}

impl LocalContext {
    pub fn build(case: GroupCase, budget: u64, cache: Option<&Path>) -> Result<Self> {
        let g = FiniteGroupModel::build(case, budget)?;
        let t = table_with_cache(&g, cache)?;
        Self::from_parts(g, t)
    }

    pub fn from_parts(group: FiniteGroupModel, table: CharacterTable) -> Result<Self> {
        let irreps = classify_irreps(&group, &table)?;
        let order = lcm(table.exponent, group.modulus());
        let domain = group
            .classes()
            .iter()
            .enumerate()
            .filter_map(|(k, c)| {
                group.bushnell_trace(c.rep).map(|trace| DomainClass {
                    k,
                    size: c.size,
                    trace,
                    det: group.udet(c.rep),
                })
            })
            .collect();
        Ok(LocalContext {
            group,
            table,
            irreps,
            order,
            domain,
        })
    }

    pub fn group(&self) -> &FiniteGroupModel {
        &self.group
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn irreps(&self) -> &[IrrepData] {
        &self.irreps
    }

    pub fn case(&self) -> GroupCase {
        self.group.case()
    }

    /// Order of the root of unity in which every sum is written.
    pub fn value_order(&self) -> u64 {
        self.order
    }

    fn p(&self) -> u64 {
        self.case().p()
    }

    fn m(&self) -> u32 {
        self.case().m()
    }

    pub fn psi(&self, unit: u64) -> Result<AdditiveCharacter> {
        AdditiveCharacter::new(self.p(), self.m(), unit as i64)
    }

    fn exponent_of(&self, chi: &AdditiveCharacter, x: u64) -> i64 {
        let step = self.order / chi.modulus();
        (chi.value_exponent(x as i64) * step) as i64
    }

    /// `sum_x psi(tr(c x)) psi'(det x) conj(Theta(c x))` over the domain of
    /// Bushnell's sum; `psi2 = None` drops the determinant weight.
    pub fn weighted_sum(
        &self,
        row: &CharacterRow,
        psi: &AdditiveCharacter,
        psi2: Option<&AdditiveCharacter>,
    ) -> RootSum {
        let l = self.order;
        let mut s = RootSum::zero(l);
        for dc in &self.domain {
            let mut w = self.exponent_of(psi, dc.trace);
            if let Some(p2) = psi2 {
                w += self.exponent_of(p2, dc.det);
            }
            let o = self.table.class_orders[dc.k] as u64;
            let step = (l / o) as i64;
            for &(j, mult) in &row.values[dc.k] {
                s.add_term(w - j as i64 * step, dc.size as i64 * mult as i64);
            }
        }
        s
    }

    fn check_psi(&self, psi: &AdditiveCharacter) -> Result<()> {
        if psi.p != self.p() || psi.level != self.m() {
            return Err(Error::LevelMismatch { psi_level: psi.level, k: self.m() });
        }
        Ok(())
    }

    fn require(&self, idx: usize, cond: bool, what: &str) -> Result<&IrrepData> {
        let x = self
            .irreps
            .get(idx)
            .ok_or_else(|| Error::InvalidInput(format!("no irreducible #{idx}")))?;
        if !cond {
            return Err(Error::Precondition(format!("irreducible #{idx} of {} is not {what}", self.case())));
        }
        Ok(x)
    }

    fn is_cuspidal_datum(&self, idx: usize) -> bool {
        self.irreps.get(idx).is_some_and(|x| {
            x.cuspidal && x.conductor == self.case().filtration_top()
        })
    }

    fn normaliser(&self, dim: u64) -> u64 {
        self.p().pow(2 * self.m()) * dim
    }

    /// `eps(pi, 1/2, psi) = p^(-2m) dim^-1 sum_x psi(tr(c x)) conj(Theta(c x))`.
    pub fn bushnell_epsilon(&self, idx: usize, psi: &AdditiveCharacter, prec: usize) -> Result<EpsilonValue> {
        self.check_psi(psi)?;
        let ok = self.is_cuspidal_datum(idx) && self.irreps.get(idx).is_some_and(|x| x.central_trivial);
        let x = self.require(idx, ok, "strongly cuspidal of full conductor with trivial central character")?;
        let s = self.weighted_sum(&self.table.rows[idx], psi, None);
        let den = self.normaliser(x.dim);
        Ok(EpsilonValue {
            exact: s.to_cyclotomic_over(den),
            numeric: scale_complex(s.to_complex(prec + 32), den).with_precision(prec),
        })
    }

    fn t_sum_raw(&self, idx: usize, psi: &AdditiveCharacter, psi2: &AdditiveCharacter) -> Result<RootSum> {
        self.check_psi(psi)?;
        if psi2.p != self.p() || psi2.level == 0 || psi2.level > self.m() {
            return Err(Error::LevelMismatch { psi_level: psi2.level, k: self.m() });
        }
        let ok = self.irreps.get(idx).is_some_and(|x| x.cuspidal && x.central_trivial);
        self.require(idx, ok, "strongly cuspidal with trivial central character")?;
        Ok(self.weighted_sum(&self.table.rows[idx], psi, Some(psi2)))
    }

    /// Exact zero test for `T(xi, psi, psi')`.
    pub fn t_sum_is_zero(&self, idx: usize, psi: &AdditiveCharacter, psi2: &AdditiveCharacter) -> Result<bool> {
        Ok(self.t_sum_raw(idx, psi, psi2)?.is_zero())
    }

    /// The scalar `T(xi, psi, psi')`: trace of the weighted sum divided by the degree.
    pub fn t_sum(&self, idx: usize, psi: &AdditiveCharacter, psi2: &AdditiveCharacter) -> Result<TSumResult> {
        let raw = self.t_sum_raw(idx, psi, psi2)?;
        let is_zero = raw.is_zero();
        Ok(TSumResult {
            case: self.case(),
            irrep: idx,
            psi_level: psi.level,
            psi_unit: psi.unit,
            k: psi2.level,
            lambda: psi2.unit,
            value: raw.to_cyclotomic_over(self.irreps[idx].dim),
            is_zero,
        })
    }

    /// Both sides of the identity, scaled by `p^(2m) dim`:
    /// `sum_{chi in S~(p^k)} tau(chi, psi') N(chi xi)` and
    /// `(p - 1) p^(k-1) sum_x psi(tr(c x)) psi'(det x) conj(Theta(c x))`,
    /// where `N(chi xi) = p^(2m) dim eps(chi pi)` is Bushnell's sum for the twisted row.
    pub fn twisted_sides(&self, idx: usize, psi: &AdditiveCharacter, psi2: &AdditiveCharacter) -> Result<(RootSum, RootSum)> {
        let mut v = self.twisted_many(idx, psi, psi2.level, &[psi2.unit])?;
        let (_, lhs, rhs) = v.pop().expect("one unit requested");
        Ok((lhs, rhs))
    }

    /// Both sides for every unit `lambda` mod `p^k`, sharing the twisted sums.
    pub fn twisted_level(&self, idx: usize, psi: &AdditiveCharacter, k: u32) -> Result<Vec<(u64, RootSum, RootSum)>> {
        if k == 0 || k > self.m() {
            return Err(Error::LevelMismatch { psi_level: k, k: self.m() });
        }
        let units: Vec<u64> = crate::characters::UnitGroup::get(self.p().pow(k)).units().collect();
        self.twisted_many(idx, psi, k, &units)
    }

    fn twisted_many(&self, idx: usize, psi: &AdditiveCharacter, k: u32, units: &[u64]) -> Result<Vec<(u64, RootSum, RootSum)>> {
        self.check_psi(psi)?;
        let ok = self.is_cuspidal_datum(idx) && self.irreps.get(idx).is_some_and(|x| x.twist_minimal);
        self.require(idx, ok, "twist-minimal strongly cuspidal of full conductor")?;
        if k == 0 || k > self.m() {
            return Err(Error::LevelMismatch { psi_level: k, k: self.m() });
        }
        let p = self.p();
        let row = &self.table.rows[idx];
        let twisted = build_s_tilde(p, k)?
            .members
            .into_iter()
            .map(|chi| {
                let t = row.twist(&self.group, &chi)?;
                Ok((self.weighted_sum(&t, psi, None), chi))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(units.len());
        for &lambda in units {
            let psi2 = AdditiveCharacter::new(p, k, lambda as i64)?;
            let mut lhs = RootSum::zero(1);
            for (eps_sum, chi) in &twisted {
                let tau = local_gauss_sum_roots(chi, &psi2)?;
                lhs = add_any(&lhs, &tau.mul(eps_sum));
            }
            let rhs = self
                .weighted_sum(row, psi, Some(&psi2))
                .scaled(((p - 1) * p.pow(k - 1)) as i64);
            out.push((lambda, lhs, rhs));
        }
        Ok(out)
    }

    pub fn twisted_check(&self, idx: usize, psi: &AdditiveCharacter, psi2: &AdditiveCharacter) -> Result<TwistedSumCheck> {
        let (lhs, rhs) = self.twisted_sides(idx, psi, psi2)?;
        let equal = lhs.eq_value(&rhs);
        let den = self.normaliser(self.irreps[idx].dim);
        Ok(TwistedSumCheck {
            lhs: lhs.to_cyclotomic_over(den),
            rhs: rhs.to_cyclotomic_over(den),
            equal,
        })
    }

    /// `sum_{chi in S~(p^m)} tau(chi, psi') eps(chi pi, psi)` up to the positive
    /// factor `p^(2m) dim`, for `psi'` of level `m`.
    pub fn local_factor(&self, idx: usize, psi: &AdditiveCharacter, psi2: &AdditiveCharacter) -> Result<RootSum> {
        Ok(self.twisted_sides(idx, psi, psi2)?.0)
    }

    /// Index of the Galois conjugate `zeta -> zeta^s` of a row.
    pub fn galois_conjugate(&self, idx: usize, s: u64) -> Option<usize> {
        let e = self.table.exponent;
        let row = self.table.rows[idx].galois(s % e, &self.table.class_orders);
        self.table.rows.iter().position(|r| *r == row)
    }
}

fn add_any(a: &RootSum, b: &RootSum) -> RootSum {
    let m = lcm(a.order(), b.order());
    a.lift(m).add(&b.lift(m))
}

fn scale_complex(z: ComplexBig, den: u64) -> ComplexBig {
    let prec = z.precision();
    z.div(&ComplexBig::from_real(crate::arith::float::BigFloat::from_i64(den as i64, prec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl2::DEFAULT_BUDGET;
    use num_rational::BigRational;

    fn ctx(p: u64, m: u32, ram: bool) -> LocalContext {
        LocalContext::build(GroupCase::new(p, m, ram), DEFAULT_BUDGET, None).unwrap()
    }

    #[test]
    fn epsilons_have_modulus_one() {
        for (p, m, ram) in [(2u64, 1u32, false), (3, 1, false), (5, 1, false), (7, 1, false), (3, 1, true), (2, 1, true)] {
            let c = ctx(p, m, ram);
            let mut seen = 0;
            for (i, x) in c.irreps().iter().enumerate() {
                if !(x.cuspidal && x.central_trivial) {
                    continue;
                }
                let e = c.bushnell_epsilon(i, &c.psi(1).unwrap(), 256).unwrap();
                assert!(e.is_unit_modulus(), "{p},{m},{ram}: #{i}");
                assert!(e.unit_defect_log2() < -100.0);
                seen += 1;
            }
            assert!(seen > 0);
        }
    }

    #[test]
    fn no_central_trivial_cuspidal_mod_4() {
        // mirrors the absence of weight 2 newforms of level 16
        let c = ctx(2, 2, false);
        assert!(c.irreps().iter().any(|x| x.cuspidal));
        assert!(!c.irreps().iter().any(|x| x.cuspidal && x.central_trivial));
    }

    #[test]
    fn epsilon_of_the_gl2_f2_cuspidal_is_a_sign() {
        let c = ctx(2, 1, false);
        let i = c.irreps().iter().position(|x| x.cuspidal && x.central_trivial).unwrap();
        let e = c.bushnell_epsilon(i, &c.psi(1).unwrap(), 128).unwrap();
        let r = e.exact.to_rational().unwrap();
        assert!(r == BigRational::from_integer(1.into()) || r == BigRational::from_integer((-1).into()));
    }

    #[test]
    fn epsilon_does_not_depend_on_the_unit_of_psi() {
        let c = ctx(5, 1, false);
        for (i, x) in c.irreps().iter().enumerate() {
            if x.cuspidal && x.central_trivial {
                let e1 = c.bushnell_epsilon(i, &c.psi(1).unwrap(), 64).unwrap().exact;
                for a in 2..5 {
                    assert_eq!(c.bushnell_epsilon(i, &c.psi(a).unwrap(), 64).unwrap().exact, e1);
                }
            }
        }
    }

    #[test]
    fn preconditions_are_enforced() {
        let c = ctx(3, 1, false);
        let trivial = 0;
        assert!(matches!(
            c.bushnell_epsilon(trivial, &c.psi(1).unwrap(), 64),
            Err(Error::Precondition(_))
        ));
        let level2 = AdditiveCharacter::new(3, 2, 1).unwrap();
        assert!(matches!(
            c.bushnell_epsilon(trivial, &level2, 64),
            Err(Error::LevelMismatch { .. })
        ));
    }

    #[test]
    fn twisted_sums_small_cases() {
        for (p, m, ram) in [(3u64, 1u32, false), (2, 2, false), (2, 1, true), (3, 1, true)] {
            let c = ctx(p, m, ram);
            let psi = c.psi(1).unwrap();
            let mut checked = 0;
            for (i, x) in c.irreps().iter().enumerate() {
                if !(x.cuspidal && x.twist_minimal && x.conductor == c.case().filtration_top()) {
                    continue;
                }
                for k in 1..=m {
                    let pk = p.pow(k);
                    for lam in (1..pk).filter(|l| l % p != 0) {
                        let psi2 = AdditiveCharacter::new(p, k, lam as i64).unwrap();
                        assert!(c.twisted_check(i, &psi, &psi2).unwrap().equal, "{p},{m},{ram} #{i} k={k} l={lam}");
                        checked += 1;
                    }
                }
            }
            assert!(checked > 0, "{p},{m},{ram}");
        }
    }

    #[test]
    fn t_sums_over_f3_are_nonzero() {
        let c = ctx(3, 1, false);
        for (i, x) in c.irreps().iter().enumerate() {
            if x.cuspidal && x.central_trivial {
                for u in [1u64, 2] {
                    for lam in [1i64, 2] {
                        let psi2 = AdditiveCharacter::new(3, 1, lam).unwrap();
                        let t = c.t_sum(i, &c.psi(u).unwrap(), &psi2).unwrap();
                        assert!(!t.is_zero);
                    }
                }
            }
        }
    }
}
