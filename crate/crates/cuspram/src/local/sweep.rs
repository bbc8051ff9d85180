//! Exhaustive sweeps of the character sums `T(xi, psi_u, psi'_lambda)` over a
//! finite quotient, and the product of local factors at a level `d`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LocalContext;
use crate::arith::cyclotomic::{CyclotomicNumber, RootSum};
use crate::arith::int::{gcd, lcm};
use crate::characters::{crt_gauss_factorization, AdditiveCharacter, UnitGroup};
use crate::error::{Error, Result};
use crate::gl2::{GroupCase, IrrepData};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TSumEntry {
    pub psi: u64,
    pub k: u32,
    pub lambda: u64,
    pub zero: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrepReport {
    pub index: usize,
    pub dim: u64,
    pub conductor: u32,
    pub cuspidal: bool,
    pub central_trivial: bool,
    pub minimal: bool,
    pub field: String,
    /// Whether the nonvanishing statement applies (twist-minimal, rational).
    pub asserted: bool,
    pub zeros: usize,
    pub tsums: Vec<TSumEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Exception {
    pub irrep: usize,
    pub psi: u64,
    pub k: u32,
    pub lambda: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Level25Candidate {
    pub irrep: usize,
    pub field: String,
    /// `lambda mod 25` with `T(xi, psi_1, psi'_lambda) = 0` at `k = 2`.
    pub zero_set: Vec<u64>,
    pub contains_pm1_mod_5: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdicts {
    pub nonvanishing: bool,
    pub asserted_irreps: usize,
    pub exceptions: Vec<Exception>,
    /// For rational rows, the zero pattern of `T(psi_a, psi'_{a t})` does not depend on `a`.
    pub rational_independence: bool,
    /// `T(psi_u, psi'_lambda) = T(psi_1, psi'_{lambda u^-2})` exactly.
    pub psi_scaling: bool,
    /// `sigma_s T(xi, psi_1, psi'_lambda) = T(xi^s, psi_s, psi'_{s lambda})` for generators `s`.
    pub galois_equivariance: bool,
    /// Present for the unramified `(5, 2)` case only.
    pub level25: Option<Vec<Level25Candidate>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub case: GroupCase,
    pub p: u64,
    pub m: u32,
    pub order: u64,
    pub classes: usize,
    pub irreps: Vec<IrrepReport>,
    pub verdicts: Verdicts,
}

impl SweepReport {
    pub fn level25_found(&self) -> bool {
        self.verdicts
            .level25
            .as_ref()
            .is_some_and(|c| c.iter().any(|x| x.contains_pm1_mod_5))
    }

    /// Every check that is asserted for this case.
    pub fn passed(&self) -> bool {
        let v = &self.verdicts;
        v.nonvanishing && v.rational_independence && v.psi_scaling && v.galois_equivariance
    }
}

fn covered(x: &IrrepData) -> bool {
    x.cuspidal && x.central_trivial
}

fn asserted(x: &IrrepData) -> bool {
    covered(x) && x.twist_minimal && x.field.is_rational()
}

fn psi2(p: u64, k: u32, lambda: u64) -> AdditiveCharacter {
    AdditiveCharacter::new(p, k, lambda as i64).expect("lambda is a unit")
}

fn inv_mod(a: u64, n: u64) -> u64 {
    UnitGroup::get(n)
        .units()
        .find(|&x| (x as u128 * a as u128) % n as u128 == 1)
        .expect("a unit")
}

/// `(psi unit, k, lambda)` in the order used by the report.
fn parameters(p: u64, m: u32) -> Vec<(u64, u32, u64)> {
    let q = p.pow(m);
    let mut out = Vec::new();
    for u in UnitGroup::get(q).units() {
        for k in 1..=m {
            for lambda in UnitGroup::get(p.pow(k)).units() {
                out.push((u, k, lambda));
            }
        }
    }
    out
}

fn raw(ctx: &LocalContext, idx: usize, u: u64, k: u32, lambda: u64) -> Result<RootSum> {
    ctx.t_sum_raw(idx, &ctx.psi(u)?, &psi2(ctx.p(), k, lambda))
}

pub fn nonvanishing_sweep(ctx: &LocalContext) -> Result<SweepReport> {
    let case = ctx.case();
    let (p, m) = (case.p(), case.m());
    let params = parameters(p, m);
    let rows: Vec<&IrrepData> = ctx.irreps().iter().filter(|x| covered(x)).collect();

    let tsums: Vec<Vec<TSumEntry>> = rows
        .par_iter()
        .map(|x| {
            params
                .iter()
                .map(|&(u, k, lambda)| {
                    Ok(TSumEntry {
                        psi: u,
                        k,
                        lambda,
                        zero: raw(ctx, x.index, u, k, lambda)?.is_zero(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut exceptions = Vec::new();
    let mut irreps = Vec::new();
    let mut rational_independence = true;
    for (x, ts) in rows.iter().zip(tsums) {
        let a = asserted(x);
        if a {
            exceptions.extend(ts.iter().filter(|t| t.zero).map(|t| Exception {
                irrep: x.index,
                psi: t.psi,
                k: t.k,
                lambda: t.lambda,
            }));
        }
        if x.field.is_rational() && !zero_pattern_independent(p, &ts) {
            rational_independence = false;
        }
        irreps.push(IrrepReport {
            index: x.index,
            dim: x.dim,
            conductor: x.conductor,
            cuspidal: x.cuspidal,
            central_trivial: x.central_trivial,
            minimal: x.twist_minimal,
            field: x.field.name.clone(),
            asserted: a,
            zeros: ts.iter().filter(|t| t.zero).count(),
            tsums: ts,
        });
    }

    let psi_scaling = rows
        .par_iter()
        .map(|x| psi_scaling_holds(ctx, x.index))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    let galois_equivariance = rows
        .par_iter()
        .map(|x| galois_equivariance_holds(ctx, x.index))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);

    let level25 = (case == GroupCase::new(5, 2, false)).then(|| level25_candidates(ctx, &irreps));

    Ok(SweepReport {
        case,
        p,
        m,
        order: ctx.group().order(),
        classes: ctx.group().classes().len(),
        verdicts: Verdicts {
            nonvanishing: exceptions.is_empty(),
            asserted_irreps: irreps.iter().filter(|r| r.asserted).count(),
            exceptions,
            rational_independence,
            psi_scaling,
            galois_equivariance,
            level25,
        },
        irreps,
    })
}

/// `psi'_{lambda} = psi_a(p^(m-k) t .)` with `lambda = a t`: the verdict at
/// `(a, k, a t)` must agree with the one at `(1, k, t)`.
fn zero_pattern_independent(p: u64, ts: &[TSumEntry]) -> bool {
    let at = |u: u64, k: u32, l: u64| ts.iter().find(|t| t.psi == u && t.k == k && t.lambda == l).map(|t| t.zero);
    ts.iter().all(|t| {
        let pk = p.pow(t.k);
        let rel = t.lambda * inv_mod(t.psi % pk, pk) % pk;
        at(1, t.k, rel) == Some(t.zero)
    })
}

/// Scaling `x -> u^-1 x` by a central element: `T(psi_u, psi'_l) = T(psi_1, psi'_{l u^-2})`.
pub fn psi_scaling_holds(ctx: &LocalContext, idx: usize) -> Result<bool> {
    let (p, m) = (ctx.p(), ctx.m());
    for (u, k, lambda) in parameters(p, m) {
        if u == 1 {
            continue;
        }
        let pk = p.pow(k);
        let ui = inv_mod(u % pk, pk);
        let l2 = lambda * ui % pk * ui % pk;
        if !raw(ctx, idx, u, k, lambda)?.eq_value(&raw(ctx, idx, 1, k, l2)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `sigma_s` applied to `T(xi, psi_1, psi'_lambda)` is `T(xi^s, psi_s, psi'_{s lambda})`,
/// for `s` running over generators of `(Z/L)^x`.
pub fn galois_equivariance_holds(ctx: &LocalContext, idx: usize) -> Result<bool> {
    let (p, m) = (ctx.p(), ctx.m());
    let l = ctx.value_order();
    let q = p.pow(m);
    for &s in UnitGroup::get(l).generators() {
        let Some(j) = ctx.galois_conjugate(idx, s) else {
            return Ok(false);
        };
        for k in 1..=m {
            let pk = p.pow(k);
            for lambda in UnitGroup::get(pk).units() {
                let lhs = raw(ctx, idx, 1, k, lambda)?.galois(s as i64);
                let rhs = raw(ctx, j, s % q, k, s * lambda % pk)?;
                if !lhs.eq_value(&rhs) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn level25_candidates(ctx: &LocalContext, irreps: &[IrrepReport]) -> Vec<Level25Candidate> {
    irreps
        .iter()
        .filter(|r| r.dim == 20 && r.minimal && r.field == "Q(sqrt(5))")
        .map(|r| {
            let zero_set: Vec<u64> = r
                .tsums
                .iter()
                .filter(|t| t.psi == 1 && t.k == 2 && t.zero)
                .map(|t| t.lambda)
                .collect();
            let contains = UnitGroup::get(25)
                .units()
                .filter(|l| l % 5 == 1 || l % 5 == 4)
                .all(|l| zero_set.contains(&l));
            let _ = ctx;
            Level25Candidate {
                irrep: r.index,
                field: r.field.clone(),
                zero_set,
                contains_pm1_mod_5: contains,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwistedSumPoint {
    pub irrep: usize,
    pub k: u32,
    pub lambda: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwistedSumReport {
    pub case: GroupCase,
    /// Twist-minimal strongly cuspidal irreducibles of full conductor.
    pub irreps: Vec<usize>,
    pub checked: usize,
    pub failures: Vec<TwistedSumPoint>,
    /// `(irrep, k, lambda)` at which both sides vanish.
    pub zeros: Vec<TwistedSumPoint>,
}

impl TwistedSumReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// The twisted-sum identity at `psi_1`, every `k` and every unit `lambda` mod `p^k`.
pub fn twisted_sweep(ctx: &LocalContext) -> Result<TwistedSumReport> {
    let case = ctx.case();
    let top = case.filtration_top();
    let rows: Vec<usize> = ctx
        .irreps()
        .iter()
        .filter(|x| x.cuspidal && x.twist_minimal && x.conductor == top)
        .map(|x| x.index)
        .collect();
    let psi = ctx.psi(1)?;
    let jobs: Vec<(usize, u32)> = rows.iter().flat_map(|&i| (1..=case.m()).map(move |k| (i, k))).collect();
    let results = jobs
        .par_iter()
        .map(|&(i, k)| {
            let v = ctx.twisted_level(i, &psi, k)?;
            Ok(v.into_iter()
                .map(|(lambda, lhs, rhs)| (i, k, lambda, lhs.eq_value(&rhs), lhs.is_zero()))
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = TwistedSumReport { case, irreps: rows, checked: 0, failures: Vec::new(), zeros: Vec::new() };
    for (irrep, k, lambda, equal, zero) in results.into_iter().flatten() {
        report.checked += 1;
        if !equal {
            report.failures.push(TwistedSumPoint { irrep, k, lambda });
        } else if zero {
            report.zeros.push(TwistedSumPoint { irrep, k, lambda });
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MerelRow {
    pub n: u64,
    /// `lambda = n^-1 mod 25`, the unit of the induced `psi'`.
    pub lambda: u64,
    pub zero: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Level25Irrep {
    pub candidate: Level25Candidate,
    /// Both sides of the twisted-sum identity vanish exactly on the zero set.
    pub twisted_linked: bool,
    pub merel: Vec<MerelRow>,
    /// The level-25 product vanishes exactly for `n = +-1 mod 5`.
    pub merel_pm1: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Level25Report {
    pub found: bool,
    pub irreps: Vec<Level25Irrep>,
}

impl Level25Report {
    pub fn passed(&self) -> bool {
        self.found && self.irreps.iter().filter(|x| x.candidate.contains_pm1_mod_5).all(|x| x.twisted_linked && x.merel_pm1)
    }
}

/// The level-25 vanishing: zero sets of the rational-quadratic dimension-20
/// cuspidals of `GL_2(Z/25)`, the twisted-sum sides there, and the local product at `d = 25`.
pub fn level25_report(ctx: &LocalContext, sweep: &SweepReport) -> Result<Level25Report> {
    if ctx.case() != GroupCase::new(5, 2, false) {
        return Err(Error::InvalidInput(format!("{} is not GL_2(Z/25)", ctx.case())));
    }
    let candidates = sweep.verdicts.level25.clone().unwrap_or_default();
    let psi = ctx.psi(1)?;
    let mut irreps = Vec::new();
    for c in candidates {
        let sides = ctx.twisted_level(c.irrep, &psi, 2)?;
        let twisted_linked = sides.iter().all(|(lambda, lhs, rhs)| {
            let z = c.zero_set.contains(lambda);
            lhs.eq_value(rhs) && lhs.is_zero() == z && rhs.is_zero() == z
        });
        let data = [LocalDatum { ctx, irrep: c.irrep }];
        let mut merel = Vec::new();
        for n in UnitGroup::get(25).units() {
            let v = merel_local_product(&data, 25, n as i64)?;
            merel.push(MerelRow { n, lambda: inv_mod(n, 25), zero: v.zero });
        }
        let merel_pm1 = merel.iter().all(|r| r.zero == (r.n % 5 == 1 || r.n % 5 == 4));
        irreps.push(Level25Irrep { candidate: c, twisted_linked, merel, merel_pm1 });
    }
    Ok(Level25Report { found: sweep.level25_found(), irreps })
}

/// One local datum of a level `d`: a finite quotient and an irreducible of it.
pub struct LocalDatum<'a> {
    pub ctx: &'a LocalContext,
    pub irrep: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalTerm {
    pub p: u64,
    pub m: u32,
    pub irrep: usize,
    /// Unit `c_p` with `psi'_p(x) = exp(2 pi i c_p x / p^m)`.
    pub lambda: u64,
    pub zero: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MerelVerdict {
    pub d: u64,
    pub n: i64,
    pub terms: Vec<LocalTerm>,
    pub zero: bool,
    /// The product up to a nonzero constant; absent when `gcd(n, d) > 1`.
    pub value: Option<CyclotomicNumber>,
}

/// `prod_p sum_{chi_p in S~(p^m_p)} tau(chi_p, psi'_p) eps(chi_p pi_p, psi_p)`, each
/// factor scaled by `p^(2m) dim`, with `psi'_p` from the CRT split of `a -> e(n^-1 a / d)`.
pub fn merel_local_product(data: &[LocalDatum], d: u64, n: i64) -> Result<MerelVerdict> {
    let product: u64 = data.iter().map(|x| x.ctx.group().modulus()).product();
    if product != d {
        return Err(Error::InvalidInput(format!(
            "local data multiply to level {product}, not {d}"
        )));
    }
    if gcd(n.unsigned_abs(), d) != 1 {
        return Ok(MerelVerdict { d, n, terms: Vec::new(), zero: true, value: None });
    }
    let split = crt_gauss_factorization(d, n)?;
    let mut terms = Vec::new();
    let mut value = RootSum::monomial(1, 0, 1);
    for x in data {
        let case = x.ctx.case();
        let (_, psi2) = split
            .iter()
            .find(|(p, _)| *p == case.p())
            .ok_or_else(|| Error::InvalidInput(format!("{} does not divide {d}", case.p())))?;
        let ok = x.ctx.irreps().get(x.irrep).is_some_and(covered);
        if !ok {
            return Err(Error::Precondition(format!(
                "irreducible #{} of {case} is not strongly cuspidal with trivial central character",
                x.irrep
            )));
        }
        let f = x.ctx.local_factor(x.irrep, &x.ctx.psi(1)?, psi2)?;
        terms.push(LocalTerm {
            p: case.p(),
            m: case.m(),
            irrep: x.irrep,
            lambda: psi2.unit,
            zero: f.is_zero(),
        });
        let o = lcm(value.order(), f.order());
        value = value.lift(o).mul(&f.lift(o));
    }
    let zero = terms.iter().any(|t| t.zero);
    Ok(MerelVerdict {
        d,
        n,
        terms,
        zero,
        value: Some(value.to_cyclotomic()),
    })
}
