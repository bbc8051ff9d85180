//! Numeric ramification indices of the modular parametrization at the cusps.
//!
//! For a level `d` with `d^2 | N`, `g_d = f|M` with `M = N^{-1/2} [[aN/d, -1], [N, 0]]`
//! has `M(oo) = a/d`, and on the imaginary axis
//! `g_d(iy) = -(N y^2)^{-1} f(a/d + i/(N y))`. Its leading exponent is the
//! ramification index, read off from the slope of `log |g_d(iy)|` in `y`.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::float::{BigFloat, ComplexBig, DEFAULT_PRECISION};
use crate::arith::int::{divisors, is_squarefree};
use crate::cusps::{cusps_of_level, reduce_level};
use crate::error::{Error, Result};
use crate::newform::{an_table, evaluate_at_cusp_offset, evaluate_f, CoefficientTable, CurveCoefficients};

const MAX_PRECISION: usize = 4096;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RamificationConfig {
    pub prec: usize,
    pub fit_grid: Vec<f64>,
    pub confirm_grid: Vec<f64>,
    /// Initial search window for `e`; sizes the coefficient bound only.
    pub e_max: u32,
    /// Largest window reached by doubling after an indeterminate fit.
    pub e_max_limit: u32,
    pub kappa: f64,
    /// Cap on `B`; the grids are scaled down to respect it.
    pub max_terms: usize,
    pub residual_tol: f64,
}

impl Default for RamificationConfig {
    fn default() -> Self {
        RamificationConfig {
            prec: DEFAULT_PRECISION,
            fit_grid: vec![0.7, 0.9, 1.1, 1.3],
            confirm_grid: vec![0.8, 1.0, 1.2],
            e_max: 24,
            e_max_limit: 96,
            kappa: 1.5,
            max_terms: 250_000,
            residual_tol: 0.1,
        }
    }
}

impl RamificationConfig {
    pub fn long() -> Self {
        RamificationConfig {
            max_terms: 2_000_000,
            ..Self::default()
        }
    }

    fn y_max(&self) -> f64 {
        self.fit_grid
            .iter()
            .chain(&self.confirm_grid)
            .fold(0.0, |a: f64, &b| a.max(b))
    }

    /// `ceil(kappa e_max N y_max^2)`.
    pub fn required_terms(&self, n: u64, e_max: u32) -> usize {
        let y = self.y_max();
        (self.kappa * e_max as f64 * n as f64 * y * y).ceil() as usize
    }

    /// Grids shrunk by a common factor so that the bound fits `max_terms`.
    fn scaled(&self, n: u64, e_max: u32) -> (Vec<f64>, Vec<f64>, usize) {
        let want = self.required_terms(n, e_max);
        if want <= self.max_terms {
            return (self.fit_grid.clone(), self.confirm_grid.clone(), want);
        }
        let s = (self.max_terms as f64 / want as f64).sqrt();
        let f = |g: &Vec<f64>| g.iter().map(|y| y * s).collect::<Vec<_>>();
        (f(&self.fit_grid), f(&self.confirm_grid), self.max_terms)
    }
}

/// Bits needed so rounding noise in the residue-class sums stays below a signal
/// of size `exp(-2 pi e y)`.
pub fn required_precision(n: u64, e: u32, y_max: f64, terms: usize) -> usize {
    let two_pi = 2.0 * std::f64::consts::PI;
    let signal = two_pi * e as f64 * y_max / std::f64::consts::LN_2;
    let mass = 2.0 * (n as f64 * y_max / two_pi + 1.0).log2();
    (signal + mass + (terms as f64).log2() + 48.0).ceil() as usize
}

/// A curve with its coefficient table, grown on demand.
#[derive(Clone, Debug)]
pub struct CurveData {
    pub curve: CurveCoefficients,
    pub table: CoefficientTable,
}

impl CurveData {
    pub fn new(curve: CurveCoefficients, bound: usize) -> Result<Self> {
        let table = an_table(&curve, bound.max(1))?;
        Ok(CurveData { curve, table })
    }

    pub fn ensure(&mut self, bound: usize) -> Result<()> {
        if self.table.bound < bound {
            self.table = an_table(&self.curve, bound)?;
        }
        Ok(())
    }
}

fn check_level(n: u64, d: u64) -> Result<()> {
    if d == 0 || !n.is_multiple_of(d * d) {
        return Err(Error::Precondition(format!("d = {d} must satisfy d^2 | N = {n}")));
    }
    Ok(())
}

/// `g_d(iy)` for the cusp `a/d`, through the closed form; `err` bounds the
/// truncation error of the underlying value of `f`.
pub fn g_d_value(
    data: &CurveData,
    d: u64,
    a: i64,
    y: &BigFloat,
    err: &BigFloat,
) -> Result<ComplexBig> {
    let n = data.curve.n;
    check_level(n, d)?;
    if y.is_negative() || y.is_zero() {
        return Err(Error::InvalidInput("y must be positive".into()));
    }
    let prec = y.precision();
    let ny = y.mul_i64(n as i64);
    let big_y = BigFloat::one(prec).div(&ny);
    let f = evaluate_at_cusp_offset(&data.table, a, d, &big_y, err)?;
    // -(N y^2)^{-1}
    let factor = BigFloat::one(prec).div(&ny.mul(y)).neg();
    Ok(f.scale(&factor))
}

/// `g_d(z) = (sqrt(N) z)^{-2} f(M z)` with the matrix assembled entrywise and `f`
/// summed by Horner in `q`; an independent route for [`g_d_value`].
pub fn g_d_via_matrix(
    data: &CurveData,
    d: u64,
    a: i64,
    z: &ComplexBig,
    err: &BigFloat,
) -> Result<ComplexBig> {
    let n = data.curve.n;
    check_level(n, d)?;
    let prec = z.precision();
    let rt = BigFloat::from_i64(n as i64, prec).sqrt();
    let alpha = BigFloat::from_i64(a * (n / d) as i64, prec).div(&rt);
    let beta = BigFloat::from_i64(-1, prec).div(&rt);
    let gamma = BigFloat::from_i64(n as i64, prec).div(&rt);
    let num = z.scale(&alpha).add(&ComplexBig::from_real(beta));
    let den = z.scale(&gamma);
    let mz = num.div(&den);
    let j = den.mul(&den);
    let fz = evaluate_f(&data.table, &mz, err)?;
    Ok(fz.div(&j))
}

/// Largest relative gap between the two routes over `points` random `y` in `[lo, hi]`.
pub fn validate_slash_identity(
    data: &CurveData,
    d: u64,
    a: i64,
    points: usize,
    (lo, hi): (f64, f64),
    prec: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..points {
        let yf: f64 = rng.random_range(lo..hi);
        let y = BigFloat::from_f64(yf, prec);
        let z = ComplexBig::new(BigFloat::zero(prec), y.clone());
        let err = BigFloat::from_f64(-2.0 * std::f64::consts::PI * 30.0 * yf, prec)
            .exp()
            .mul(&BigFloat::from_f64(2f64.powi(-40), prec));
        let (va, vb) = {
            let va = g_d_value(data, d, a, &y, &err)?;
            let vb = g_d_via_matrix(data, d, a, &z, &err)?;
            (va, vb)
        };
        let gap = va.sub(&vb).abs().log2_abs() - va.abs().log2_abs();
        worst = worst.max(gap);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Accepted,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RamificationEstimate {
    pub label: String,
    pub n: u64,
    pub d: u64,
    pub a: i64,
    pub e: u32,
    pub status: EstimateStatus,
    /// `-slope / 2 pi` on the fitting grid.
    pub fitted: f64,
    pub residual: f64,
    pub confirm_fitted: f64,
    pub confirm_residual: f64,
    pub y_grid: Vec<f64>,
    pub confirm_grid: Vec<f64>,
    pub precision: usize,
    pub terms: usize,
    pub e_window: u32,
    pub seconds: f64,
}

/// `-slope / 2 pi` of the least-squares line through `(y, log |g_d(iy)|)`.
pub fn fit_slope(
    data: &mut CurveData,
    d: u64,
    a: i64,
    grid: &[f64],
    prec: usize,
    e_window: u32,
) -> Result<f64> {
    if grid.len() < 3 {
        return Err(Error::InvalidInput("a fit needs at least three y values".into()));
    }
    let mut logs = Vec::with_capacity(grid.len());
    for &y in grid {
        let yb = BigFloat::from_f64(y, prec);
        let two_pi_y = 2.0 * std::f64::consts::PI * y;
        let err = BigFloat::from_f64(-two_pi_y * e_window as f64, prec)
            .exp()
            .mul(&BigFloat::from_f64(2f64.powi(-8), prec));
        let g = match g_d_value(data, d, a, &yb, &err) {
            Err(Error::InsufficientTerms { required, .. }) => {
                data.ensure(required)?;
                g_d_value(data, d, a, &yb, &err)?
            }
            r => r?,
        };
        let n2 = g.norm_sqr();
        if n2.is_zero() {
            return Err(Error::Invariant(format!("g_{d} vanished at y = {y}")));
        }
        logs.push(n2.ln().to_f64() / 2.0);
    }
    let k = grid.len() as f64;
    let mx = grid.iter().sum::<f64>() / k;
    let my = logs.iter().sum::<f64>() / k;
    let sxy: f64 = grid.iter().zip(&logs).map(|(x, v)| (x - mx) * (v - my)).sum();
    let sxx: f64 = grid.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(-(sxy / sxx) / (2.0 * std::f64::consts::PI))
}

fn nearest(e: f64) -> u32 {
    e.round().max(1.0) as u32
}

/// Estimate `e` at the cusp `a/d` (`d^2 | N`) with a confirming fit on the disjoint grid.
pub fn estimate_index(
    data: &mut CurveData,
    d: u64,
    a: i64,
    cfg: &RamificationConfig,
) -> Result<RamificationEstimate> {
    let n = data.curve.n;
    check_level(n, d)?;
    let start = Instant::now();
    let mut e_window = cfg.e_max;
    let mut prec = cfg.prec;
    loop {
        let (fit, confirm, terms) = cfg.scaled(n, e_window);
        let y_max = fit.iter().chain(&confirm).fold(0.0f64, |a, &b| a.max(b));
        data.ensure(terms)?;
        let fitted = fit_slope(data, d, a, &fit, prec, e_window)?;
        let e = nearest(fitted);
        let need = required_precision(n, e, y_max, data.table.bound);
        if need > prec && prec < MAX_PRECISION {
            // the signal at this e sits below the working noise floor; refit
            prec = need.min(MAX_PRECISION);
            continue;
        }
        let residual = (fitted - e as f64).abs();
        let confirm_fitted = fit_slope(data, d, a, &confirm, prec, e_window)?;
        let confirm_residual = (confirm_fitted - e as f64).abs();
        let ok = residual < cfg.residual_tol
            && confirm_residual < cfg.residual_tol
            && nearest(confirm_fitted) == e
            && e <= e_window;
        if ok || e_window * 2 > cfg.e_max_limit {
            return Ok(RamificationEstimate {
                label: data.curve.label.clone(),
                n,
                d,
                a,
                e,
                status: if ok {
                    EstimateStatus::Accepted
                } else {
                    EstimateStatus::Indeterminate
                },
                fitted,
                residual,
                confirm_fitted,
                confirm_residual,
                y_grid: fit,
                confirm_grid: confirm,
                precision: prec,
                terms: data.table.bound,
                e_window,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
        e_window *= 2;
        let (f2, c2, t2) = cfg.scaled(n, e_window);
        let y2 = f2.iter().chain(&c2).fold(0.0f64, |a, &b| a.max(b));
        prec = prec.max(required_precision(n, e_window, y2, t2));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `d = 1` or `d = N`.
    Trivial,
    /// Moved by an Atkin-Lehner involution to level 1.
    ReducedToOne,
    /// `d = 2` with `4 | N`, also cross-checked numerically.
    HalfShortcut,
    Numeric,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelRow {
    pub d: u64,
    pub q: u64,
    pub delta: u64,
    pub e: u32,
    pub method: Method,
    pub status: EstimateStatus,
    pub residual: f64,
    pub terms: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RamificationReport {
    pub label: String,
    pub n: u64,
    pub rows: Vec<LevelRow>,
    /// Numeric estimates per reduced level `delta` (with `delta^2 | N`, `delta > 1`).
    pub estimates: BTreeMap<u64, RamificationEstimate>,
    /// Second-representative estimates used for the level-constancy check.
    pub constancy: BTreeMap<u64, RamificationEstimate>,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
}

impl RamificationReport {
    /// `(d, e)` for the levels with `d^2 | N` and `e > 1`.
    pub fn ramified_levels(&self) -> Vec<(u64, u32)> {
        self.rows
            .iter()
            .filter(|r| r.d == r.delta && r.d > 1 && r.e > 1)
            .map(|r| (r.d, r.e))
            .collect()
    }

    pub fn indeterminate(&self) -> bool {
        self.rows.iter().any(|r| r.status == EstimateStatus::Indeterminate)
    }
}

/// Estimates at every divisor of `N`, computed once per reduced level.
pub fn ramification_report(
    curve: &CurveCoefficients,
    cfg: &RamificationConfig,
) -> Result<RamificationReport> {
    let n = curve.n;
    let (_, _, terms) = cfg.scaled(n, cfg.e_max);
    let mut data = CurveData::new(curve.clone(), terms)?;
    let mut estimates: BTreeMap<u64, RamificationEstimate> = BTreeMap::new();
    let mut constancy = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for d in divisors(n) {
        let (q, delta) = reduce_level(n, d)?;
        let row = |e, method, status, residual, terms, seconds| LevelRow {
            d,
            q,
            delta,
            e,
            method,
            status,
            residual,
            terms,
            seconds,
        };
        if d == 1 || d == n {
            rows.push(row(1, Method::Trivial, EstimateStatus::Accepted, 0.0, 0, 0.0));
            continue;
        }
        if delta == 1 {
            rows.push(row(1, Method::ReducedToOne, EstimateStatus::Accepted, 0.0, 0, 0.0));
            continue;
        }
        if let std::collections::btree_map::Entry::Vacant(e) = estimates.entry(delta) {
            let reps = cusps_of_level(n, delta)?;
            let est = estimate_index(&mut data, delta, reps[0].a, cfg)?;
            if reps.len() > 1 {
                let other = estimate_index(&mut data, delta, reps[1].a, cfg)?;
                if other.e != est.e {
                    failures.push(format!(
                        "level {delta}: cusps {}/{delta} and {}/{delta} give e = {} and {}",
                        reps[0].a, reps[1].a, est.e, other.e
                    ));
                }
                constancy.insert(delta, other);
            }
            if est.status == EstimateStatus::Accepted && 24 % est.e != 0 {
                warnings.push(format!("level {delta}: e = {} does not divide 24", est.e));
            }
            if delta == 2 && n.is_multiple_of(4) && est.e != 1 {
                failures.push(format!("level 2 with 4 | N: numeric e = {}, expected 1", est.e));
            }
            e.insert(est);
        }
        let est = &estimates[&delta];
        if delta == 2 && n.is_multiple_of(4) {
            rows.push(row(1, Method::HalfShortcut, est.status, est.residual, est.terms, est.seconds));
        } else {
            rows.push(row(est.e, Method::Numeric, est.status, est.residual, est.terms, est.seconds));
        }
    }
    for r in &rows {
        if r.status == EstimateStatus::Indeterminate {
            warnings.push(format!("level {}: indeterminate estimate", r.d));
        }
    }
    Ok(RamificationReport {
        label: curve.label.clone(),
        n,
        rows,
        estimates,
        constancy,
        warnings,
        failures,
    })
}

/// Numeric estimate at the cusp `0` (level 1), which must be unramified.
/// For squarefree `N` every cusp reduces here.
pub fn level_one_check(curve: &CurveCoefficients, cfg: &RamificationConfig) -> Result<RamificationEstimate> {
    let small = RamificationConfig {
        e_max: 4,
        ..cfg.clone()
    };
    let (_, _, terms) = small.scaled(curve.n, small.e_max);
    let mut data = CurveData::new(curve.clone(), terms)?;
    estimate_index(&mut data, 1, 0, &small)
}

/// Whether `N` is squarefree, so every level reduces to 1.
pub fn is_semistable_level(n: u64) -> bool {
    is_squarefree(n)
}

/// Levels `d > 1` with `d^2 | N`.
pub fn square_levels(n: u64) -> Vec<u64> {
    divisors(n)
        .into_iter()
        .filter(|&d| d > 1 && n.is_multiple_of(d * d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve48a() -> CurveCoefficients {
        CurveCoefficients::new("48a", 48, [0, 1, 0, -4, -4]).unwrap()
    }

    #[test]
    fn closed_form_matches_matrix_route() {
        let data = CurveData::new(curve48a(), 4000).unwrap();
        let gap = validate_slash_identity(&data, 4, 1, 20, (0.6, 1.4), 256, 11).unwrap();
        assert!(gap < -100.0, "relative gap 2^{gap}");
        let gap = validate_slash_identity(&data, 1, 0, 5, (0.6, 1.4), 256, 12).unwrap();
        assert!(gap < -100.0, "relative gap 2^{gap}");
    }

    #[test]
    fn index_at_level_four_of_48a() {
        let cfg = RamificationConfig::default();
        let mut data = CurveData::new(curve48a(), 1).unwrap();
        let est = estimate_index(&mut data, 4, 1, &cfg).unwrap();
        assert_eq!(est.status, EstimateStatus::Accepted);
        assert_eq!(est.e, 2);
        assert!(est.residual < 0.1 && est.confirm_residual < 0.1);
        let one = estimate_index(&mut data, 1, 0, &cfg).unwrap();
        assert_eq!(one.e, 1);
    }

    #[test]
    fn precision_budget_grows_with_e() {
        assert!(required_precision(48, 2, 1.3, 3000) < 256);
        assert!(required_precision(20736, 24, 1.3, 1_300_000) > 256);
    }

    #[test]
    fn grids_scale_under_the_term_cap() {
        let cfg = RamificationConfig {
            max_terms: 10_000,
            ..Default::default()
        };
        let (fit, confirm, terms) = cfg.scaled(20736, 24);
        assert_eq!(terms, 10_000);
        assert!(fit[3] < 0.12 && confirm.len() == 3);
        assert_eq!(square_levels(144), vec![2, 3, 4, 6, 12]);
    }

    #[test]
    fn rejects_non_square_levels() {
        let data = CurveData::new(curve48a(), 100).unwrap();
        let y = BigFloat::one(128);
        assert!(matches!(
            g_d_value(&data, 3, 1, &y, &y),
            Err(Error::Precondition(_))
        ));
    }
}
