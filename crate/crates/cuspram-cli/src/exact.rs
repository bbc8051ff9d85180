//! The exact commands: `cusps`, `gl2`, `tsum` and `verify`.

use std::fs;
use std::path::Path;
use std::time::Instant;

use clap::{Args, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cuspram::characters::{verify_crt_factorization_up_to, verify_gauss_norms, AdditiveCharacter, UnitGroup};
use cuspram::cusps::{cusp_count_formula, cusps_of_level, enumerate_cusps, reduce_level};
use cuspram::gl2::oracle::compare_with_oracle;
use cuspram::gl2::{GroupCase, IrrepData};
use cuspram::local::km_characters::{km_identities, KmReport};
use cuspram::local::sweep::{twisted_sweep, level25_report, nonvanishing_sweep, TwistedSumReport, Level25Report, SweepReport};
use cuspram::local::{LocalContext, TSumResult};

use crate::output::{csv_rows, emit, to_json, Render};
use crate::{Common, Failure, Outcome};

/// The cases swept by default.
pub const SWEEP_CASES: &[(u64, u32, bool)] = &[
    (2, 1, false),
    (3, 1, false),
    (5, 1, false),
    (7, 1, false),
    (2, 2, false),
    (3, 2, false),
    (5, 2, false),
    (2, 1, true),
    (3, 1, true),
];

pub const KM_CASES: &[(u64, u32)] = &[(2, 1), (3, 1), (2, 2), (3, 2)];

#[derive(Args, Debug, Clone)]
pub struct CaseArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// The ramified quotient instead of GL_2(Z/p^m).
    #[arg(long)]
    pub ramified: bool,
}

impl CaseArgs {
    fn case(&self) -> GroupCase {
        GroupCase::new(self.p, self.m, self.ramified)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OptCaseArgs {
    /// With --m, run one case; without both, run the default list.
    #[arg(long, requires = "m")]
    pub p: Option<u64>,
    #[arg(long, requires = "p")]
    pub m: Option<u32>,
    #[arg(long, requires = "p")]
    pub ramified: bool,
}

impl OptCaseArgs {
    fn cases(&self, default: &[(u64, u32, bool)]) -> Vec<GroupCase> {
        match (self.p, self.m) {
            (Some(p), Some(m)) => vec![GroupCase::new(p, m, self.ramified)],
            _ => default.iter().map(|&(p, m, r)| GroupCase::new(p, m, r)).collect(),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct TsumArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    /// Irreducible index (default: every strongly cuspidal row with trivial central character).
    #[arg(long)]
    pub irrep: Option<usize>,
    /// Unit u of psi(x) = exp(2 pi i u x / p^m), a character of level m. The level-one
    /// character a -> psi_1(p^(1-m) a) is folded into u.
    #[arg(long, default_value_t = 1)]
    pub psi: u64,
    /// Level k of psi'(x) = exp(2 pi i lambda x / p^k) (default: every 1 <= k <= m).
    #[arg(long)]
    pub k: Option<u32>,
    /// Unit lambda mod p^k (default: every unit).
    #[arg(long, requires = "k")]
    pub lambda: Option<u64>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Suite {
    /// Nonvanishing of the T-sums for twist-minimal rational cuspidals.
    #[command(name = "thm43")]
    Nonvanishing(OptCaseArgs),
    /// Twisted epsilon sums against the single weighted sum, for every k and lambda.
    #[command(name = "prop52")]
    TwistedSums(OptCaseArgs),
    /// The dimension-20 cuspidals of GL_2(Z/25) over Q(sqrt(5)) and their zero sets.
    #[command(name = "remark61")]
    Level25,
    /// The characters Phi_x of K_m/K_2m and the maps h_{a,d} (ramified only).
    #[command(name = "section7")]
    KmCharacters {
        #[arg(long, requires = "m")]
        p: Option<u64>,
        #[arg(long, requires = "p")]
        m: Option<u32>,
    },
    /// Gauss sum norms and the CRT factorization of twisted Gauss sums.
    Gauss {
        /// Largest d for the factorization identity.
        #[arg(long, default_value_t = 60)]
        dmax: u64,
        /// Largest modulus for the norm identity.
        #[arg(long, default_value_t = 100)]
        mmax: u64,
    },
}

fn context(case: GroupCase, c: &Common) -> Result<LocalContext, Failure> {
    Ok(LocalContext::build(case, c.budget, c.cache.as_deref())?)
}

// ---------------------------------------------------------------- cusps

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CuspLevel {
    pub d: u64,
    pub count: usize,
    /// Exact divisor `Q` whose involution `W_Q` carries level `d` to `delta`.
    pub q: u64,
    pub delta: u64,
    pub cusps: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CuspsOutput {
    pub n: u64,
    pub count: usize,
    pub levels: Vec<CuspLevel>,
}

impl Render for CuspsOutput {
    fn text(&self) -> String {
        let mut s = format!("N = {}: {} cusps\n{:>6} {:>6} {:>6} {:>6}  cusps\n", self.n, self.count, "d", "count", "W_Q", "delta");
        for l in &self.levels {
            s += &format!("{:>6} {:>6} {:>6} {:>6}  {}\n", l.d, l.count, l.q, l.delta, l.cusps.join(" "));
        }
        s
    }

    fn csv(&self) -> Result<String, Failure> {
        #[derive(Serialize)]
        struct Row {
            n: u64,
            d: u64,
            count: usize,
            q: u64,
            delta: u64,
            cusps: String,
        }
        let rows: Vec<Row> = self
            .levels
            .iter()
            .map(|l| Row { n: self.n, d: l.d, count: l.count, q: l.q, delta: l.delta, cusps: l.cusps.join(" ") })
            .collect();
        csv_rows(&rows)
    }
}

pub fn cusps_output(n: u64) -> Result<CuspsOutput, Failure> {
    let all = enumerate_cusps(n)?;
    let mut levels = Vec::new();
    for d in cuspram::arith::int::divisors(n) {
        let cs = cusps_of_level(n, d)?;
        let (q, delta) = reduce_level(n, d)?;
        levels.push(CuspLevel { d, count: cs.len(), q, delta, cusps: cs.iter().map(|c| c.to_string()).collect() });
    }
    if all.len() as u64 != cusp_count_formula(n) {
        return Err(cuspram::Error::Invariant(format!("cusp count for N = {n} disagrees with the divisor sum")).into());
    }
    Ok(CuspsOutput { n, count: all.len(), levels })
}

pub fn cmd_cusps(n: u64, c: &Common) -> Outcome {
    emit(&cusps_output(n)?, c)?;
    Ok(true)
}

// ---------------------------------------------------------------- gl2

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Gl2Output {
    pub case: GroupCase,
    pub order: u64,
    pub classes: usize,
    /// Order of the root of unity holding every character value.
    pub exponent: u64,
    pub sum_dim_squares: u64,
    /// Orthogonality and the degree identity, checked exactly.
    pub verified: bool,
    pub verify_error: Option<String>,
    /// Agreement with the closed-form table (`GL_2(F_p)` only).
    pub closed_form: Option<bool>,
    pub cuspidal: usize,
    pub irreps: Vec<IrrepData>,
}

impl Gl2Output {
    pub fn passed(&self) -> bool {
        self.verified && self.closed_form != Some(false) && self.sum_dim_squares == self.order
    }
}

impl Render for Gl2Output {
    fn text(&self) -> String {
        let mut s = format!(
            "{}: order {}, {} classes, values in Q(zeta_{})\nsum of dim^2 = {}, orthogonality {}",
            self.case,
            self.order,
            self.classes,
            self.exponent,
            self.sum_dim_squares,
            if self.verified { "ok" } else { "FAILED" }
        );
        if let Some(ok) = self.closed_form {
            s += if ok { ", closed-form table ok" } else { ", closed-form table FAILED" };
        }
        s += &format!("\n{} strongly cuspidal\n\n", self.cuspidal);
        s += &format!(
            "{:>5} {:>5} {:>5} {:>9} {:>8} {:>8}  field\n",
            "index", "dim", "cond", "cuspidal", "central", "minimal"
        );
        let yn = |b: bool| if b { "yes" } else { "no" };
        for x in &self.irreps {
            s += &format!(
                "{:>5} {:>5} {:>5} {:>9} {:>8} {:>8}  {}\n",
                x.index,
                x.dim,
                x.conductor,
                yn(x.cuspidal),
                yn(x.central_trivial),
                yn(x.twist_minimal),
                x.field.name
            );
        }
        s
    }

    fn csv(&self) -> Result<String, Failure> {
        #[derive(Serialize)]
        struct Row<'a> {
            index: usize,
            dim: u64,
            conductor: u32,
            cuspidal: bool,
            central_trivial: bool,
            twist_minimal: bool,
            field: &'a str,
            field_degree: u64,
        }
        let rows: Vec<Row> = self
            .irreps
            .iter()
            .map(|x| Row {
                index: x.index,
                dim: x.dim,
                conductor: x.conductor,
                cuspidal: x.cuspidal,
                central_trivial: x.central_trivial,
                twist_minimal: x.twist_minimal,
                field: &x.field.name,
                field_degree: x.field.degree,
            })
            .collect();
        csv_rows(&rows)
    }
}

pub fn gl2_output(ctx: &LocalContext) -> Result<Gl2Output, Failure> {
    let g = ctx.group();
    let t = ctx.table();
    let case = g.case();
    let verify_error = t.verify(g).err().map(|e| e.to_string());
    let closed_form = (!case.is_ramified() && case.m() == 1).then(|| compare_with_oracle(g, t).is_ok());
    Ok(Gl2Output {
        case,
        order: g.order(),
        classes: g.classes().len(),
        exponent: t.exponent,
        sum_dim_squares: t.rows.iter().map(|r| r.dim * r.dim).sum(),
        verified: verify_error.is_none(),
        verify_error,
        closed_form,
        cuspidal: ctx.irreps().iter().filter(|x| x.cuspidal).count(),
        irreps: ctx.irreps().to_vec(),
    })
}

pub fn cmd_gl2(a: &CaseArgs, c: &Common) -> Outcome {
    let out = gl2_output(&context(a.case(), c)?)?;
    emit(&out, c)?;
    Ok(out.passed())
}

// ---------------------------------------------------------------- tsum

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TsumOutput {
    pub results: Vec<TSumResult>,
}

impl Render for TsumOutput {
    fn text(&self) -> String {
        let mut s = format!("{:>5} {:>4} {:>3} {:>6} {:>5}  value\n", "irrep", "psi", "k", "lambda", "zero");
        for r in &self.results {
            s += &format!(
                "{:>5} {:>4} {:>3} {:>6} {:>5}  {}\n",
                r.irrep,
                r.psi_unit,
                r.k,
                r.lambda,
                if r.is_zero { "yes" } else { "no" },
                r.value
            );
        }
        s
    }

    fn csv(&self) -> Result<String, Failure> {
        #[derive(Serialize)]
        struct Row {
            case: String,
            irrep: usize,
            psi: u64,
            k: u32,
            lambda: u64,
            zero: bool,
            value: String,
        }
        let rows: Vec<Row> = self
            .results
            .iter()
            .map(|r| Row {
                case: r.case.to_string(),
                irrep: r.irrep,
                psi: r.psi_unit,
                k: r.k,
                lambda: r.lambda,
                zero: r.is_zero,
                value: r.value.to_string(),
            })
            .collect();
        csv_rows(&rows)
    }
}

pub fn cmd_tsum(a: &TsumArgs, c: &Common) -> Outcome {
    let case = a.case.case();
    let ctx = context(case, c)?;
    let (p, m) = (case.p(), case.m());
    let psi = ctx.psi(a.psi)?;
    let irreps: Vec<usize> = match a.irrep {
        Some(i) => vec![i],
        None => ctx.irreps().iter().filter(|x| x.cuspidal && x.central_trivial).map(|x| x.index).collect(),
    };
    let levels: Vec<u32> = match a.k {
        Some(k) if k == 0 || k > m => return Err(Failure::usage(format!("k must lie in 1..={m}"))),
        Some(k) => vec![k],
        None => (1..=m).collect(),
    };
    let mut jobs = Vec::new();
    for &i in &irreps {
        for &k in &levels {
            match a.lambda {
                Some(l) => jobs.push((i, AdditiveCharacter::new(p, k, l as i64)?)),
                None => {
                    for l in UnitGroup::get(p.pow(k)).units() {
                        jobs.push((i, AdditiveCharacter::new(p, k, l as i64)?));
                    }
                }
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|(i, psi2)| ctx.t_sum(*i, &psi, psi2))
        .collect::<cuspram::Result<Vec<_>>>()?;
    emit(&TsumOutput { results }, c)?;
    Ok(true)
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepOutput {
    pub reports: Vec<SweepReport>,
    pub seconds: Vec<f64>,
}

impl SweepOutput {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }
}

impl Render for SweepOutput {
    fn text(&self) -> String {
        let mut s = format!(
            "{:<16} {:>7} {:>7} {:>7} {:>8} {:>10} {:>6} {:>8}  verdict\n",
            "case", "classes", "covered", "assert", "entries", "exceptions", "zeros", "seconds"
        );
        for (r, t) in self.reports.iter().zip(&self.seconds) {
            let v = &r.verdicts;
            s += &format!(
                "{:<16} {:>7} {:>7} {:>7} {:>8} {:>10} {:>6} {:>8.1}  {}\n",
                r.case.to_string(),
                r.classes,
                r.irreps.len(),
                v.asserted_irreps,
                r.irreps.iter().map(|x| x.tsums.len()).sum::<usize>(),
                v.exceptions.len(),
                r.irreps.iter().map(|x| x.zeros).sum::<usize>(),
                t,
                if r.passed() { "pass" } else { "FAIL" }
            );
            if !(v.rational_independence && v.psi_scaling && v.galois_equivariance) {
                s += &format!(
                    "  consistency: rational independence {}, psi scaling {}, Galois {}\n",
                    v.rational_independence, v.psi_scaling, v.galois_equivariance
                );
            }
            for e in &v.exceptions {
                s += &format!("  exception: irrep {} psi {} k {} lambda {}\n", e.irrep, e.psi, e.k, e.lambda);
            }
        }
        s
    }

    fn csv(&self) -> Result<String, Failure> {
        #[derive(Serialize)]
        struct Row<'a> {
            case: String,
            irrep: usize,
            dim: u64,
            conductor: u32,
            minimal: bool,
            field: &'a str,
            asserted: bool,
            entries: usize,
            zeros: usize,
        }
        let rows: Vec<Row> = self
            .reports
            .iter()
            .flat_map(|r| {
                r.irreps.iter().map(move |x| Row {
                    case: r.case.to_string(),
                    irrep: x.index,
                    dim: x.dim,
                    conductor: x.conductor,
                    minimal: x.minimal,
                    field: &x.field,
                    asserted: x.asserted,
                    entries: x.tsums.len(),
                    zeros: x.zeros,
                })
            })
            .collect();
        csv_rows(&rows)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwistedSumOutput {
    pub reports: Vec<TwistedSumReport>,
}

impl TwistedSumOutput {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }
}

impl Render for TwistedSumOutput {
    fn text(&self) -> String {
        let mut s = format!("{:<16} {:>6} {:>8} {:>8} {:>6}  verdict\n", "case", "irreps", "checked", "failures", "zeros");
        for r in &self.reports {
            s += &format!(
                "{:<16} {:>6} {:>8} {:>8} {:>6}  {}\n",
                r.case.to_string(),
                r.irreps.len(),
                r.checked,
                r.failures.len(),
                r.zeros.len(),
                if r.passed() { "pass" } else { "FAIL" }
            );
            for f in &r.failures {
                s += &format!("  mismatch: irrep {} k {} lambda {}\n", f.irrep, f.k, f.lambda);
            }
        }
        s
    }

    fn csv(&self) -> Result<String, Failure> {
        #[derive(Serialize)]
        struct Row {
            case: String,
            irreps: usize,
            checked: usize,
            failures: usize,
            zeros: usize,
            passed: bool,
        }
        let rows: Vec<Row> = self
            .reports
            .iter()
            .map(|r| Row {
                case: r.case.to_string(),
                irreps: r.irreps.len(),
                checked: r.checked,
                failures: r.failures.len(),
                zeros: r.zeros.len(),
                passed: r.passed(),
            })
            .collect();
        csv_rows(&rows)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Level25Output {
    pub report: Level25Report,
    /// Zero sets at `psi_1`, `k = 2`, for every covered irreducible.
    pub zero_sets: Vec<(usize, String, Vec<u64>)>,
}

impl Render for Level25Output {
    fn text(&self) -> String {
        let r = &self.report;
        let mut s = format!(
            "unramified(5,2): dimension-20 cuspidals over Q(sqrt(5)) with T = 0 at every lambda = +-1 mod 5: {}\n",
            if r.found { "found" } else { "NOT FOUND" }
        );
        for x in &r.irreps {
            let c = &x.candidate;
            s += &format!(
                "  irrep {} [{}]: zero set {:?}; twisted sums vanish on it: {}; level-25 product zero exactly at n = +-1 mod 5: {}\n",
                c.irrep,
                c.field,
                c.zero_set,
                if x.twisted_linked { "yes" } else { "no" },
                if x.merel_pm1 { "yes" } else { "no" }
            );
        }
        s += "zero sets at psi_1, k = 2:\n";
        for (i, f, z) in &self.zero_sets {
            s += &format!("  irrep {i} [{f}]: {z:?}\n");
        }
        s += if r.passed() { "pass\n" } else { "FAIL\n" };
        s
    }

    fn csv(&self) -> Result<String, Failure> {
        #[derive(Serialize)]
        struct Row<'a> {
            irrep: usize,
            field: &'a str,
            zero_set: String,
        }
        let rows: Vec<Row> = self
            .zero_sets
            .iter()
            .map(|(i, f, z)| Row {
                irrep: *i,
                field: f,
                zero_set: z.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
            })
            .collect();
        csv_rows(&rows)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KmOutput {
    pub reports: Vec<KmReport>,
}

impl Render for KmOutput {
    fn text(&self) -> String {
        let mut s = format!(
            "{:<14} {:>6} {:>6} {:>6} {:>7} {:>7} {:>7} {:>8} {:>6}  verdict\n",
            "case", "chars", "cosets", "kernel", "closed", "mult", "coset", "distinct", "h_inj"
        );
        for r in &self.reports {
            s += &format!(
                "{:<14} {:>6} {:>6} {:>6} {:>7} {:>7} {:>7} {:>8} {:>6}  {}\n",
                r.case.to_string(),
                r.characters,
                r.cosets,
                r.kernel_size,
                r.closed_form,
                r.multiplicative,
                r.coset_constant,
                r.distinct,
                r.h_injective,
                if r.passed() { "pass" } else { "FAIL" }
            );
        }
        s
    }

    fn csv(&self) -> Result<String, Failure> {
        #[derive(Serialize)]
        struct Row {
            case: String,
            characters: usize,
            cosets: usize,
            kernel_size: usize,
            closed_form: bool,
            multiplicative: bool,
            coset_constant: bool,
            distinct: bool,
            h_injective: bool,
            h_injective_ceil: bool,
        }
        let rows: Vec<Row> = self
            .reports
            .iter()
            .map(|r| Row {
                case: r.case.to_string(),
                characters: r.characters,
                cosets: r.cosets,
                kernel_size: r.kernel_size,
                closed_form: r.closed_form,
                multiplicative: r.multiplicative,
                coset_constant: r.coset_constant,
                distinct: r.distinct,
                h_injective: r.h_injective,
                h_injective_ceil: r.h_injective_ceil,
            })
            .collect();
        csv_rows(&rows)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GaussOutput {
    pub mmax: u64,
    pub norms_checked: usize,
    pub dmax: u64,
    pub factorizations_checked: usize,
    pub failure: Option<String>,
}

impl Render for GaussOutput {
    fn text(&self) -> String {
        let mut s = format!(
            "Gauss sum norms, primitive characters mod m <= {}: {} checked\nCRT factorization, d <= {}: {} checked\n",
            self.mmax, self.norms_checked, self.dmax, self.factorizations_checked
        );
        match &self.failure {
            Some(f) => s += &format!("FAIL: {f}\n"),
            None => s += "pass\n",
        }
        s
    }

    fn csv(&self) -> Result<String, Failure> {
        csv_rows(std::slice::from_ref(self))
    }
}

pub fn gauss_output(dmax: u64, mmax: u64) -> Result<GaussOutput, Failure> {
    let catch = |r: cuspram::Result<usize>, failure: &mut Option<String>| match r {
        Ok(n) => Ok(n),
        Err(e) if e.is_invariant() => {
            *failure = Some(e.to_string());
            Ok(0)
        }
        Err(e) => Err(Failure::from(e)),
    };
    let mut failure = None;
    let norms_checked = catch(verify_gauss_norms(mmax), &mut failure)?;
    let factorizations_checked = catch(verify_crt_factorization_up_to(dmax), &mut failure)?;
    Ok(GaussOutput { mmax, norms_checked, dmax, factorizations_checked, failure })
}

pub fn sweep_output(cases: &[GroupCase], c: &Common) -> Result<SweepOutput, Failure> {
    let mut reports = Vec::new();
    let mut seconds = Vec::new();
    for &case in cases {
        let t = Instant::now();
        reports.push(nonvanishing_sweep(&context(case, c)?)?);
        seconds.push(t.elapsed().as_secs_f64());
    }
    Ok(SweepOutput { reports, seconds })
}

pub fn twisted_output(cases: &[GroupCase], c: &Common) -> Result<TwistedSumOutput, Failure> {
    let reports = cases
        .iter()
        .map(|&case| Ok(twisted_sweep(&context(case, c)?)?))
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(TwistedSumOutput { reports })
}

pub fn level25_output(c: &Common) -> Result<Level25Output, Failure> {
    let ctx = context(GroupCase::new(5, 2, false), c)?;
    let sweep = nonvanishing_sweep(&ctx)?;
    let report = level25_report(&ctx, &sweep)?;
    let zero_sets = sweep
        .irreps
        .iter()
        .map(|x| {
            let z = x.tsums.iter().filter(|t| t.psi == 1 && t.k == 2 && t.zero).map(|t| t.lambda).collect();
            (x.index, x.field.clone(), z)
        })
        .collect();
    Ok(Level25Output { report, zero_sets })
}

pub fn km_output(cases: &[(u64, u32)], budget: u64) -> Result<KmOutput, Failure> {
    let reports = cases
        .iter()
        .map(|&(p, m)| km_identities(p, m, budget))
        .collect::<cuspram::Result<Vec<_>>>()?;
    Ok(KmOutput { reports })
}

fn finish<R: Render>(out: &R, passed: bool, artifact: Option<&Path>, c: &Common) -> Outcome {
    if let Some(path) = artifact {
        fs::write(path, to_json(out)?)?;
    }
    emit(out, c)?;
    Ok(passed)
}

pub fn cmd_verify(suite: &Suite, artifact: Option<&Path>, c: &Common) -> Outcome {
    match suite {
        Suite::Nonvanishing(a) => {
            let out = sweep_output(&a.cases(SWEEP_CASES), c)?;
            finish(&out, out.passed(), artifact, c)
        }
        Suite::TwistedSums(a) => {
            let out = twisted_output(&a.cases(SWEEP_CASES), c)?;
            finish(&out, out.passed(), artifact, c)
        }
        Suite::Level25 => {
            let out = level25_output(c)?;
            finish(&out, out.report.passed(), artifact, c)
        }
        Suite::KmCharacters { p, m } => {
            let cases = match (p, m) {
                (Some(p), Some(m)) => vec![(*p, *m)],
                _ => KM_CASES.to_vec(),
            };
            let out = km_output(&cases, c.budget)?;
            let ok = out.reports.iter().all(|r| r.passed());
            finish(&out, ok, artifact, c)
        }
        Suite::Gauss { dmax, mmax } => {
            let out = gauss_output(*dmax, *mmax)?;
            finish(&out, out.failure.is_none(), artifact, c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusps_of_48() {
        let out = cusps_output(48).unwrap();
        assert_eq!(out.count, 12);
        let l12 = out.levels.iter().find(|l| l.d == 12).unwrap();
        assert_eq!((l12.q, l12.delta), (3, 4));
    }

    #[test]
    fn cusps_of_1_and_0() {
        assert_eq!(cusps_output(1).unwrap().count, 1);
        assert_eq!(cusps_output(0).unwrap_err().code, 2);
    }

    #[test]
    fn small_gauss_suite() {
        let out = gauss_output(12, 20).unwrap();
        assert!(out.failure.is_none());
        assert!(out.norms_checked > 0 && out.factorizations_checked > 0);
    }

    fn round_trip<T: Serialize + for<'de> Deserialize<'de>>(x: &T) {
        let a = serde_json::to_string(x).unwrap();
        let back: T = serde_json::from_str(&a).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), a);
    }

    fn common() -> Common {
        Common { format: crate::output::Format::Json, out: None, jobs: None, prec: None, budget: cuspram::gl2::DEFAULT_BUDGET, cache: None }
    }

    #[test]
    fn reports_round_trip() {
        let c = common();
        round_trip(&cusps_output(48).unwrap());
        let g = gl2_output(&context(GroupCase::new(3, 1, false), &c).unwrap()).unwrap();
        assert!(g.passed());
        round_trip(&g);
        let cases = [GroupCase::new(3, 1, false), GroupCase::new(2, 1, true)];
        let t = sweep_output(&cases, &c).unwrap();
        assert!(t.passed());
        round_trip(&t);
        let p = twisted_output(&cases, &c).unwrap();
        assert!(p.passed());
        round_trip(&p);
        round_trip(&km_output(&[(2, 1)], c.budget).unwrap());
        round_trip(&gauss_output(6, 6).unwrap());
    }

    #[test]
    fn csv_has_a_header() {
        let s = cusps_output(11).unwrap().csv().unwrap();
        assert!(s.starts_with("n,d,count,q,delta,cusps\n"));
        assert_eq!(s.lines().count(), 3);
    }
}
