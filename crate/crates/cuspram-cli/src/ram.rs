//! `cuspram ram`: ramification indices for a file of curves.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cuspram::newform::{conductor_consistent, parse_curve_file, CurveCoefficients};
use cuspram::ramification::{ramification_report, EstimateStatus, RamificationConfig, RamificationReport};

use crate::output::{csv_rows, emit, Render};
use crate::{Bundled, Common, Failure, Outcome};

pub const CURVES_LE200: &str = include_str!("../data/curves_le200.txt");
pub const LARGE_CONDUCTORS: &str = include_str!("../data/large_conductors.txt");

/// Curves whose run needs `--long`.
const LONG_ONLY: &[&str] = &["20736c"];

#[derive(Args, Debug, Clone)]
pub struct RamArgs {
    /// Curve file with lines `label N a1 a2 a3 a4 a6`.
    #[arg(required_unless_present = "bundled", conflicts_with = "bundled")]
    pub file: Option<PathBuf>,
    /// Use a curve file shipped with the binary.
    #[arg(long, value_enum)]
    pub bundled: Option<Bundled>,
    /// Fitting grid for y, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ygrid: Option<Vec<f64>>,
    /// Raise the coefficient cap and include the slow curves.
    #[arg(long)]
    pub long: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RamifiedCusp {
    pub label: String,
    pub n: u64,
    pub d: u64,
    pub e: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RamOutput {
    pub curves: Vec<RamificationReport>,
    /// Curves skipped without `--long`.
    pub skipped: Vec<String>,
    /// `(d, e)` with `d^2 | N` and `e > 1`.
    pub ramified: Vec<RamifiedCusp>,
    pub seconds: f64,
}

impl RamOutput {
    pub fn passed(&self) -> bool {
        self.curves.iter().all(|c| !c.indeterminate() && c.failures.is_empty())
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    label: &'a str,
    #[serde(rename = "N")]
    n: u64,
    d: u64,
    q: u64,
    delta: u64,
    e: u32,
    method: String,
    status: String,
    residual: f64,
    #[serde(rename = "B_used")]
    b_used: usize,
    seconds: f64,
}

fn snake<T: Serialize>(x: &T) -> String {
    serde_json::to_value(x)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

impl Render for RamOutput {
    fn text(&self) -> String {
        let mut s = format!(
            "{:<10} {:>6} {:>5} {:>3} {:>10} {:>8} {:>8}\n",
            "class", "N", "d", "e", "residual", "B_used", "seconds"
        );
        for c in &self.curves {
            for r in c.rows.iter().filter(|r| r.d > 1 && c.n % (r.d * r.d) == 0) {
                let flag = if r.status == EstimateStatus::Indeterminate { "  indeterminate" } else { "" };
                s += &format!(
                    "{:<10} {:>6} {:>5} {:>3} {:>10.2e} {:>8} {:>8.2}{flag}\n",
                    c.label, c.n, r.d, r.e, r.residual, r.terms, r.seconds
                );
            }
        }
        s += &format!(
            "\n{} curves, {} ramified cusp levels, {:.1} s\n",
            self.curves.len(),
            self.ramified.len(),
            self.seconds
        );
        for r in &self.ramified {
            s += &format!("  ramified: {} d={} e={}\n", r.label, r.d, r.e);
        }
        for l in &self.skipped {
            s += &format!("  skipped (needs --long): {l}\n");
        }
        for c in &self.curves {
            for w in &c.warnings {
                s += &format!("  warning: {}: {w}\n", c.label);
            }
            for f in &c.failures {
                s += &format!("  FAILED: {}: {f}\n", c.label);
            }
        }
        s
    }

    fn csv(&self) -> Result<String, Failure> {
        let rows: Vec<CsvRow> = self
            .curves
            .iter()
            .flat_map(|c| {
                c.rows.iter().map(move |r| CsvRow {
                    label: &c.label,
                    n: c.n,
                    d: r.d,
                    q: r.q,
                    delta: r.delta,
                    e: r.e,
                    method: snake(&r.method),
                    status: snake(&r.status),
                    residual: r.residual,
                    b_used: r.terms,
                    seconds: r.seconds,
                })
            })
            .collect();
        csv_rows(&rows)
    }
}

pub fn config(prec: Option<usize>, ygrid: Option<&[f64]>, long: bool) -> Result<RamificationConfig, Failure> {
    let mut cfg = if long { RamificationConfig::long() } else { RamificationConfig::default() };
    if let Some(p) = prec {
        if p < 64 {
            return Err(Failure::usage("--prec must be at least 64 bits"));
        }
        cfg.prec = p;
    }
    if let Some(g) = ygrid {
        if g.len() < 2 || g.iter().any(|y| !(y.is_finite() && *y > 0.0)) {
            return Err(Failure::usage("--ygrid needs at least two positive values"));
        }
        cfg.fit_grid = g.to_vec();
    }
    Ok(cfg)
}

/// Run every curve, in file order, on the global worker pool.
pub fn run_curves(curves: &[CurveCoefficients], cfg: &RamificationConfig, long: bool) -> Result<RamOutput, Failure> {
    let start = Instant::now();
    if let Some(c) = curves.iter().find(|c| !conductor_consistent(c)) {
        return Err(Failure::usage(format!(
            "{}: the discriminant of the model is not divisible by every prime of N = {}",
            c.label, c.n
        )));
    }
    let (run, skipped): (Vec<&CurveCoefficients>, Vec<&CurveCoefficients>) =
        curves.iter().partition(|c| long || !LONG_ONLY.contains(&c.label.as_str()));
    let reports = run
        .par_iter()
        .map(|c| ramification_report(c, cfg))
        .collect::<cuspram::Result<Vec<_>>>()?;
    let ramified = reports
        .iter()
        .flat_map(|r| {
            r.ramified_levels().into_iter().map(|(d, e)| RamifiedCusp {
                label: r.label.clone(),
                n: r.n,
                d,
                e,
            })
        })
        .collect();
    Ok(RamOutput {
        curves: reports,
        skipped: skipped.iter().map(|c| c.label.clone()).collect(),
        ramified,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn cmd_ram(a: &RamArgs, c: &Common) -> Outcome {
    let text = match (&a.file, a.bundled) {
        (_, Some(Bundled::Le200)) => CURVES_LE200.to_string(),
        (_, Some(Bundled::Large)) => LARGE_CONDUCTORS.to_string(),
        (Some(path), None) => fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(Failure::usage("give a curve file or --bundled")),
    };
    let curves = parse_curve_file(&text)?;
    let cfg = config(c.prec, a.ygrid.as_deref(), a.long)?;
    let out = run_curves(&curves, &cfg, a.long)?;
    for r in &out.curves {
        for w in &r.warnings {
            eprintln!("warning: {}: {w}", r.label);
        }
    }
    emit(&out, c)?;
    Ok(out.passed())
}
