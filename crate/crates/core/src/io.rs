//! CSV and JSON output. Reals are written with 17 significant digits, rows
//! end in LF, and every file is written in one piece so reruns reproduce it
//! byte for byte.

use crate::error::{Error, Result};
use crate::harness::{ExperimentPlan, RateReport};
use crate::minimax::MinimaxPair;
use crate::models::SamplePath;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>, out: &Path) -> Result<()> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    std::fs::write(out, bytes)?;
    Ok(())
}

pub fn write_path_csv(path: &SamplePath, out: &Path) -> Result<()> {
    let mut w = writer();
    w.write_record(["time", "value"])?;
    for (t, v) in path.times().zip(&path.values) {
        w.write_record([fmt_real(t), fmt_real(*v)])?;
    }
    finish(w, out)
}

/// Read observations from the `value` column; a `time` column is optional
/// and only checked for being increasing.
pub fn read_path_csv(input: &Path) -> Result<SamplePath> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(input)?;
    let headers = rd.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let value_col = col("value")
        .ok_or_else(|| Error::invalid("path csv", "missing `value` column"))?;
    let time_col = col("time");
    let mut values = Vec::new();
    let mut last_time = f64::NEG_INFINITY;
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| -> Result<f64> {
            let s = rec.get(c).unwrap_or("");
            s.parse()
                .map_err(|_| Error::invalid("path csv", format!("row {}: cannot parse `{s}`", i + 1)))
        };
        if let Some(tc) = time_col {
            let t = field(tc)?;
            if !(t > last_time) {
                return Err(Error::invalid("path csv", format!("row {}: times must increase", i + 1)));
            }
            last_time = t;
        }
        values.push(field(value_col)?);
    }
    SamplePath::from_values(values)
}

/// One estimator applied to one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub estimator: String,
    pub n: usize,
    pub seed: Option<u64>,
    pub value: f64,
    pub tuning_used: Option<f64>,
    pub degenerate: bool,
}

pub fn write_estimates_csv(rows: &[EstimateRow], out: &Path) -> Result<()> {
    let mut w = writer();
    w.write_record(["estimator", "n", "seed", "value", "tuning_used", "degenerate"])?;
    for r in rows {
        w.write_record([
            r.estimator.clone(),
            r.n.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            fmt_real(r.value),
            fmt_opt(r.tuning_used),
            r.degenerate.to_string(),
        ])?;
    }
    finish(w, out)
}

pub fn write_report_csv(report: &RateReport, out: &Path) -> Result<()> {
    let mut w = writer();
    w.write_record([
        "estimator",
        "n",
        "count",
        "mean_error",
        "mean_abs_error",
        "median_abs_error",
        "rmse",
        "p90_abs_error",
        "degenerate_count",
        "tuning_used",
        "rho_scaled_median",
    ])?;
    for c in &report.cells {
        w.write_record([
            c.estimator.clone(),
            c.n.to_string(),
            c.count.to_string(),
            fmt_real(c.mean_error),
            fmt_real(c.mean_abs_error),
            fmt_real(c.median_abs_error),
            fmt_real(c.rmse),
            fmt_real(c.p90_abs_error),
            c.degenerate_count.to_string(),
            fmt_opt(c.tuning_used),
            fmt_real(c.rho_scaled_median),
        ])?;
    }
    finish(w, out)
}

#[derive(Serialize)]
struct ReportSummary<'a> {
    plan: &'a ExperimentPlan,
    report: &'a RateReport,
}

/// JSON with the plan, fitted slopes, theory exponents and every cell.
pub fn write_report_json(plan: &ExperimentPlan, report: &RateReport, out: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(&ReportSummary { plan, report })?;
    s.push('\n');
    std::fs::write(out, s)?;
    Ok(())
}

/// `x.csv` -> `x.json`
pub fn json_sibling(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_minimax_csv(pairs: &[MinimaxPair], out: &Path) -> Result<()> {
    let mut w = writer();
    w.write_record([
        "r",
        "n",
        "a_n",
        "u_n",
        "norm_eta",
        "norm_eta_prime",
        "tv_bound",
        "grid_spacing",
        "grid_extent",
        "tv_proxy",
    ])?;
    for p in pairs {
        let d = &p.diagnostics;
        w.write_record([
            fmt_real(p.r),
            p.n.to_string(),
            fmt_real(p.a_n),
            fmt_real(p.u_n),
            fmt_real(d.norm_eta),
            fmt_real(d.norm_eta_prime),
            fmt_real(d.tv_bound),
            fmt_real(p.big_h.spacing),
            fmt_real(p.big_h.extent()),
            fmt_real(d.tv_proxy),
        ])?;
    }
    finish(w, out)
}

/// Full `(u, η(u), η'(u))` table of one pair.
pub fn write_eta_dump(pair: &MinimaxPair, out: &Path) -> Result<()> {
    let mut w = writer();
    w.write_record(["u", "eta", "eta_prime"])?;
    for ((u, e), ep) in pair.u_grid().zip(&pair.eta).zip(&pair.eta_prime) {
        w.write_record([fmt_real(u), fmt_real(*e), fmt_real(*ep)])?;
    }
    finish(w, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{simulate_path, ModelSpec};

    #[test]
    fn path_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("p.csv");
        let path = simulate_path(&ModelSpec::brownian(1.0), 50, 3).unwrap();
        write_path_csv(&path, &file).unwrap();
        let back = read_path_csv(&file).unwrap();
        assert_eq!(back.values, path.values);
        let text = std::fs::read_to_string(&file).unwrap();
        assert!(text.starts_with("time,value\n"));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 52);
    }

    #[test]
    fn read_value_only() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("v.csv");
        std::fs::write(&file, "value\n0\n1\n0\n2\n").unwrap();
        assert_eq!(read_path_csv(&file).unwrap().values, vec![0.0, 1.0, 0.0, 2.0]);
        std::fs::write(&file, "time,value\n0,0\n0,1\n").unwrap();
        assert!(read_path_csv(&file).is_err());
        std::fs::write(&file, "x\n1\n2\n").unwrap();
        assert!(read_path_csv(&file).is_err());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
    }
}
