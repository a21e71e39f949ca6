//! Aggregation of run results into comparison quantities, and the CSV
//! serialization the tooling consumes.
//!
//! CSV output is the product here: header row first, fixed column order, LF
//! line endings, '.' decimal separator, byte-identical across platforms for
//! identical inputs.

use std::fmt::Write as _;
use std::path::Path;

use crate::engine::{RoundLog, RunSummary};
use crate::error::{Error, Result};

/// Mean/min/max of cumulative informed count at one round, over a group of
/// runs. Runs that ended earlier are step-held at their final value.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub round: u32,
    pub mean: f64,
    pub min: u32,
    pub max: u32,
}

/// Comparison quantities for one group of runs (same parameters, different
/// seeds).
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub group_key: String,
    pub runs: u32,
    /// Fraction of runs that reached full alive coverage.
    pub convergence_rate: f64,
    /// Mean convergence round among converged runs; `None` when no run
    /// converged. Never-converged runs are excluded rather than coded as a
    /// sentinel, so the mean stays unbiased.
    pub mean_convergence_round: Option<f64>,
    pub mean_residue: f64,
    pub mean_total_sends: f64,
    /// Mean over runs of duplicates / sends (0 for runs with no sends).
    pub mean_duplicate_ratio: f64,
    pub informed_curve: Vec<CurvePoint>,
}

/// Mean over values summed in a canonical order, so aggregation is exactly
/// permutation-invariant despite float rounding.
fn stable_mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Folds runs of one group into an [`Aggregate`]. All runs must share the
/// same group key (see [`SimConfig::group_key`](crate::SimConfig::group_key));
/// input order does not matter, down to the float rounding of the means.
pub fn aggregate(runs: &[(&RunSummary, &[RoundLog])]) -> Result<Aggregate> {
    if runs.is_empty() {
        return Err(Error::invalid("aggregate: empty input"));
    }
    let group_key = runs[0].0.config.group_key();
    for (summary, _) in runs {
        let key = summary.config.group_key();
        if key != group_key {
            return Err(Error::invalid(format!(
                "aggregate: mixed group keys ({group_key:?} vs {key:?})"
            )));
        }
    }

    let n_runs = runs.len() as f64;
    let converged: Vec<&RunSummary> = runs
        .iter()
        .map(|(s, _)| *s)
        .filter(|s| s.converged)
        .collect();
    let mean_convergence_round = if converged.is_empty() {
        None
    } else {
        Some(stable_mean(
            converged
                .iter()
                .map(|s| f64::from(s.convergence_round.expect("converged run has a round")))
                .collect(),
        ))
    };

    let max_len = runs.iter().map(|(_, logs)| logs.len()).max().unwrap_or(0);
    let mut informed_curve = Vec::with_capacity(max_len);
    for i in 0..max_len {
        let mut sum = 0.0;
        let mut min = u32::MAX;
        let mut max = 0;
        for (_, logs) in runs {
            // step-held: past its end a run keeps its final value
            let v = logs[i.min(logs.len() - 1)].cumulative_informed;
            sum += f64::from(v);
            min = min.min(v);
            max = max.max(v);
        }
        informed_curve.push(CurvePoint {
            round: i as u32,
            mean: sum / n_runs,
            min,
            max,
        });
    }

    Ok(Aggregate {
        group_key,
        runs: runs.len() as u32,
        convergence_rate: converged.len() as f64 / n_runs,
        mean_convergence_round,
        mean_residue: stable_mean(runs.iter().map(|(s, _)| s.residue).collect()),
        mean_total_sends: stable_mean(runs.iter().map(|(s, _)| s.total_sends as f64).collect()),
        mean_duplicate_ratio: stable_mean(
            runs.iter()
                .map(|(s, _)| {
                    if s.total_sends == 0 {
                        0.0
                    } else {
                        s.total_duplicates as f64 / s.total_sends as f64
                    }
                })
                .collect(),
        ),
        informed_curve,
    })
}

/// A row type with a fixed header and serialization order.
pub trait CsvRow {
    const HEADER: &'static str;
    fn write_row(&self, out: &mut String);
}

/// RFC-4180 field escaping: quote when the value contains a comma, quote, or
/// newline. The built-in row types never need it, but external callers might.
pub fn push_field(out: &mut String, field: &str) {
    if field.contains([',', '"', '\n', '\r']) {
        out.push('"');
        out.push_str(&field.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(field);
    }
}

fn push_opt<T: std::fmt::Display>(out: &mut String, v: &Option<T>) {
    if let Some(v) = v {
        let _ = write!(out, "{v}");
    }
}

/// `rounds.csv` row: one per executed round of one run.
#[derive(Debug, Clone)]
pub struct RoundRow<'a> {
    pub run_id: u64,
    pub log: &'a RoundLog,
}

impl CsvRow for RoundRow<'_> {
    const HEADER: &'static str =
        "run_id,round,sends,first_deliveries,duplicate_receptions,cumulative_informed,active_count";

    fn write_row(&self, out: &mut String) {
        let l = self.log;
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            self.run_id,
            l.round,
            l.sends,
            l.first_deliveries,
            l.duplicate_receptions,
            l.cumulative_informed,
            l.active_count
        );
    }
}

/// `summary.csv` row: one per run.
#[derive(Debug, Clone)]
pub struct SummaryRow<'a> {
    pub run_id: u64,
    pub summary: &'a RunSummary,
}

impl CsvRow for SummaryRow<'_> {
    const HEADER: &'static str = "run_id,mode,n,contacts,fanout,gossip_style,k,group_size,\
                                  origin,failed_count,seed,converged,convergence_round,coverage,\
                                  residue,total_sends,total_duplicates,rounds_executed";

    fn write_row(&self, out: &mut String) {
        let s = self.summary;
        let c = &s.config;
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},",
            self.run_id,
            c.mode,
            c.n,
            c.contacts,
            c.fanout,
            c.gossip_style,
            c.k,
            c.group_size,
            c.origin,
            c.failed.len(),
            c.seed,
            s.converged
        );
        push_opt(out, &s.convergence_round);
        let _ = write!(
            out,
            ",{},{},{},{},{}",
            s.coverage, s.residue, s.total_sends, s.total_duplicates, s.rounds_executed
        );
    }
}

impl CsvRow for Aggregate {
    const HEADER: &'static str = "group_key,runs,convergence_rate,mean_convergence_round,\
                                  mean_residue,mean_total_sends,mean_duplicate_ratio";

    fn write_row(&self, out: &mut String) {
        push_field(out, &self.group_key);
        let _ = write!(out, ",{},{},", self.runs, self.convergence_rate);
        push_opt(out, &self.mean_convergence_round);
        let _ = write!(
            out,
            ",{},{},{}",
            self.mean_residue, self.mean_total_sends, self.mean_duplicate_ratio
        );
    }
}

/// Renders rows to CSV text: header line, then one line per row, LF endings.
pub fn csv_string<R: CsvRow>(rows: &[R]) -> String {
    let mut out = String::new();
    out.push_str(R::HEADER);
    out.push('\n');
    for row in rows {
        row.write_row(&mut out);
        out.push('\n');
    }
    out
}

/// Writes rows as a CSV file and returns the byte count written.
pub fn write_csv<R: CsvRow>(rows: &[R], path: &Path) -> Result<u64> {
    let text = csv_string(rows);
    std::fs::write(path, &text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(text.len() as u64)
}
