//! CSV files written by runs. Wall times stay out of them so that a re-run
//! with the same seed reproduces every byte.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::stats::{sinr_cdf, EmpiricalCdf};
use super::sweep::SweepResult;
use super::Method;
use crate::error::{Error, Result};

pub const TRIAL_CSV_HEADER: &str = "axis,value,trial,seed,method,objective_bps,status,feasible,\
relaxed,dropped_links,served_links,rbs_used,median_sinr_eff_db";

pub const SWEEP_CSV_HEADER: &str =
    "axis,value,method,n,mean_bps,std_bps,ci95_bps,feasible_trials,relaxed_trials";

#[derive(Debug, Serialize)]
struct TrialRow<'a> {
    axis: &'a str,
    value: f64,
    trial: u64,
    seed: u64,
    method: Method,
    objective_bps: f64,
    status: String,
    feasible: bool,
    relaxed: bool,
    /// Space-separated link indices.
    dropped_links: String,
    served_links: usize,
    rbs_used: usize,
    median_sinr_eff_db: Option<f64>,
}

/// One row per (point, trial, method).
pub fn write_trial_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (point, trials) in result.points.iter().zip(&result.trials) {
        for t in trials {
            for o in &t.outcomes {
                let median = sinr_cdf(&o.sinr_eff_db).ok().map(|c| c.median());
                w.serialize(TrialRow {
                    axis: result.axis.name(),
                    value: point.value,
                    trial: t.trial_index,
                    seed: t.seed,
                    method: o.method,
                    objective_bps: o.objective_bps,
                    status: o.status.to_string(),
                    feasible: o.feasible,
                    relaxed: o.relaxed,
                    dropped_links: o
                        .dropped_links
                        .iter()
                        .map(|l| l.0.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    served_links: o.served_links,
                    rbs_used: o.rbs_used,
                    median_sinr_eff_db: median,
                })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub method: Method,
    pub n: usize,
    pub mean_bps: f64,
    pub std_bps: f64,
    pub ci95_bps: f64,
    pub feasible_trials: usize,
    pub relaxed_trials: usize,
}

/// One row per (point, method).
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for point in &result.points {
        for s in &point.methods {
            w.serialize(SweepRow {
                axis: result.axis.name().to_string(),
                value: point.value,
                method: s.method,
                n: s.stats.n,
                mean_bps: s.stats.mean,
                std_bps: s.stats.std,
                ci95_bps: s.stats.ci95,
                feasible_trials: s.feasible_trials,
                relaxed_trials: s.relaxed_trials,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a sweep CSV back, insisting on the exact header.
pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != SWEEP_CSV_HEADER {
        return Err(Error::Schema(format!(
            "expected sweep header `{SWEEP_CSV_HEADER}`, found `{header}`"
        )));
    }
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<SweepRow>, _>>()
        .map_err(|e| Error::Schema(e.to_string()))?;
    if rows.is_empty() {
        return Err(Error::Schema("sweep CSV has no rows".into()));
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct SinrRow<'a> {
    axis: &'a str,
    value: f64,
    trial: u64,
    method: Method,
    /// `effective` (one per served link) or `per-rb`.
    kind: &'a str,
    sinr_db: f64,
}

/// Every SINR sample of every trial, both the per-link rate-equivalent
/// value and the per-RB values.
pub fn write_sinr_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (point, trials) in result.points.iter().zip(&result.trials) {
        for t in trials {
            for o in &t.outcomes {
                let rows = o
                    .sinr_eff_db
                    .iter()
                    .map(|&s| ("effective", s))
                    .chain(o.sinr_rb_db.iter().map(|&s| ("per-rb", s)));
                for (kind, sinr_db) in rows {
                    w.serialize(SinrRow {
                        axis: result.axis.name(),
                        value: point.value,
                        trial: t.trial_index,
                        method: o.method,
                        kind,
                        sinr_db,
                    })?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `method,sinr_db,cdf` rows, each method's samples ascending.
pub fn write_cdf_csv<W: Write>(cdfs: &[(Method, EmpiricalCdf)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "sinr_db", "cdf"])?;
    for (m, cdf) in cdfs {
        for (v, f) in cdf.table() {
            w.write_record([m.name().to_string(), v.to_string(), f.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
