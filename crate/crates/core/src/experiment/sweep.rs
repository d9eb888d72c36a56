use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::MethodStats;
use super::{run_trial, InfeasibilityPolicy, Method, TrialResult};
use crate::error::{Error, Result};
use crate::model::ScenarioConfig;

/// Link counts of the sum-rate versus links sweep.
pub const LINK_COUNTS: [f64; 5] = [10.0, 16.0, 20.0, 30.0, 40.0];
/// Tenant B loads of the utilization sweep.
pub const UTILIZATIONS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
/// Maximum link ranges of the range sweep, meters.
pub const RANGES_M: [f64; 6] = [25.0, 50.0, 75.0, 100.0, 125.0, 150.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// No parameter changes; the single point is labelled 0.
    Base,
    NumLinks,
    /// Utilization of the second tenant's pool.
    UtilizationB,
    MaxRangeM,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Base => "base",
            SweepAxis::NumLinks => "num_links",
            SweepAxis::UtilizationB => "utilization_b",
            SweepAxis::MaxRangeM => "max_range_m",
        }
    }

    /// `cfg` with the axis parameter set to `value`.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut c = cfg.clone();
        match self {
            SweepAxis::Base => {}
            SweepAxis::NumLinks => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "link count {value} is not a count"
                    )));
                }
                c.num_d2d_links = value as usize;
            }
            SweepAxis::UtilizationB => {
                let slot = c.cue_utilization.get_mut(1).ok_or_else(|| {
                    Error::InvalidConfig("utilization sweep needs a second tenant".into())
                })?;
                *slot = value;
            }
            SweepAxis::MaxRangeM => c.max_d2d_range_m = value,
        }
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepAxis::Base,
            SweepAxis::NumLinks,
            SweepAxis::UtilizationB,
            SweepAxis::MaxRangeM,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| Error::Schema(format!("unknown sweep axis `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub stats: MethodStats,
    /// Trials where the method served every link without relaxation.
    pub feasible_trials: usize,
    pub relaxed_trials: usize,
    pub mean_wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub value: f64,
    /// In [`Method::ALL`] order.
    pub methods: Vec<MethodSummary>,
}

impl PointSummary {
    pub fn from_trials(value: f64, trials: &[TrialResult]) -> Self {
        let methods = Method::ALL
            .into_iter()
            .map(|m| {
                let outcomes: Vec<_> = trials.iter().map(|t| t.outcome(m)).collect();
                let objectives: Vec<f64> = outcomes.iter().map(|o| o.objective_bps).collect();
                let n = outcomes.len().max(1) as f64;
                MethodSummary {
                    method: m,
                    stats: MethodStats::from_values(&objectives),
                    feasible_trials: outcomes.iter().filter(|o| o.feasible).count(),
                    relaxed_trials: outcomes.iter().filter(|o| o.relaxed).count(),
                    mean_wall_time_s: outcomes.iter().map(|o| o.wall_time_s).sum::<f64>() / n,
                }
            })
            .collect();
        Self { value, methods }
    }

    pub fn method(&self, m: Method) -> &MethodSummary {
        self.methods
            .iter()
            .find(|s| s.method == m)
            .expect("all methods summarized")
    }

    pub fn mean(&self, m: Method) -> f64 {
        self.method(m).stats.mean
    }

    /// Relative advantage of `a` over `b` on mean sum-rate, percent.
    pub fn gain_percent(&self, a: Method, b: Method) -> f64 {
        100.0 * (self.mean(a) - self.mean(b)) / self.mean(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub trials_per_point: usize,
    pub points: Vec<PointSummary>,
    /// `trials[p][t]`: trial `t` at point `p`.
    pub trials: Vec<Vec<TrialResult>>,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// Runs `trials` trials at every value of `axis`. Trials run in parallel;
/// results are gathered in (point, trial) order, so the output does not
/// depend on scheduling.
pub fn sweep(
    cfg: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    trials: usize,
    policy: InfeasibilityPolicy,
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::InvalidConfig(
            "a sweep needs at least one value".into(),
        ));
    }
    let cfgs = values
        .iter()
        .map(|&v| axis.apply(cfg, v))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> = (0..cfgs.len())
        .flat_map(|p| (0..trials as u64).map(move |t| (p, t)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(p, t)| run_trial(&cfgs[p], t, policy))
        .collect::<Result<Vec<_>>>()?;

    let mut per_point: Vec<Vec<TrialResult>> = vec![Vec::with_capacity(trials); cfgs.len()];
    for ((p, _), r) in jobs.into_iter().zip(results) {
        per_point[p].push(r);
    }
    let points = values
        .iter()
        .zip(&per_point)
        .map(|(&v, ts)| PointSummary::from_trials(v, ts))
        .collect();
    Ok(SweepResult {
        axis,
        trials_per_point: trials,
        points,
        trials: per_point,
    })
}

pub fn sweep_links(cfg: &ScenarioConfig, values: &[f64], trials: usize) -> Result<SweepResult> {
    sweep(
        cfg,
        SweepAxis::NumLinks,
        values,
        trials,
        InfeasibilityPolicy::DropLinks,
    )
}

pub fn sweep_utilization(
    cfg: &ScenarioConfig,
    values: &[f64],
    trials: usize,
) -> Result<SweepResult> {
    sweep(
        cfg,
        SweepAxis::UtilizationB,
        values,
        trials,
        InfeasibilityPolicy::DropLinks,
    )
}

pub fn sweep_range(cfg: &ScenarioConfig, values: &[f64], trials: usize) -> Result<SweepResult> {
    sweep(
        cfg,
        SweepAxis::MaxRangeM,
        values,
        trials,
        InfeasibilityPolicy::DropLinks,
    )
}

/// Rate-equivalent per-link SINR samples of `method`, pooled over every
/// point and trial of the sweep.
pub fn pooled_sinr(result: &SweepResult, method: Method) -> Vec<f64> {
    result
        .trials
        .iter()
        .flatten()
        .flat_map(|t| t.outcome(method).sinr_eff_db.iter().copied())
        .collect()
}
