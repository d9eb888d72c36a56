//! Seeded Monte Carlo trials comparing the four allocation methods, the
//! three parameter sweeps and their aggregation.
//!
//! A trial's randomness depends only on `(rng_seed, trial_index)`, and the
//! same trial indices are reused at every sweep point, so neighbouring
//! points differ only in the swept parameter.

mod output;
mod stats;
mod sweep;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::channel::{build_rate_table, effective_sinr, linear_to_db, ChannelRealization};
use crate::error::{Error, Result};
use crate::heuristics::{inter_tenant_heuristic, single_queue_greedy, tenant_problems};
use crate::ilp::{
    build_problem, solve_exact, Allocation, AllocationProblem, Limits, Scope, Status,
};
use crate::model::{generate_topology, LinkId, ScenarioConfig, SeedStreams, Topology};
use crate::scheduler::{schedule_cues, CueSchedule};

pub use output::{
    read_sweep_csv, write_cdf_csv, write_sinr_csv, write_sweep_csv, write_trial_csv, SweepRow,
    SWEEP_CSV_HEADER, TRIAL_CSV_HEADER,
};
pub use stats::{sinr_cdf, EmpiricalCdf, MethodStats, Z_95};
pub use sweep::{
    pooled_sinr, sweep, sweep_links, sweep_range, sweep_utilization, PointSummary, SweepAxis,
    SweepResult, LINK_COUNTS, RANGES_M, UTILIZATIONS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact solve over the fused pool.
    InterOptimal,
    /// Alternating greedy over the fused pool.
    InterHeuristic,
    /// Exact solve per tenant over its own pool.
    IntraOptimal,
    /// Single-queue greedy per tenant over its own pool.
    IntraHeuristic,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::InterOptimal,
        Method::InterHeuristic,
        Method::IntraOptimal,
        Method::IntraHeuristic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::InterOptimal => "inter-optimal",
            Method::InterHeuristic => "inter-heuristic",
            Method::IntraOptimal => "intra-optimal",
            Method::IntraHeuristic => "intra-heuristic",
        }
    }

    pub fn is_optimal(self) -> bool {
        matches!(self, Method::InterOptimal | Method::IntraOptimal)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

/// What to do when a method cannot serve every link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfeasibilityPolicy {
    /// Record the method as infeasible for the trial.
    Report,
    /// Remove the link with the worst best-rate and solve again, until the
    /// rest is feasible. Applied per tenant for the intra methods.
    #[default]
    DropLinks,
}

/// Everything random about one trial.
#[derive(Debug, Clone)]
pub struct Realization {
    pub seeds: SeedStreams,
    pub topology: Topology,
    pub schedule: CueSchedule,
    pub channel: ChannelRealization,
}

pub fn realize(cfg: &ScenarioConfig, trial_index: u64) -> Result<Realization> {
    let seeds = SeedStreams::for_trial(cfg.rng_seed, trial_index);
    let topology = generate_topology(cfg, &seeds)?;
    let schedule = schedule_cues(&topology, cfg, trial_index)?;
    let channel = build_rate_table(&topology, &schedule, cfg, &seeds)?;
    Ok(Realization {
        seeds,
        topology,
        schedule,
        channel,
    })
}

/// A method's result together with the problems it was finally solved on,
/// one per tenant for the intra methods.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub allocation: Allocation,
    pub parts: Vec<(AllocationProblem, Allocation)>,
    pub dropped: Vec<LinkId>,
}

fn solve_part(
    mut p: AllocationProblem,
    policy: InfeasibilityPolicy,
    solve: &dyn Fn(&AllocationProblem) -> Allocation,
    dropped: &mut Vec<LinkId>,
) -> (AllocationProblem, Allocation) {
    loop {
        let a = solve(&p);
        if a.status.is_feasible() || policy == InfeasibilityPolicy::Report || p.links.is_empty() {
            return (p, a);
        }
        // lowest best-rate, earliest link on ties
        let worst = (0..p.num_links())
            .min_by(|&a, &b| p.best_rate(a).total_cmp(&p.best_rate(b)).then(a.cmp(&b)))
            .expect("non-empty link set");
        dropped.push(p.links[worst]);
        p = p.without_link(worst);
    }
}

/// Runs one method on a realization.
pub fn run_method(
    real: &Realization,
    method: Method,
    limits: Limits,
    policy: InfeasibilityPolicy,
) -> Result<MethodRun> {
    let ch = &real.channel;
    let topo = &real.topology;
    let links: Vec<LinkId> = topo.link_ids().collect();
    let exact = |p: &AllocationProblem| solve_exact(p).0;
    let greedy = |p: &AllocationProblem| single_queue_greedy(p).0;
    let alternating =
        |p: &AllocationProblem| inter_tenant_heuristic(p, |l| topo.link(l).receiver).0;

    let problems: Vec<AllocationProblem> = match method {
        Method::InterOptimal | Method::InterHeuristic => {
            vec![build_problem(ch, Scope::Fused, &links, limits)?]
        }
        Method::IntraOptimal | Method::IntraHeuristic => {
            tenant_problems(ch, &links, |l| topo.link(l).initiator, limits)?
                .into_iter()
                .map(|(_, p)| p)
                .collect()
        }
    };
    let solve: &dyn Fn(&AllocationProblem) -> Allocation = match method {
        Method::InterOptimal | Method::IntraOptimal => &exact,
        Method::InterHeuristic => &alternating,
        Method::IntraHeuristic => &greedy,
    };

    let mut dropped = Vec::new();
    let parts: Vec<(AllocationProblem, Allocation)> = problems
        .into_iter()
        .map(|p| solve_part(p, policy, solve, &mut dropped))
        .collect();
    let mut allocation = Allocation::union(parts.iter().map(|(_, a)| a));
    if parts.is_empty() && !method.is_optimal() {
        allocation.status = Status::Feasible;
    }
    dropped.sort();
    Ok(MethodRun {
        allocation,
        parts,
        dropped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub objective_bps: f64,
    pub status: Status,
    /// Feasible for the full link set, without dropping links.
    pub feasible: bool,
    pub relaxed: bool,
    pub dropped_links: Vec<LinkId>,
    pub served_links: usize,
    pub rbs_used: usize,
    /// Rate-equivalent SINR of each served link, dB, in link order.
    pub sinr_eff_db: Vec<f64>,
    /// SINR on every assigned RB, dB.
    pub sinr_rb_db: Vec<f64>,
    pub wall_time_s: f64,
}

impl MethodOutcome {
    fn from_run(method: Method, run: &MethodRun, ch: &ChannelRealization, secs: f64) -> Self {
        let a = &run.allocation;
        let bw = ch.radio.rb_bandwidth_hz;
        let mut sinr_eff_db = Vec::new();
        let mut sinr_rb_db = Vec::new();
        for (&link, rbs) in &a.assigned {
            if rbs.is_empty() {
                continue;
            }
            sinr_eff_db.push(linear_to_db(effective_sinr(
                a.per_link_rate_bps[&link],
                rbs.len(),
                bw,
            )));
            sinr_rb_db.extend(rbs.iter().map(|&rb| linear_to_db(ch.sinr(link, rb))));
        }
        let relaxed = !run.dropped.is_empty();
        Self {
            method,
            objective_bps: a.objective_bps,
            status: a.status,
            feasible: a.status.is_feasible() && !relaxed,
            relaxed,
            dropped_links: run.dropped.clone(),
            served_links: a.served_links(),
            rbs_used: a.total_rbs(),
            sinr_eff_db,
            sinr_rb_db,
            wall_time_s: secs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySummary {
    pub num_links: usize,
    pub active_cues: usize,
    pub mean_link_length_m: f64,
    /// Share of (link, RB) pairs of the fused pool with a positive rate.
    pub usable_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_index: u64,
    pub seed: u64,
    /// One entry per method, in [`Method::ALL`] order.
    pub outcomes: Vec<MethodOutcome>,
    pub summary: TopologySummary,
}

impl TrialResult {
    pub fn outcome(&self, method: Method) -> &MethodOutcome {
        self.outcomes
            .iter()
            .find(|o| o.method == method)
            .expect("every method runs in every trial")
    }

    /// Every method served every link without relaxation.
    pub fn all_feasible(&self) -> bool {
        self.outcomes.iter().all(|o| o.feasible)
    }
}

pub fn limits_of(cfg: &ScenarioConfig) -> Limits {
    Limits {
        l_max: cfg.l_max,
        r_th: cfg.r_th_bps,
    }
}

/// Runs all four methods on trial `trial_index` of `cfg`.
pub fn run_trial(
    cfg: &ScenarioConfig,
    trial_index: u64,
    policy: InfeasibilityPolicy,
) -> Result<TrialResult> {
    let real = realize(cfg, trial_index)?;
    let limits = limits_of(cfg);
    let mut outcomes = Vec::with_capacity(4);
    for method in Method::ALL {
        let start = Instant::now();
        let run = run_method(&real, method, limits, policy)?;
        let secs = start.elapsed().as_secs_f64();
        outcomes.push(MethodOutcome::from_run(method, &run, &real.channel, secs));
    }
    let topo = &real.topology;
    let ch = &real.channel;
    let pairs = (ch.num_links() * ch.num_rbs()).max(1);
    let usable = ch
        .rate_table()
        .iter()
        .flatten()
        .filter(|&&r| r > 0.0)
        .count();
    let summary = TopologySummary {
        num_links: topo.links.len(),
        active_cues: real.schedule.active_cues(),
        mean_link_length_m: if topo.links.is_empty() {
            0.0
        } else {
            topo.links.iter().map(|l| l.length_m()).sum::<f64>() / topo.links.len() as f64
        },
        usable_fraction: usable as f64 / pairs as f64,
    };
    Ok(TrialResult {
        trial_index,
        seed: real.seeds.seed(),
        outcomes,
        summary,
    })
}
