//! The sum-rate allocation problem: build it over the fused or a
//! tenant-restricted RB pool, solve it exactly, cross-check it by
//! enumeration and verify any allocation against its constraints.
//!
//! Given a rate table `r[i][k]` (0 = unusable pair), pick for each link `i`
//! a set of RBs such that
//!
//! * every link gets between 1 and `l_max` RBs,
//! * no RB goes to more than one link,
//! * no link is given an unusable RB,
//! * every link's summed rate reaches `r_th`,
//!
//! and the total rate is maximal.

mod exact;
mod flow;
mod instance;
mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::model::{LinkId, RbId, TenantId};

pub use exact::{solve_exact, solve_exact_with, SolveOptions, SolveStats};
pub use instance::{parse_instance, read_instance, write_instance, Instance};
pub use oracle::{solve_oracle, ORACLE_MAX_LINKS, ORACLE_MAX_RBS};

/// Relative slack when checking a link's rate against `r_th`, absorbing
/// summation-order differences.
pub const RATE_TOLERANCE: f64 = 1e-9;

/// Sum that is `+0.0` when empty (`Iterator::sum` gives `-0.0`).
pub(crate) fn total(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |a, b| a + b)
}

pub(crate) fn meets_min_rate(rate: f64, r_th: f64) -> bool {
    rate >= r_th - RATE_TOLERANCE * r_th.abs()
}

/// Which RBs a problem may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Every tenant's pool.
    Fused,
    /// One tenant's pool only.
    Tenant(TenantId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub l_max: usize,
    pub r_th: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationProblem {
    pub links: Vec<LinkId>,
    pub rbs: Vec<RbId>,
    /// `rate[i][k]` for `links[i]` on `rbs[k]`, bit/s.
    pub rate: Vec<Vec<f64>>,
    pub l_max: usize,
    pub r_th: f64,
}

impl AllocationProblem {
    pub fn new(
        links: Vec<LinkId>,
        rbs: Vec<RbId>,
        rate: Vec<Vec<f64>>,
        l_max: usize,
        r_th: f64,
    ) -> Result<Self> {
        if rate.len() != links.len() || rate.iter().any(|row| row.len() != rbs.len()) {
            return Err(Error::InvalidConfig(format!(
                "rate matrix does not match {} links x {} RBs",
                links.len(),
                rbs.len()
            )));
        }
        if rate.iter().flatten().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidConfig(
                "rates must be finite and non-negative".into(),
            ));
        }
        if l_max == 0 {
            return Err(Error::InvalidConfig("l_max must be at least 1".into()));
        }
        if r_th.is_nan() || r_th < 0.0 {
            return Err(Error::InvalidConfig("r_th must be non-negative".into()));
        }
        Ok(Self {
            links,
            rbs,
            rate,
            l_max,
            r_th,
        })
    }

    /// Problem over links `0..I` and RBs `0..K` taken straight from a matrix.
    pub fn from_matrix(rate: Vec<Vec<f64>>, l_max: usize, r_th: f64) -> Result<Self> {
        let links = (0..rate.len()).map(LinkId).collect();
        let rbs = (0..rate.first().map_or(0, Vec::len)).map(RbId).collect();
        Self::new(links, rbs, rate, l_max, r_th)
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn num_rbs(&self) -> usize {
        self.rbs.len()
    }

    /// Best single-RB rate of local link `i`.
    pub fn best_rate(&self, i: usize) -> f64 {
        self.rate[i].iter().copied().fold(0.0, f64::max)
    }

    /// The same problem without local link `i`.
    pub fn without_link(&self, i: usize) -> Self {
        let mut p = self.clone();
        p.links.remove(i);
        p.rate.remove(i);
        p
    }

    fn link_index(&self, link: LinkId) -> Option<usize> {
        self.links.iter().position(|&l| l == link)
    }

    fn rb_index(&self, rb: RbId) -> Option<usize> {
        self.rbs.iter().position(|&r| r == rb)
    }
}

/// Restricts the channel's rate table to `links` and the RBs of `scope`.
pub fn build_problem(
    ch: &ChannelRealization,
    scope: Scope,
    links: &[LinkId],
    limits: Limits,
) -> Result<AllocationProblem> {
    let rbs = match scope {
        Scope::Fused => ch.rb_pools.fused(),
        Scope::Tenant(t) => {
            if t.0 >= ch.rb_pools.num_tenants() {
                return Err(Error::Infeasible(format!("no pool for {t}")));
            }
            ch.rb_pools.pool(t).to_vec()
        }
    };
    if rbs.is_empty() {
        return Err(Error::Infeasible("the RB scope is empty".into()));
    }
    let rate = links
        .iter()
        .map(|&l| rbs.iter().map(|&k| ch.rate(l, k)).collect())
        .collect();
    AllocationProblem::new(links.to_vec(), rbs, rate, limits.l_max, limits.r_th)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Proven maximum.
    Optimal,
    /// Satisfies every constraint, optimality not claimed.
    Feasible,
    /// No allocation satisfies the constraints (for heuristics: the partial
    /// allocation returned does not).
    Infeasible,
    /// The solver ran out of node budget; the allocation is the best
    /// incumbent, if any.
    BudgetExceeded,
}

impl Status {
    pub fn is_feasible(self) -> bool {
        matches!(self, Status::Optimal | Status::Feasible)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::BudgetExceeded => "budget-exceeded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    /// RBs of every link in scope, sorted; unserved links map to `[]`.
    pub assigned: BTreeMap<LinkId, Vec<RbId>>,
    pub per_link_rate_bps: BTreeMap<LinkId, f64>,
    pub objective_bps: f64,
    pub status: Status,
}

impl Allocation {
    pub fn empty(status: Status) -> Self {
        Self {
            assigned: BTreeMap::new(),
            per_link_rate_bps: BTreeMap::new(),
            objective_bps: 0.0,
            status,
        }
    }

    /// Builds an allocation from local indices: `picks[i]` lists the local
    /// RB indices of `p.links[i]`.
    pub fn from_local(p: &AllocationProblem, picks: &[Vec<usize>], status: Status) -> Self {
        let mut a = Self::empty(status);
        for (i, ks) in picks.iter().enumerate() {
            let mut rbs: Vec<RbId> = ks.iter().map(|&k| p.rbs[k]).collect();
            rbs.sort();
            let rate = total(ks.iter().map(|&k| p.rate[i][k]));
            a.assigned.insert(p.links[i], rbs);
            a.per_link_rate_bps.insert(p.links[i], rate);
        }
        a.objective_bps = total(a.per_link_rate_bps.values().copied());
        a
    }

    /// Union of allocations over disjoint link sets. Optimal only if every
    /// part is; infeasible if any part is.
    pub fn union<'a>(parts: impl IntoIterator<Item = &'a Allocation>) -> Self {
        let mut out = Self::empty(Status::Optimal);
        for part in parts {
            out.assigned
                .extend(part.assigned.iter().map(|(l, r)| (*l, r.clone())));
            out.per_link_rate_bps.extend(part.per_link_rate_bps.iter());
            out.status = match (out.status, part.status) {
                (Status::Infeasible, _) | (_, Status::Infeasible) => Status::Infeasible,
                (Status::BudgetExceeded, _) | (_, Status::BudgetExceeded) => Status::BudgetExceeded,
                (Status::Optimal, Status::Optimal) => Status::Optimal,
                _ => Status::Feasible,
            };
        }
        out.objective_bps = total(out.per_link_rate_bps.values().copied());
        out
    }

    pub fn rbs_of(&self, link: LinkId) -> &[RbId] {
        self.assigned.get(&link).map_or(&[], Vec::as_slice)
    }

    pub fn served_links(&self) -> usize {
        self.assigned.values().filter(|r| !r.is_empty()).count()
    }

    pub fn total_rbs(&self) -> usize {
        self.assigned.values().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// Summed rate of a link below `r_th`.
    MinRate,
    /// Link without any RB.
    MinRbs,
    /// Link with more than `l_max` RBs.
    MaxRbs,
    /// RB handed to more than one link.
    ExclusiveRb,
    /// Pair whose rate is 0 (SINR threshold or CUE protection).
    Masked,
    /// RB or link outside the problem.
    OutOfScope,
    /// Reported rates do not add up.
    Bookkeeping,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::MinRate => "min-rate",
            Constraint::MinRbs => "min-rbs",
            Constraint::MaxRbs => "max-rbs",
            Constraint::ExclusiveRb => "exclusive-rb",
            Constraint::Masked => "mask",
            Constraint::OutOfScope => "out-of-scope",
            Constraint::Bookkeeping => "bookkeeping",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.constraint, self.detail)
    }
}

/// Lists every way `a` breaks the constraints of `p`. Empty means valid.
pub fn verify(a: &Allocation, p: &AllocationProblem) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |constraint, detail: String| out.push(Violation { constraint, detail });
    let mut owner: BTreeMap<RbId, LinkId> = BTreeMap::new();

    for &link in a.assigned.keys() {
        if p.link_index(link).is_none() {
            push(
                Constraint::OutOfScope,
                format!("{link} is not in the problem"),
            );
        }
    }
    for (i, &link) in p.links.iter().enumerate() {
        let rbs = a.rbs_of(link);
        if rbs.is_empty() {
            push(Constraint::MinRbs, format!("{link} has no RB"));
        }
        if rbs.len() > p.l_max {
            push(
                Constraint::MaxRbs,
                format!("{link} holds {} RBs, limit {}", rbs.len(), p.l_max),
            );
        }
        let mut rate = 0.0;
        for &rb in rbs {
            if let Some(prev) = owner.insert(rb, link) {
                push(
                    Constraint::ExclusiveRb,
                    format!("{rb} given to {prev} and {link}"),
                );
            }
            match p.rb_index(rb) {
                None => push(
                    Constraint::OutOfScope,
                    format!("{rb} of {link} is not in scope"),
                ),
                Some(k) if p.rate[i][k] <= 0.0 => {
                    push(Constraint::Masked, format!("{link} on {rb} is unusable"))
                }
                Some(k) => rate += p.rate[i][k],
            }
        }
        if (!rbs.is_empty() || p.r_th > 0.0) && !meets_min_rate(rate, p.r_th) {
            push(
                Constraint::MinRate,
                format!("{link} reaches {rate} bit/s, needs {}", p.r_th),
            );
        }
        let reported = a.per_link_rate_bps.get(&link).copied().unwrap_or(0.0);
        if (reported - rate).abs() > 1e-9 * rate.abs().max(1.0) {
            push(
                Constraint::Bookkeeping,
                format!("{link} reports {reported} bit/s, table gives {rate}"),
            );
        }
    }
    let sum: f64 = a.per_link_rate_bps.values().sum();
    if (sum - a.objective_bps).abs() > 1e-9 * sum.abs().max(1.0) {
        push(
            Constraint::Bookkeeping,
            format!(
                "objective {} differs from per-link sum {sum}",
                a.objective_bps
            ),
        );
    }
    out
}
