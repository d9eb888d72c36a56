//! Greedy round-based allocators and the per-tenant baselines.
//!
//! The greedy works in rounds. In each round every link that is below
//! `l_max` takes the best RB still free for it (highest rate, lowest id on
//! ties), one RB per link per round. It stops when the pool is used up,
//! every link is at `l_max`, or no remaining link has a usable free RB.
//! The minimum rate is only checked once it stops.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::Result;
use crate::ilp::{
    build_problem, meets_min_rate, solve_exact, Allocation, AllocationProblem, Limits, Scope,
    Status,
};
use crate::model::{LinkId, RbId, TenantId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    /// Every free RB is masked for this link.
    NoCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pick {
    Rb(RbId),
    Skipped(SkipReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    PoolExhausted,
    AllAtLmax,
    SinrBlocked,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::PoolExhausted => "pool-exhausted",
            Termination::AllAtLmax => "all-at-lmax",
            Termination::SinrBlocked => "sinr-blocked",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: usize,
    pub link: LinkId,
    pub pick: Pick,
}

/// What the greedy did, in order. A blocked link is logged once and then
/// left out of later rounds, since the free pool only shrinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicTrace {
    pub entries: Vec<TraceEntry>,
    pub termination: Termination,
}

impl HeuristicTrace {
    pub fn picks(&self) -> impl Iterator<Item = (LinkId, RbId)> + '_ {
        self.entries.iter().filter_map(|e| match e.pick {
            Pick::Rb(rb) => Some((e.link, rb)),
            Pick::Skipped(_) => None,
        })
    }

    /// Columns `round,link,rb,skip_reason`, then a `# termination` line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["round", "link", "rb", "skip_reason"])?;
        for e in &self.entries {
            let (rb, skip) = match e.pick {
                Pick::Rb(rb) => (rb.0.to_string(), String::new()),
                Pick::Skipped(SkipReason::NoCandidate) => (String::new(), "no-candidate".into()),
            };
            w.write_record([e.round.to_string(), e.link.0.to_string(), rb, skip])?;
        }
        let mut out = w.into_inner().map_err(|e| e.into_error())?;
        writeln!(out, "# termination={}", self.termination)?;
        Ok(())
    }
}

/// Runs the rounds over local link indices in the fixed `order`.
fn greedy_rounds(p: &AllocationProblem, order: &[usize]) -> (Allocation, HeuristicTrace) {
    let (n, k) = (p.num_links(), p.num_rbs());
    let mut free = vec![true; k];
    let mut free_count = k;
    let mut picks: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut blocked = vec![false; n];
    let mut entries = Vec::new();

    let mut round = 0;
    let termination = 'rounds: loop {
        round += 1;
        let mut progressed = false;
        for &i in order {
            if free_count == 0 {
                break 'rounds Termination::PoolExhausted;
            }
            if blocked[i] || picks[i].len() >= p.l_max {
                continue;
            }
            // strict `>` keeps the lowest RB id on ties
            let mut best: Option<usize> = None;
            for rb in 0..k {
                let better = best.is_none_or(|b| p.rate[i][rb] > p.rate[i][b]);
                if free[rb] && p.rate[i][rb] > 0.0 && better {
                    best = Some(rb);
                }
            }
            let link = p.links[i];
            match best {
                Some(rb) => {
                    free[rb] = false;
                    free_count -= 1;
                    picks[i].push(rb);
                    progressed = true;
                    entries.push(TraceEntry {
                        round,
                        link,
                        pick: Pick::Rb(p.rbs[rb]),
                    });
                }
                None => {
                    blocked[i] = true;
                    entries.push(TraceEntry {
                        round,
                        link,
                        pick: Pick::Skipped(SkipReason::NoCandidate),
                    });
                }
            }
        }
        if free_count == 0 {
            break Termination::PoolExhausted;
        }
        if picks.iter().all(|r| r.len() >= p.l_max) {
            break Termination::AllAtLmax;
        }
        if !progressed {
            break Termination::SinrBlocked;
        }
    };

    let feasible = (0..n).all(|i| {
        let rate: f64 = picks[i].iter().map(|&rb| p.rate[i][rb]).sum();
        !picks[i].is_empty() && meets_min_rate(rate, p.r_th)
    });
    let status = if feasible {
        Status::Feasible
    } else {
        Status::Infeasible
    };
    (
        Allocation::from_local(p, &picks, status),
        HeuristicTrace {
            entries,
            termination,
        },
    )
}

/// Greedy with one queue in link order.
pub fn single_queue_greedy(p: &AllocationProblem) -> (Allocation, HeuristicTrace) {
    let order: Vec<usize> = (0..p.num_links()).collect();
    greedy_rounds(p, &order)
}

/// The inter-tenant greedy over the fused pool.
///
/// Links are queued by receiver tenant in link order, and a round visits
/// the queues in turn (A, B, A, B, ...). Once a queue runs dry the turn
/// passes to the next queue that still has links.
pub fn inter_tenant_heuristic(
    p: &AllocationProblem,
    receiver: impl Fn(LinkId) -> TenantId,
) -> (Allocation, HeuristicTrace) {
    let mut queues: Vec<Vec<usize>> = Vec::new();
    for (i, &link) in p.links.iter().enumerate() {
        let t = receiver(link).0;
        if queues.len() <= t {
            queues.resize(t + 1, Vec::new());
        }
        queues[t].push(i);
    }
    let mut heads = vec![0; queues.len()];
    let mut order = Vec::with_capacity(p.num_links());
    let mut turn = 0;
    while order.len() < p.num_links() {
        let q = (0..queues.len())
            .map(|s| (turn + s) % queues.len())
            .find(|&q| heads[q] < queues[q].len())
            .expect("some queue still holds links");
        order.push(queues[q][heads[q]]);
        heads[q] += 1;
        turn = (turn + 1) % queues.len();
    }
    greedy_rounds(p, &order)
}

/// One problem per tenant: the links it initiated over its own pool.
/// Tenants without links are left out.
pub fn tenant_problems(
    ch: &ChannelRealization,
    links: &[LinkId],
    initiator: impl Fn(LinkId) -> TenantId,
    limits: Limits,
) -> Result<Vec<(TenantId, AllocationProblem)>> {
    let mut out = Vec::new();
    for t in (0..ch.rb_pools.num_tenants()).map(TenantId) {
        let own: Vec<LinkId> = links
            .iter()
            .copied()
            .filter(|&l| initiator(l) == t)
            .collect();
        if !own.is_empty() {
            out.push((t, build_problem(ch, Scope::Tenant(t), &own, limits)?));
        }
    }
    Ok(out)
}

/// Each tenant solves its own problem exactly; the union is returned along
/// with the per-tenant parts.
pub fn intra_tenant_optimal(
    ch: &ChannelRealization,
    links: &[LinkId],
    initiator: impl Fn(LinkId) -> TenantId,
    limits: Limits,
) -> Result<(Allocation, Vec<(TenantId, Allocation)>)> {
    let parts: Vec<(TenantId, Allocation)> = tenant_problems(ch, links, initiator, limits)?
        .iter()
        .map(|(t, p)| (*t, solve_exact(p).0))
        .collect();
    Ok((Allocation::union(parts.iter().map(|(_, a)| a)), parts))
}

/// Each tenant runs the single-queue greedy on its own pool.
pub fn intra_tenant_heuristic(
    ch: &ChannelRealization,
    links: &[LinkId],
    initiator: impl Fn(LinkId) -> TenantId,
    limits: Limits,
) -> Result<(Allocation, Vec<(TenantId, Allocation)>)> {
    let parts: Vec<(TenantId, Allocation)> = tenant_problems(ch, links, initiator, limits)?
        .iter()
        .map(|(t, p)| (*t, single_queue_greedy(p).0))
        .collect();
    let mut union = Allocation::union(parts.iter().map(|(_, a)| a));
    if union.status == Status::Optimal {
        union.status = Status::Feasible;
    }
    Ok((union, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::{solve_oracle, verify};

    fn problem(rate: Vec<Vec<f64>>, l_max: usize) -> AllocationProblem {
        AllocationProblem::from_matrix(rate, l_max, 0.0).unwrap()
    }

    fn rb_picks(t: &HeuristicTrace) -> Vec<(usize, usize)> {
        t.picks().map(|(l, r)| (l.0, r.0)).collect()
    }

    #[test]
    fn coincides_with_optimum_on_diagonal_matrix() {
        let p = problem(vec![vec![5.0, 1.0], vec![1.0, 4.0]], 1);
        let (a, t) = inter_tenant_heuristic(&p, |l| TenantId(l.0 % 2));
        assert_eq!(a.objective_bps, 9.0);
        assert_eq!(a.status, Status::Feasible);
        assert_eq!(a.objective_bps, solve_oracle(&p).unwrap().objective_bps);
        assert_eq!(t.termination, Termination::PoolExhausted);
    }

    #[test]
    fn greedy_strictly_below_optimum() {
        // link 0 takes RB 0; link 1 can only use RB 0 and is left empty
        let p = problem(vec![vec![5.0, 4.0, 0.0], vec![5.0, 0.0, 0.0]], 1);
        let (a, t) = inter_tenant_heuristic(&p, |l| TenantId(l.0));
        assert_eq!(rb_picks(&t), vec![(0, 0)]);
        assert_eq!(t.entries[1].pick, Pick::Skipped(SkipReason::NoCandidate));
        assert_eq!(a.status, Status::Infeasible);
        assert_eq!(a.objective_bps, 5.0);
        assert_eq!(t.termination, Termination::SinrBlocked);
        assert_eq!(solve_oracle(&p).unwrap().objective_bps, 9.0);
    }

    #[test]
    fn single_link_takes_top_k() {
        let p = problem(vec![vec![3.0, 7.0, 2.0]], 2);
        let (a, t) = inter_tenant_heuristic(&p, |_| TenantId(1));
        assert_eq!(rb_picks(&t), vec![(0, 1), (0, 0)]);
        assert_eq!(a.objective_bps, 10.0);
        assert_eq!(t.termination, Termination::AllAtLmax);
    }

    #[test]
    fn ties_go_to_lowest_rb() {
        let p = problem(vec![vec![2.0, 3.0, 3.0]], 1);
        let (_, t) = single_queue_greedy(&p);
        assert_eq!(rb_picks(&t), vec![(0, 1)]);
    }

    #[test]
    fn alternation_falls_through() {
        // receivers A, A, A, B: visit order is 0 (A), 3 (B), 1 (A), 2 (A)
        let p = problem(vec![vec![1.0; 4]; 4], 1);
        let recv = [0, 0, 0, 1];
        let (_, t) = inter_tenant_heuristic(&p, |l| TenantId(recv[l.0]));
        assert_eq!(rb_picks(&t), vec![(0, 0), (3, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn hand_traced_three_by_five() {
        // round 1: L0 -> RB1 (9), L1 -> RB0 (8; RB1 gone), L2 -> RB3 (4)
        // round 2: L0 -> RB4 (6), L1 -> RB2 (2), then the pool is empty
        let p = problem(
            vec![
                vec![7.0, 9.0, 1.0, 0.0, 6.0],
                vec![8.0, 8.0, 2.0, 0.0, 0.0],
                vec![0.0, 5.0, 0.0, 4.0, 0.0],
            ],
            2,
        );
        let (a, t) = single_queue_greedy(&p);
        assert_eq!(rb_picks(&t), vec![(0, 1), (1, 0), (2, 3), (0, 4), (1, 2)]);
        assert_eq!(a.objective_bps, 29.0);
        assert_eq!(t.termination, Termination::PoolExhausted);
        assert!(verify(&a, &p).is_empty());
        // the optimum is the same here: 9+6, 8+2, 4 and nothing better exists
        assert_eq!(solve_oracle(&p).unwrap().objective_bps, 29.0);
    }

    #[test]
    fn min_rate_checked_at_the_end() {
        let mut p = problem(vec![vec![3.0, 2.0], vec![1.0, 0.0]], 2);
        p.r_th = 2.5;
        let (a, _) = single_queue_greedy(&p);
        assert_eq!(a.status, Status::Infeasible);
        assert!(a.rbs_of(LinkId(1)).is_empty());
    }

    #[test]
    fn trace_csv_shape() {
        let p = problem(vec![vec![5.0, 4.0, 0.0], vec![5.0, 0.0, 0.0]], 1);
        let (_, t) = single_queue_greedy(&p);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "round,link,rb,skip_reason\n1,0,0,\n1,1,,no-candidate\n# termination=sinr-blocked\n"
        );
    }

    #[test]
    fn empty_problem() {
        let p = AllocationProblem::new(vec![], vec![RbId(0)], vec![], 1, 0.0).unwrap();
        let (a, t) = single_queue_greedy(&p);
        assert_eq!(a.status, Status::Feasible);
        assert_eq!(t.termination, Termination::AllAtLmax);
    }
}
