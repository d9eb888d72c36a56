//! Exact solver: depth-first branch-and-bound over (link, RB) fixings.
//!
//! Each node fixes some pairs in and some out. Its bound is the fixed rate
//! plus the optimum of the remaining problem with the minimum-rate
//! constraint dropped, which a max-weight b-matching solves exactly (see
//! [`super::flow`]). If that matching happens to meet every link's
//! minimum rate it is optimal for the node and becomes an incumbent;
//! otherwise the solver picks a link below its minimum and branches on one
//! of its RBs: fixed in on one side, fixed out on the other.
//!
//! With `r_th` no larger than the smallest usable rate the root matching
//! already solves the problem.
//!
//! RBs with identical rate columns (every idle RB, on a frequency-flat
//! channel) are interchangeable. Branching treats them as a class: the
//! fix-in side takes the lowest free member and the fix-out side excludes
//! the whole class for that link, so equivalent assignments are not
//! enumerated twice.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::flow::max_weight_b_matching;
use super::{meets_min_rate, Allocation, AllocationProblem, Status};
use crate::heuristics::single_queue_greedy;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Stop after this many nodes and report [`Status::BudgetExceeded`].
    pub node_budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes_explored: u64,
    pub wall_time_s: f64,
    /// `(best open bound - incumbent) / incumbent` at termination; 0 when
    /// the search completed.
    pub bound_gap: f64,
}

#[derive(Clone)]
struct Node {
    fixed_in: Vec<Vec<usize>>,
    /// `fixed_out[i][k]`: link `i` may not use RB `k`.
    fixed_out: Vec<Vec<bool>>,
}

enum Evaluation {
    Pruned,
    /// Relaxation satisfies every constraint.
    Leaf {
        objective: f64,
        picks: Vec<Vec<usize>>,
    },
    Branch {
        bound: f64,
        link: usize,
        rb: usize,
    },
}

struct Search<'a> {
    p: &'a AllocationProblem,
    /// Lowest RB index with the same rate column, per RB.
    class: Vec<usize>,
    best: Option<(f64, Vec<Vec<usize>>)>,
    nodes: u64,
}

impl Search<'_> {
    fn incumbent(&self) -> f64 {
        self.best.as_ref().map_or(f64::NEG_INFINITY, |b| b.0)
    }

    fn prunes(&self, bound: f64) -> bool {
        let inc = self.incumbent();
        bound <= inc + 1e-12 * inc.abs()
    }

    fn evaluate(&self, node: &Node) -> Evaluation {
        let p = self.p;
        let (n, k) = (p.num_links(), p.num_rbs());
        let mut taken = vec![false; k];
        for &rb in node.fixed_in.iter().flatten() {
            taken[rb] = true;
        }
        let available =
            |i: usize, rb: usize| !taken[rb] && !node.fixed_out[i][rb] && p.rate[i][rb] > 0.0;

        let mut cap = vec![0; n];
        let mut need = vec![false; n];
        let mut fixed_rate = vec![0.0; n];
        // fewest extra RBs each link needs to reach its minimum
        let mut demand = vec![0; n];
        for i in 0..n {
            fixed_rate[i] = node.fixed_in[i].iter().map(|&rb| p.rate[i][rb]).sum();
            cap[i] = p.l_max - node.fixed_in[i].len();
            need[i] = node.fixed_in[i].is_empty();
            // can this link still reach its minimum at all?
            let mut options: Vec<f64> = (0..k)
                .filter(|&rb| available(i, rb))
                .map(|rb| p.rate[i][rb])
                .collect();
            if need[i] && options.is_empty() {
                return Evaluation::Pruned;
            }
            options.sort_by(|a, b| b.total_cmp(a));
            let reachable: f64 = fixed_rate[i] + options.iter().take(cap[i]).sum::<f64>();
            if !meets_min_rate(reachable, p.r_th) {
                return Evaluation::Pruned;
            }
            let mut acc = fixed_rate[i];
            while demand[i] < options.len()
                && (!meets_min_rate(acc, p.r_th) || (need[i] && demand[i] == 0))
            {
                acc += options[demand[i]];
                demand[i] += 1;
            }
        }

        // the demands must fit on distinct free RBs simultaneously
        if demand.iter().any(|&d| d > 1) {
            let ones = vec![vec![1.0; k]; n];
            let fit = max_weight_b_matching(&ones, k, &demand, &vec![false; n], available);
            if fit.picks.iter().map(Vec::len).sum::<usize>() < demand.iter().sum::<usize>() {
                return Evaluation::Pruned;
            }
        }

        let m = max_weight_b_matching(&p.rate, k, &cap, &need, available);
        if m.covered < need.iter().filter(|&&x| x).count() {
            return Evaluation::Pruned;
        }
        let bound = fixed_rate.iter().sum::<f64>() + m.rate;
        if self.prunes(bound) {
            return Evaluation::Pruned;
        }

        // first link whose relaxed allocation misses r_th, largest deficit wins
        let mut worst: Option<(usize, f64)> = None;
        for i in 0..n {
            let r = fixed_rate[i] + m.picks[i].iter().map(|&rb| p.rate[i][rb]).sum::<f64>();
            if !meets_min_rate(r, p.r_th) {
                let deficit = p.r_th - r;
                if worst.is_none_or(|(_, d)| deficit > d) {
                    worst = Some((i, deficit));
                }
            }
        }
        let Some((link, _)) = worst else {
            let picks = (0..n)
                .map(|i| {
                    node.fixed_in[i]
                        .iter()
                        .chain(&m.picks[i])
                        .copied()
                        .collect()
                })
                .collect();
            return Evaluation::Leaf {
                objective: bound,
                picks,
            };
        };

        // branch on the link's best relaxed RB, or its best free RB when the
        // matching gave it nothing beyond the fixed ones
        let best_of = |cands: &mut dyn Iterator<Item = usize>| {
            cands.max_by(|&a, &b| p.rate[link][a].total_cmp(&p.rate[link][b]).then(b.cmp(&a)))
        };
        let rb = best_of(&mut m.picks[link].iter().copied())
            .or_else(|| best_of(&mut (0..k).filter(|&rb| available(link, rb))))
            .expect("a link that can reach r_th has a free usable RB");
        let rb = (0..k)
            .find(|&j| self.class[j] == self.class[rb] && available(link, j))
            .expect("rb itself qualifies");
        Evaluation::Branch { bound, link, rb }
    }
}

pub fn solve_exact(p: &AllocationProblem) -> (Allocation, SolveStats) {
    solve_exact_with(p, SolveOptions::default())
}

pub fn solve_exact_with(p: &AllocationProblem, opts: SolveOptions) -> (Allocation, SolveStats) {
    let start = Instant::now();
    let class = (0..p.num_rbs())
        .map(|k| {
            (0..k)
                .find(|&j| p.rate.iter().all(|row| row[j] == row[k]))
                .unwrap_or(k)
        })
        .collect();
    let mut search = Search {
        p,
        class,
        best: None,
        nodes: 0,
    };

    let (warm, _) = single_queue_greedy(p);
    if warm.status.is_feasible() {
        let picks = p
            .links
            .iter()
            .map(|l| {
                warm.rbs_of(*l)
                    .iter()
                    .map(|rb| {
                        p.rbs
                            .iter()
                            .position(|r| r == rb)
                            .expect("greedy stays in scope")
                    })
                    .collect()
            })
            .collect();
        search.best = Some((warm.objective_bps, picks));
    }

    let root = Node {
        fixed_in: vec![Vec::new(); p.num_links()],
        fixed_out: vec![vec![false; p.num_rbs()]; p.num_links()],
    };
    // stack entries carry the parent's bound for gap reporting
    let mut stack = vec![(root, f64::INFINITY)];
    let mut exhausted = true;
    while let Some((node, parent_bound)) = stack.pop() {
        if search.prunes(parent_bound) {
            continue;
        }
        if opts.node_budget.is_some_and(|b| search.nodes >= b) {
            stack.push((node, parent_bound));
            exhausted = false;
            break;
        }
        search.nodes += 1;
        match search.evaluate(&node) {
            Evaluation::Pruned => {}
            Evaluation::Leaf { objective, picks } => {
                if objective > search.incumbent() {
                    search.best = Some((objective, picks));
                }
            }
            Evaluation::Branch { bound, link, rb } => {
                let mut out = node.clone();
                for (j, &c) in search.class.iter().enumerate() {
                    if c == search.class[rb] {
                        out.fixed_out[link][j] = true;
                    }
                }
                let mut inn = node;
                inn.fixed_in[link].push(rb);
                stack.push((out, bound));
                stack.push((inn, bound));
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let (status, gap) = if exhausted {
        (Status::Optimal, 0.0)
    } else {
        let open = stack.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let inc = search.incumbent();
        let gap = if inc > 0.0 {
            (open - inc) / inc
        } else {
            f64::INFINITY
        };
        (Status::BudgetExceeded, gap)
    };
    let stats = SolveStats {
        nodes_explored: search.nodes,
        wall_time_s: elapsed,
        bound_gap: gap,
    };

    let alloc = match search.best {
        Some((_, picks)) => Allocation::from_local(p, &picks, status),
        None if exhausted => Allocation::empty(Status::Infeasible),
        None => Allocation::empty(Status::BudgetExceeded),
    };
    // no links: the empty allocation is optimal
    if p.num_links() == 0 {
        return (Allocation::empty(Status::Optimal), stats);
    }
    (alloc, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::verify;

    fn solve(rate: Vec<Vec<f64>>, l_max: usize, r_th: f64) -> Allocation {
        let p = AllocationProblem::from_matrix(rate, l_max, r_th).unwrap();
        let (a, stats) = solve_exact(&p);
        if a.status == Status::Optimal {
            assert!(verify(&a, &p).is_empty(), "{:?}", verify(&a, &p));
            assert_eq!(stats.bound_gap, 0.0);
        }
        a
    }

    #[test]
    fn two_by_two() {
        let a = solve(vec![vec![5.0, 1.0], vec![1.0, 4.0]], 1, 0.0);
        assert_eq!(a.objective_bps, 9.0);
        assert_eq!(a.rbs_of(crate::model::LinkId(0)), &[crate::model::RbId(0)]);
    }

    #[test]
    fn symmetric_rows() {
        assert_eq!(
            solve(vec![vec![5.0, 4.0], vec![5.0, 4.0]], 1, 0.0).objective_bps,
            9.0
        );
    }

    #[test]
    fn dead_row_is_infeasible() {
        assert_eq!(
            solve(vec![vec![5.0, 4.0], vec![0.0, 0.0]], 1, 0.0).status,
            Status::Infeasible
        );
    }

    #[test]
    fn single_link_top_k() {
        let a = solve(vec![vec![3.0, 7.0, 2.0]], 2, 0.0);
        assert_eq!(a.objective_bps, 10.0);
    }

    #[test]
    fn min_rate_forces_branching() {
        // unconstrained optimum gives link 1 only RB 2 (rate 1); r_th = 4
        // forces link 1 onto RBs 0 and 2 or 1 and 2
        let a = solve(vec![vec![9.0, 8.0, 0.0], vec![3.0, 3.0, 1.0]], 2, 4.0);
        assert_eq!(a.status, Status::Optimal);
        assert_eq!(a.objective_bps, 13.0);
    }

    #[test]
    fn unreachable_min_rate_is_infeasible() {
        let a = solve(vec![vec![1.0, 1.0]], 1, 5.0);
        assert_eq!(a.status, Status::Infeasible);
    }

    #[test]
    fn empty_link_set() {
        let p =
            AllocationProblem::new(vec![], vec![crate::model::RbId(0)], vec![], 1, 0.0).unwrap();
        let (a, _) = solve_exact(&p);
        assert_eq!(a.status, Status::Optimal);
        assert_eq!(a.objective_bps, 0.0);
    }

    #[test]
    fn budget_is_reported() {
        let p =
            AllocationProblem::from_matrix(vec![vec![9.0, 8.0, 0.0], vec![3.0, 3.0, 1.0]], 2, 4.0)
                .unwrap();
        let (a, stats) = solve_exact_with(
            &p,
            SolveOptions {
                node_budget: Some(1),
            },
        );
        assert_eq!(a.status, Status::BudgetExceeded);
        assert_eq!(stats.nodes_explored, 1);
    }
}
