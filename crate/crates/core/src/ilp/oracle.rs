//! Brute-force reference solver for small instances.
//!
//! Links are taken in order; each one tries every subset of 1..=`l_max`
//! free, usable RBs that reaches `r_th`, and the rest of the links are
//! solved on what is left. The best value for (next link, RBs used) is
//! memoized, which keeps the search exhaustive while visiting each state
//! once. Nothing here shares code with the exact solver.

use std::collections::HashMap;

use super::{meets_min_rate, Allocation, AllocationProblem, Status};
use crate::error::{Error, Result};

pub const ORACLE_MAX_LINKS: usize = 5;
pub const ORACLE_MAX_RBS: usize = 10;

struct Search<'a> {
    p: &'a AllocationProblem,
    /// Per link, every admissible RB subset as (mask, rate).
    options: Vec<Vec<(u32, f64)>>,
    /// Best total of links `i..` given RBs `used`, with the subset chosen
    /// for link `i`; `None` when nothing fits.
    memo: HashMap<(usize, u32), Option<(f64, u32)>>,
}

impl Search<'_> {
    fn best(&mut self, i: usize, used: u32) -> Option<(f64, u32)> {
        if i == self.p.num_links() {
            return Some((0.0, 0));
        }
        if let Some(&v) = self.memo.get(&(i, used)) {
            return v;
        }
        let mut best: Option<(f64, u32)> = None;
        for j in 0..self.options[i].len() {
            let (mask, rate) = self.options[i][j];
            if mask & used != 0 {
                continue;
            }
            if let Some((rest, _)) = self.best(i + 1, used | mask) {
                let total = rate + rest;
                if best.is_none_or(|(b, _)| total > b) {
                    best = Some((total, mask));
                }
            }
        }
        self.memo.insert((i, used), best);
        best
    }
}

fn subsets(p: &AllocationProblem, i: usize) -> Vec<(u32, f64)> {
    let usable: Vec<usize> = (0..p.num_rbs()).filter(|&k| p.rate[i][k] > 0.0).collect();
    let mut out = Vec::new();
    for bits in 1u32..(1 << usable.len()) {
        if bits.count_ones() as usize > p.l_max {
            continue;
        }
        let mut mask = 0;
        let mut rate = 0.0;
        for (j, &k) in usable.iter().enumerate() {
            if bits & (1 << j) != 0 {
                mask |= 1 << k;
                rate += p.rate[i][k];
            }
        }
        if meets_min_rate(rate, p.r_th) {
            out.push((mask, rate));
        }
    }
    out
}

/// Exhaustive optimum, or [`Status::Infeasible`] if nothing satisfies the
/// constraints. Refuses problems above 5 links or 10 RBs.
pub fn solve_oracle(p: &AllocationProblem) -> Result<Allocation> {
    if p.num_links() > ORACLE_MAX_LINKS || p.num_rbs() > ORACLE_MAX_RBS {
        return Err(Error::OracleGuard {
            links: p.num_links(),
            rbs: p.num_rbs(),
        });
    }
    let options = (0..p.num_links()).map(|i| subsets(p, i)).collect();
    let mut s = Search {
        p,
        options,
        memo: HashMap::new(),
    };
    if s.best(0, 0).is_none() {
        return Ok(Allocation::empty(Status::Infeasible));
    }
    let mut picks = Vec::with_capacity(p.num_links());
    let mut used = 0;
    for i in 0..p.num_links() {
        let (_, mask) = s.best(i, used).expect("a feasible completion was memoized");
        picks.push((0..p.num_rbs()).filter(|&k| mask & (1 << k) != 0).collect());
        used |= mask;
    }
    Ok(Allocation::from_local(p, &picks, Status::Optimal))
}
