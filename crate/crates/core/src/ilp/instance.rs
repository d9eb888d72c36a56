//! Plain-text allocation instances, used for regression fixtures.
//!
//! ```text
//! # comments and blank lines are ignored
//! 2 3 1 0          <- links, RBs, l_max, r_th (bit/s)
//! pools 2 1        <- optional: contiguous per-tenant RB pool sizes
//! 5 4 0            <- one row of rates per link
//! 5 0 0
//! ```
//!
//! Links and RBs are numbered from 0 in file order. With a `pools` line,
//! link `i` is initiated by tenant `i mod N` and received by the next one,
//! as in generated topologies.

use std::fmt::Write as _;
use std::path::Path;

use super::AllocationProblem;
use crate::error::{Error, Result};
use crate::model::{RbPools, TenantId};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub problem: AllocationProblem,
    pub pools: Option<RbPools>,
}

impl Instance {
    /// Tenants as assigned by alternation; two tenants without a `pools` line.
    pub fn num_tenants(&self) -> usize {
        self.pools.as_ref().map_or(2, RbPools::num_tenants)
    }

    pub fn initiator(&self, local_link: usize) -> TenantId {
        TenantId(local_link % self.num_tenants())
    }

    pub fn receiver(&self, local_link: usize) -> TenantId {
        TenantId((local_link + 1) % self.num_tenants())
    }
}

pub fn write_instance(inst: &Instance) -> String {
    let p = &inst.problem;
    let mut s = String::from("# d2dshare allocation instance\n");
    let _ = writeln!(
        s,
        "{} {} {} {}",
        p.num_links(),
        p.num_rbs(),
        p.l_max,
        p.r_th
    );
    if let Some(pools) = &inst.pools {
        let sizes: Vec<String> = (0..pools.num_tenants())
            .map(|t| pools.pool(TenantId(t)).len().to_string())
            .collect();
        let _ = writeln!(s, "pools {}", sizes.join(" "));
    }
    for row in &p.rate {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "{}", cells.join(" "));
    }
    s
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?, path)
}

/// Parses an instance; `path` only labels error messages.
pub fn parse_instance(text: &str, path: &Path) -> Result<Instance> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing header `links rbs l_max r_th`".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(err(
            hline,
            format!("header needs 4 fields, found {}", fields.len()),
        ));
    }
    let count = |s: &str, what: &str| {
        s.parse::<usize>().map_err(|_| {
            err(
                hline,
                format!("{what} must be a non-negative integer, got `{s}`"),
            )
        })
    };
    let num_links = count(fields[0], "link count")?;
    let num_rbs = count(fields[1], "RB count")?;
    let l_max = count(fields[2], "l_max")?;
    let r_th: f64 = fields[3]
        .parse()
        .map_err(|_| err(hline, format!("r_th must be a number, got `{}`", fields[3])))?;

    let mut pools = None;
    let mut rows = Vec::with_capacity(num_links);
    let mut last_line = hline;
    for (n, line) in lines {
        last_line = n;
        if let Some(rest) = line.strip_prefix("pools") {
            if pools.is_some() || !rows.is_empty() {
                return Err(err(n, "`pools` must come right after the header".into()));
            }
            let sizes = rest
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| err(n, "pool sizes must be integers".into()))?;
            if sizes.iter().sum::<usize>() != num_rbs || sizes.len() < 2 {
                return Err(err(
                    n,
                    format!("pools must list at least 2 sizes summing to {num_rbs}"),
                ));
            }
            pools = Some(RbPools::from_sizes(&sizes));
            continue;
        }
        if rows.len() == num_links {
            return Err(err(n, format!("more than {num_links} rate rows")));
        }
        let row = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| err(n, format!("bad rate: {e}")))?;
        if row.len() != num_rbs {
            return Err(err(
                n,
                format!("expected {num_rbs} rates, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != num_links {
        return Err(err(
            last_line,
            format!("expected {num_links} rate rows, found {}", rows.len()),
        ));
    }
    let mut problem =
        AllocationProblem::from_matrix(rows, l_max, r_th).map_err(|e| err(hline, e.to_string()))?;
    if num_links == 0 {
        problem.rbs = (0..num_rbs).map(crate::model::RbId).collect();
    }
    Ok(Instance { problem, pools })
}
