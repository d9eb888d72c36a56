//! Mean sum-rate against tenant B's load, equal pools, tenant A fully
//! loaded and 20 links.
//!
//! `cargo run --release --example sweep_utilization -- [trials]`

use d2dshare::experiment::{sweep_utilization, Method, UTILIZATIONS};
use d2dshare::model::ScenarioConfig;

fn main() -> d2dshare::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .map_or(200, |s| s.parse().expect("trial count"));
    let cfg = ScenarioConfig::equal_pools();
    let result = sweep_utilization(&cfg, &UTILIZATIONS, trials)?;

    println!("load B   inter-opt  inter-heur   intra-opt  intra-heur  vs intra-opt %");
    for p in &result.points {
        let mbps = |m| p.mean(m) / 1e6;
        println!(
            "{:>6.0}% {:>11.3} {:>11.3} {:>11.3} {:>11.3} {:>15.2}",
            p.value * 100.0,
            mbps(Method::InterOptimal),
            mbps(Method::InterHeuristic),
            mbps(Method::IntraOptimal),
            mbps(Method::IntraHeuristic),
            p.gain_percent(Method::InterOptimal, Method::IntraOptimal),
        );
    }
    Ok(())
}
