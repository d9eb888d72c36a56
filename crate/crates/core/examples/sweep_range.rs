//! Mean sum-rate against the maximum D2D link range.
//!
//! `cargo run --release --example sweep_range -- [trials]`

use d2dshare::experiment::{sweep_range, Method, RANGES_M};
use d2dshare::model::ScenarioConfig;

fn main() -> d2dshare::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .map_or(200, |s| s.parse().expect("trial count"));
    let cfg = ScenarioConfig::double_pool();
    let result = sweep_range(&cfg, &RANGES_M, trials)?;

    println!("range m   inter-opt  inter-heur   intra-opt  intra-heur  vs intra-heur %");
    for p in &result.points {
        let mbps = |m| p.mean(m) / 1e6;
        println!(
            "{:>7} {:>11.3} {:>11.3} {:>11.3} {:>11.3} {:>16.2}",
            p.value,
            mbps(Method::InterOptimal),
            mbps(Method::InterHeuristic),
            mbps(Method::IntraOptimal),
            mbps(Method::IntraHeuristic),
            p.gain_percent(Method::InterOptimal, Method::IntraHeuristic),
        );
    }
    Ok(())
}
