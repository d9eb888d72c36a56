//! Mean sum-rate of the four methods as the number of links grows, with
//! tenant A holding twice tenant B's RBs and both pools fully loaded.
//!
//! `cargo run --release --example sweep_links -- [trials]`

use d2dshare::experiment::{sweep_links, Method, LINK_COUNTS};
use d2dshare::model::ScenarioConfig;

fn main() -> d2dshare::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .map_or(200, |s| s.parse().expect("trial count"));
    let cfg = ScenarioConfig::double_pool();
    let result = sweep_links(&cfg, &LINK_COUNTS, trials)?;

    println!(
        "{:>6} {:>16} {:>16} {:>16} {:>16} {:>9}",
        "links", "inter-opt", "inter-heur", "intra-opt", "intra-heur", "gain %"
    );
    for p in &result.points {
        let mbps = |m| p.mean(m) / 1e6;
        println!(
            "{:>6} {:>16.3} {:>16.3} {:>16.3} {:>16.3} {:>9.2}",
            p.value,
            mbps(Method::InterOptimal),
            mbps(Method::InterHeuristic),
            mbps(Method::IntraOptimal),
            mbps(Method::IntraHeuristic),
            p.gain_percent(Method::InterOptimal, Method::IntraOptimal),
        );
    }
    for p in &result.points {
        let relaxed: Vec<usize> = p.methods.iter().map(|s| s.relaxed_trials).collect();
        println!("links {}: relaxed trials per method {relaxed:?}", p.value);
    }
    Ok(())
}
