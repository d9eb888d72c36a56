//! Runs the alternating heuristic on one realized trial and prints its
//! round-by-round trace as CSV.
//!
//! `cargo run --example heuristic_trace -- [seed]`

use d2dshare::experiment::{limits_of, realize};
use d2dshare::heuristics::inter_tenant_heuristic;
use d2dshare::ilp::{build_problem, solve_exact, Scope};
use d2dshare::model::ScenarioConfig;

fn main() -> d2dshare::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .map_or(7, |s| s.parse().expect("seed"));
    let cfg = ScenarioConfig {
        num_d2d_links: 6,
        rng_seed: seed,
        ..ScenarioConfig::double_pool()
    };
    let real = realize(&cfg, 0)?;
    let links: Vec<_> = real.topology.link_ids().collect();
    let p = build_problem(&real.channel, Scope::Fused, &links, limits_of(&cfg))?;

    let (alloc, trace) = inter_tenant_heuristic(&p, |l| real.topology.link(l).receiver);
    trace.write_csv(std::io::stdout().lock())?;
    let (exact, _) = solve_exact(&p);
    eprintln!(
        "heuristic {} {:.3} Mbit/s, exact {} {:.3} Mbit/s",
        alloc.status,
        alloc.objective_bps / 1e6,
        exact.status,
        exact.objective_bps / 1e6
    );
    Ok(())
}
