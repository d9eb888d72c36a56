//! Draws one trial's cell: CUE and D2D positions, the CUE schedule and how
//! many link/RB pairs survive the SINR thresholds.
//!
//! `cargo run --example topology -- [seed]`

use d2dshare::channel::build_rate_table;
use d2dshare::model::{generate_topology, ScenarioConfig, SeedStreams, TenantId};
use d2dshare::scheduler::schedule_cues;

fn main() -> d2dshare::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .map_or(1, |s| s.parse().expect("seed"));
    let cfg = ScenarioConfig {
        num_d2d_links: 8,
        ..ScenarioConfig::double_pool()
    };
    let seeds = SeedStreams::for_trial(seed, 0);
    let topo = generate_topology(&cfg, &seeds)?;
    let schedule = schedule_cues(&topo, &cfg, 0)?;
    let ch = build_rate_table(&topo, &schedule, &cfg, &seeds)?;

    for n in 0..cfg.num_tenants {
        let t = TenantId(n);
        println!(
            "tenant {}: {} CUEs, {} RBs, {} links initiated",
            t.label(),
            topo.cues_of(t).count(),
            topo.rb_pools.pool(t).len(),
            topo.links_initiated_by(t).len()
        );
    }
    println!("active CUEs: {}", schedule.active_cues());
    println!(
        "{:>4} {:>16} {:>16} {:>8} {:>5} {:>7}",
        "link", "tx (m)", "rx (m)", "len (m)", "route", "usable"
    );
    for l in topo.link_ids() {
        let link = topo.link(l);
        let usable = ch.rate_table()[l.0].iter().filter(|&&r| r > 0.0).count();
        println!(
            "{:>4} {:>16} {:>16} {:>8.1} {:>5} {:>4}/{}",
            l.0,
            format!("({:.0}, {:.0})", link.tx.x, link.tx.y),
            format!("({:.0}, {:.0})", link.rx.x, link.rx.y),
            link.length_m(),
            format!("{}>{}", link.initiator.label(), link.receiver.label()),
            usable,
            ch.num_rbs()
        );
    }
    Ok(())
}
