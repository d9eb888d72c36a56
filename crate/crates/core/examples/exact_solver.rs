//! Solves an instance file exactly and compares against the heuristics and,
//! when small enough, the brute-force oracle.
//!
//! `cargo run --example exact_solver -- [instance.txt]`

use d2dshare::heuristics::{inter_tenant_heuristic, single_queue_greedy};
use d2dshare::ilp::{read_instance, solve_exact, solve_oracle, verify, Instance};

fn main() -> d2dshare::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures/instances/three_by_five.txt"
        )
        .into()
    });
    let inst: Instance = read_instance(path.as_ref())?;
    let p = &inst.problem;
    println!(
        "{} links, {} RBs, l_max {}, r_th {} bit/s",
        p.num_links(),
        p.num_rbs(),
        p.l_max,
        p.r_th
    );

    let (exact, stats) = solve_exact(p);
    println!(
        "exact: {} {:.0} bit/s after {} nodes in {:.3} ms",
        exact.status,
        exact.objective_bps,
        stats.nodes_explored,
        stats.wall_time_s * 1e3
    );
    for (link, rbs) in &exact.assigned {
        let ids: Vec<usize> = rbs.iter().map(|r| r.0).collect();
        println!("  link {} -> RBs {ids:?}", link.0);
    }
    assert!(!exact.status.is_feasible() || verify(&exact, p).is_empty());

    match solve_oracle(p) {
        Ok(o) => println!("oracle: {} {:.0} bit/s", o.status, o.objective_bps),
        Err(e) => println!("oracle skipped: {e}"),
    }
    let (alt, _) = inter_tenant_heuristic(p, |l| inst.receiver(l.0));
    let (greedy, _) = single_queue_greedy(p);
    println!(
        "alternating heuristic: {} {:.0} bit/s",
        alt.status, alt.objective_bps
    );
    println!(
        "single-queue greedy: {} {:.0} bit/s",
        greedy.status, greedy.objective_bps
    );
    Ok(())
}
