//! Per-link SINR distribution of each method, pooled over the link-count
//! sweep, with a few percentiles and a CSV of the full curves.
//!
//! `cargo run --release --example sinr_cdf -- [trials] [out.csv]`

use std::fs::File;

use d2dshare::experiment::{
    pooled_sinr, sinr_cdf, sweep_links, write_cdf_csv, Method, LINK_COUNTS,
};
use d2dshare::model::ScenarioConfig;

fn main() -> d2dshare::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().map_or(200, |s| s.parse().expect("trial count"));
    let result = sweep_links(&ScenarioConfig::double_pool(), &LINK_COUNTS, trials)?;

    let mut cdfs = Vec::new();
    println!(
        "{:<16} {:>8} {:>8} {:>8}",
        "method", "p10 dB", "p50 dB", "p90 dB"
    );
    for m in Method::ALL {
        let cdf = sinr_cdf(&pooled_sinr(&result, m))?;
        println!(
            "{:<16} {:>8.2} {:>8.2} {:>8.2}",
            m.name(),
            cdf.percentile(10.0),
            cdf.median(),
            cdf.percentile(90.0)
        );
        cdfs.push((m, cdf));
    }
    if let Some(path) = args.next() {
        write_cdf_csv(&cdfs, File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
