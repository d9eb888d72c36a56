//! Acceptance suite. Runs as a plain binary and prints one PASS/FAIL line
//! per criterion; the process fails if any criterion fails.
//!
//! `cargo test --release --test acceptance`

#![allow(clippy::excessive_precision)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use d2dshare::channel::{
    link_gain, noise_power_w, path_loss_cue_db, path_loss_d2d_db, shannon_rate, ChannelRealization,
    Gains, RadioParams,
};
use d2dshare::experiment::{
    pooled_sinr, realize, run_method, run_trial, sinr_cdf, sweep_links, sweep_range,
    sweep_utilization, write_sweep_csv, write_trial_csv, InfeasibilityPolicy, Method, SweepResult,
    TrialResult, LINK_COUNTS, RANGES_M, UTILIZATIONS,
};
use d2dshare::ilp::{
    build_problem, solve_exact, solve_oracle, verify, AllocationProblem, Limits, Scope,
};
use d2dshare::model::{CueId, LinkId, RbId, RbPools, ScenarioConfig};
use d2dshare::scheduler::CueSchedule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIALS: usize = 200;
const REL: f64 = 1e-9;

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL * a.abs().max(b.abs())
}

/// `a >= b` up to the relative tolerance.
fn at_least(a: f64, b: f64) -> bool {
    a >= b - REL * a.abs().max(b.abs())
}

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {id}. {name}: {detail}");
        if !ok {
            self.failures += 1;
        }
    }
}

fn random_problem(rng: &mut ChaCha8Rng) -> AllocationProblem {
    let links = rng.random_range(1..=5);
    let rbs = rng.random_range(1..=10);
    let rate = (0..links)
        .map(|_| {
            (0..rbs)
                .map(|_| {
                    if rng.random_bool(0.3) {
                        0.0
                    } else {
                        rng.random_range(1e4..2e6)
                    }
                })
                .collect()
        })
        .collect();
    let l_max = rng.random_range(1..=3);
    let r_th = if rng.random_bool(0.5) {
        0.0
    } else {
        rng.random_range(1e5..2e6)
    };
    AllocationProblem::from_matrix(rate, l_max, r_th).expect("well-formed matrix")
}

fn oracle_equivalence(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let n = 2000;
    let start = Instant::now();
    let mut mismatches = 0;
    let mut feasible = 0;
    for _ in 0..n {
        let p = random_problem(&mut rng);
        let (exact, _) = solve_exact(&p);
        let oracle = solve_oracle(&p).expect("instance within the guard");
        let same_status = exact.status.is_feasible() == oracle.status.is_feasible();
        let same_value =
            !oracle.status.is_feasible() || rel_close(exact.objective_bps, oracle.objective_bps);
        if !(same_status && same_value) {
            mismatches += 1;
        }
        feasible += usize::from(oracle.status.is_feasible());
    }
    let secs = start.elapsed().as_secs_f64();
    r.check(
        1,
        "oracle equivalence",
        mismatches == 0 && secs <= 60.0,
        format!("{n} instances ({feasible} feasible), {mismatches} mismatches, {secs:.2} s"),
    );
}

fn fuzz_config(rng: &mut ChaCha8Rng, seed: u64) -> ScenarioConfig {
    let base = if rng.random_bool(0.5) {
        ScenarioConfig::double_pool()
    } else {
        ScenarioConfig::equal_pools()
    };
    ScenarioConfig {
        num_d2d_links: rng.random_range(1..=24),
        cue_utilization: vec![rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0)],
        max_d2d_range_m: rng.random_range(10.0..=150.0),
        l_max: rng.random_range(1..=4),
        r_th_bps: [180e3, 400e3, 1e6][rng.random_range(0..3)],
        rng_seed: seed,
        ..base
    }
}

/// Criterion 2 on fuzzed scenarios; returns the trials for the dominance
/// check.
fn constraint_verification(r: &mut Report) -> Vec<TrialResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF022);
    let n = 1000;
    let mut checked = 0;
    let mut violations = 0;
    let mut trials = Vec::with_capacity(n);
    for t in 0..n as u64 {
        let cfg = fuzz_config(&mut rng, t);
        let real = realize(&cfg, t).expect("valid fuzzed config");
        let limits = Limits {
            l_max: cfg.l_max,
            r_th: cfg.r_th_bps,
        };
        let links: Vec<LinkId> = real.topology.link_ids().collect();
        let fused = build_problem(&real.channel, Scope::Fused, &links, limits).unwrap();
        for m in Method::ALL {
            let run = run_method(&real, m, limits, InfeasibilityPolicy::Report).unwrap();
            for (p, a) in &run.parts {
                if a.status.is_feasible() {
                    checked += 1;
                    violations += verify(a, p).len();
                }
            }
            if run.allocation.status.is_feasible() {
                checked += 1;
                violations += verify(&run.allocation, &fused).len();
            }
        }
        trials.push(run_trial(&cfg, t, InfeasibilityPolicy::Report).unwrap());
    }
    r.check(
        2,
        "constraint verification",
        violations == 0 && checked > 0,
        format!(
            "{n} fuzzed trials, {checked} feasible allocations checked, {violations} violations"
        ),
    );
    trials
}

fn dominance(r: &mut Report, sources: &[&[TrialResult]]) {
    let mut eligible = 0;
    let mut broken = 0;
    for t in sources.iter().flat_map(|s| s.iter()) {
        if !t.all_feasible() {
            continue;
        }
        eligible += 1;
        let v = |m| t.outcome(m).objective_bps;
        let ok = at_least(v(Method::InterOptimal), v(Method::InterHeuristic))
            && at_least(v(Method::InterOptimal), v(Method::IntraOptimal))
            && at_least(v(Method::IntraOptimal), v(Method::IntraHeuristic));
        broken += usize::from(!ok);
    }
    r.check(
        3,
        "dominance chain",
        broken == 0 && eligible > 0,
        format!("{eligible} all-feasible trials, {broken} violations"),
    );
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn fig4(r: &mut Report, result: &SweepResult, elapsed: Duration) {
    let gains: Vec<f64> = result
        .points
        .iter()
        .map(|p| p.gain_percent(Method::InterOptimal, Method::IntraOptimal))
        .collect();
    let avg = gains.iter().sum::<f64>() / gains.len() as f64;
    let ok = gains.iter().all(|&g| g > 0.0) && avg > 3.0 && avg < 30.0 && elapsed.as_secs() <= 900;
    let list: Vec<String> = result
        .points
        .iter()
        .zip(&gains)
        .map(|(p, g)| format!("I={}:{g:.2}%", p.value))
        .collect();
    r.check(
        4,
        "link sweep gain",
        ok,
        format!(
            "{} | average {avg:.2}% | single core {:.1} s",
            list.join(" "),
            elapsed.as_secs_f64()
        ),
    );
}

fn means(result: &SweepResult, m: Method) -> Vec<f64> {
    result.points.iter().map(|p| p.mean(m)).collect()
}

fn fig6(r: &mut Report, result: &SweepResult) {
    let non_increasing = Method::ALL
        .iter()
        .all(|&m| means(result, m).windows(2).all(|w| w[1] <= w[0]));
    let gaps: Vec<f64> = result
        .points
        .iter()
        .map(|p| p.gain_percent(Method::InterOptimal, Method::IntraOptimal))
        .collect();
    let at_full = result
        .points
        .iter()
        .position(|p| p.value == 1.0)
        .map(|i| gaps[i]);
    let peak = at_full.is_some_and(|g| gaps.iter().all(|&x| g >= x));
    let list: Vec<String> = result
        .points
        .iter()
        .zip(&gaps)
        .map(|(p, g)| format!("{:.0}%:{g:.2}%", 100.0 * p.value))
        .collect();
    r.check(
        5,
        "utilization sweep",
        non_increasing && peak,
        format!(
            "means non-increasing: {non_increasing}; gap {} | peak at 100%: {peak}",
            list.join(" ")
        ),
    );
}

fn fig7(r: &mut Report, result: &SweepResult) {
    let decreasing = Method::ALL
        .iter()
        .all(|&m| means(result, m).windows(2).all(|w| w[1] < w[0]));
    let adv: Vec<f64> = result
        .points
        .iter()
        .map(|p| p.gain_percent(Method::InterOptimal, Method::IntraHeuristic))
        .collect();
    let widening = adv.windows(2).all(|w| w[1] > w[0]);
    let list: Vec<String> = result
        .points
        .iter()
        .zip(&adv)
        .map(|(p, a)| format!("{}m:{a:.2}%", p.value))
        .collect();
    r.check(
        6,
        "range sweep",
        decreasing && widening,
        format!(
            "means strictly decreasing: {decreasing}; advantage {} | widening: {widening}",
            list.join(" ")
        ),
    );
}

fn cdf_ordering(r: &mut Report, result: &SweepResult) {
    let median = |m| {
        sinr_cdf(&pooled_sinr(result, m))
            .map(|c| c.median())
            .unwrap_or(f64::NAN)
    };
    let [io, ih, ao, ah] = Method::ALL.map(median);
    r.check(
        7,
        "SINR median ordering",
        io > ih && ao > ah,
        format!(
            "inter-opt {io:.2} dB > inter-heur {ih:.2} dB; intra-opt {ao:.2} dB > intra-heur {ah:.2} dB"
        ),
    );
}

fn csv_bytes(result: &SweepResult) -> (Vec<u8>, Vec<u8>) {
    let mut trials = Vec::new();
    let mut sweep = Vec::new();
    write_trial_csv(result, &mut trials).unwrap();
    write_sweep_csv(result, &mut sweep).unwrap();
    (trials, sweep)
}

fn determinism(r: &mut Report, single: &SweepResult, cfg: &ScenarioConfig) {
    let parallel = with_threads(4, || sweep_links(cfg, &LINK_COUNTS, TRIALS).unwrap());
    let again = sweep_range(&ScenarioConfig::double_pool(), &RANGES_M[..2], 20).unwrap();
    let again2 = sweep_range(&ScenarioConfig::double_pool(), &RANGES_M[..2], 20).unwrap();
    let a = csv_bytes(single);
    let b = csv_bytes(&parallel);
    let ok = a == b && csv_bytes(&again) == csv_bytes(&again2);
    r.check(
        8,
        "determinism",
        ok,
        format!(
            "link sweep 1 thread vs 4 threads: {} + {} bytes identical: {}; range re-run identical: {}",
            a.0.len(),
            a.1.len(),
            a == b,
            csv_bytes(&again) == csv_bytes(&again2)
        ),
    );
}

fn goldens(r: &mut Report) {
    let p_due_w = 10f64.powf(1.5) * 1e-3;
    let noise = noise_power_w(-174.0, 180e3).unwrap();
    let exact_gain = link_gain(path_loss_d2d_db(0.05).unwrap(), 8.0);

    let snr = |g_dd: f64, noise: f64, p_due: f64| {
        let radio = RadioParams {
            p_cue_w: 0.2,
            p_due_w: p_due,
            noise_power_w: noise,
            inter_cell_w: 0.0,
            gamma_th: 1.0,
            gamma_tilde_th: 10.0,
            rb_bandwidth_hz: 180e3,
        };
        let gains = Gains {
            g_dd: vec![g_dd],
            g_cd: vec![],
            g_cb: vec![],
            g_db: vec![0.0],
        };
        let ch = ChannelRealization::from_gains(
            gains,
            radio,
            RbPools::from_sizes(&[1, 0]),
            &CueSchedule::idle(1, 0),
        )
        .unwrap();
        ch.d2d_sinr(LinkId(0), RbId(0)).unwrap()
    };
    let protection = {
        let radio = RadioParams {
            p_cue_w: 1.0,
            p_due_w: 1.0,
            noise_power_w: 7.166e-16,
            inter_cell_w: 0.0,
            gamma_th: 1.0,
            gamma_tilde_th: 10.0,
            rb_bandwidth_hz: 180e3,
        };
        let gains = Gains {
            g_dd: vec![1e-9],
            g_cd: vec![vec![1e-15]],
            g_cb: vec![1e-12],
            g_db: vec![9.283e-14],
        };
        let schedule = CueSchedule::from_pairs(1, 1, [(CueId(0), RbId(0))]).unwrap();
        let ch =
            ChannelRealization::from_gains(gains, radio, RbPools::from_sizes(&[1, 0]), &schedule)
                .unwrap();
        assert!(ch.cue_protection_ok(CueId(0), LinkId(0)));
        ch.cue_sinr_with(CueId(0), LinkId(0))
    };
    let chain = snr(exact_gain, noise, p_due_w);

    // independent 50-digit recomputations
    let cases = [
        (
            "pl_d2d(50 m)",
            path_loss_d2d_db(0.05).unwrap(),
            95.958800173440752191,
        ),
        (
            "pl_cue(400 m)",
            path_loss_cue_db(0.4).unwrap(),
            113.13745567393138588,
        ),
        (
            "gain(95.959 dB, +8 dB)",
            link_gain(95.959, 8.0),
            4.0188333725418347438e-11,
        ),
        (
            "gain(pl_d2d(50 m), +8 dB)",
            exact_gain,
            4.0190182904153281777e-11,
        ),
        ("noise(180 kHz)", noise, 7.1659290699629505139e-16),
        (
            "noise(1 Hz)",
            noise_power_w(-174.0, 1.0).unwrap(),
            3.9810717055349725077e-21,
        ),
        (
            "sinr(4.018e-11, 7.166e-16)",
            snr(4.018e-11, 7.166e-16, p_due_w),
            1773.0995867368892208,
        ),
        ("sinr(50 m link, +8 dB)", chain, 1773.5665021945596456),
        ("cue protection ratio", protection, 10.689859385589641954),
        (
            "rate(50 m link, +8 dB)",
            shannon_rate(chain, 180e3),
            1942785.1665588024559,
        ),
    ];
    let worst = cases
        .iter()
        .map(|&(_, got, want)| ((got - want) / want).abs())
        .fold(0.0, f64::max);
    let bad: Vec<&str> = cases
        .iter()
        .filter(|&&(_, got, want)| !rel_close(got, want))
        .map(|&(name, _, _)| name)
        .collect();
    r.check(
        9,
        "channel golden values",
        bad.is_empty(),
        format!(
            "{} values, worst relative error {worst:.1e}, off: {bad:?}",
            cases.len()
        ),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    let start = Instant::now();

    oracle_equivalence(&mut r);
    let fuzzed = constraint_verification(&mut r);

    let links_cfg = ScenarioConfig::double_pool();
    let t = Instant::now();
    let links = with_threads(1, || sweep_links(&links_cfg, &LINK_COUNTS, TRIALS).unwrap());
    let links_time = t.elapsed();
    let util = sweep_utilization(
        &ScenarioConfig {
            num_d2d_links: 20,
            ..ScenarioConfig::equal_pools()
        },
        &UTILIZATIONS,
        TRIALS,
    )
    .unwrap();
    let range = sweep_range(&ScenarioConfig::double_pool(), &RANGES_M, TRIALS).unwrap();

    let mut sweep_trials: Vec<&[TrialResult]> = vec![&fuzzed];
    for s in [&links, &util, &range] {
        sweep_trials.extend(s.trials.iter().map(Vec::as_slice));
    }
    dominance(&mut r, &sweep_trials);
    fig4(&mut r, &links, links_time);
    fig6(&mut r, &util);
    fig7(&mut r, &range);
    cdf_ordering(&mut r, &links);
    determinism(&mut r, &links, &links_cfg);
    goldens(&mut r);

    println!(
        "{} of 9 criteria passed in {:.1} s",
        9 - r.failures,
        start.elapsed().as_secs_f64()
    );
    if r.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
