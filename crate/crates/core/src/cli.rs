//! The `d2dshare` command line: `run`, `plot` and `verify`.
//!
//! Run configurations are TOML:
//!
//! ```toml
//! schema_version = 1
//!
//! [scenario]            # every ScenarioConfig field, no extras
//! num_tenants = 2
//! # ...
//!
//! [experiment]          # optional
//! name = "sweep-links"  # trial | sweep-links | sweep-utilization | sweep-range
//! trials = 1000
//! values = [10, 16, 20, 30, 40]
//! policy = "drop-links" # or "report"
//! ```
//!
//! Without `--config` the preset scenario of the chosen experiment is used.
//! `--set key=value` edits the document before it is validated; bare keys
//! address `[scenario]`, dotted keys (`experiment.trials`) any table.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{
    pooled_sinr, read_sweep_csv, sinr_cdf, sweep, write_cdf_csv, write_sinr_csv, write_sweep_csv,
    write_trial_csv, InfeasibilityPolicy, Method, SweepAxis, SweepResult, LINK_COUNTS, RANGES_M,
    SWEEP_CSV_HEADER, UTILIZATIONS,
};
use crate::heuristics::{inter_tenant_heuristic, single_queue_greedy};
use crate::ilp::{
    read_instance, solve_exact, solve_oracle, verify, Allocation, AllocationProblem, Instance,
    ORACLE_MAX_LINKS, ORACLE_MAX_RBS,
};
use crate::model::{ScenarioConfig, TenantId};
use crate::plot::{cdf_svg, read_cdf_csv, sum_rate_svg};

pub const SCHEMA_VERSION: i64 = 1;
/// Trial count of `--fast`.
pub const FAST_TRIALS: usize = 200;
pub const DEFAULT_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Trial,
    SweepLinks,
    SweepUtilization,
    SweepRange,
}

impl Experiment {
    pub fn axis(self) -> SweepAxis {
        match self {
            Experiment::Trial => SweepAxis::Base,
            Experiment::SweepLinks => SweepAxis::NumLinks,
            Experiment::SweepUtilization => SweepAxis::UtilizationB,
            Experiment::SweepRange => SweepAxis::MaxRangeM,
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            Experiment::Trial => vec![0.0],
            Experiment::SweepLinks => LINK_COUNTS.to_vec(),
            Experiment::SweepUtilization => UTILIZATIONS.to_vec(),
            Experiment::SweepRange => RANGES_M.to_vec(),
        }
    }

    /// Scenario used when no config file is given.
    pub fn preset(self) -> ScenarioConfig {
        match self {
            Experiment::SweepUtilization => ScenarioConfig::equal_pools(),
            _ => ScenarioConfig::double_pool(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: Option<Experiment>,
    pub trials: Option<usize>,
    pub values: Option<Vec<f64>>,
    pub policy: Option<InfeasibilityPolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: i64,
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

fn toml_error(origin: &str, e: impl std::fmt::Display) -> Error {
    // toml messages already carry line, column and the offending key
    Error::InvalidConfig(format!("{origin}: {e}"))
}

/// Applies one `key=value` override to a TOML document.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| {
        Error::InvalidConfig(format!("--set expects key=value, got `{assignment}`"))
    })?;
    let key = key.trim();
    let path: Vec<&str> = if key.contains('.') {
        key.split('.').collect()
    } else {
        vec!["scenario", key]
    };
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::InvalidConfig(format!("bad --set key `{key}`")));
    }
    // anything that is not a TOML literal is taken as a string
    let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let mut table = doc;
    for part in &path[..path.len() - 1] {
        table = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::InvalidConfig(format!("`{part}` in `{key}` is not a table")))?;
    }
    table.insert(path[path.len() - 1].to_string(), value);
    Ok(())
}

/// Loads (or synthesizes) the config document, applies overrides and
/// validates it.
pub fn load_config(
    path: Option<&Path>,
    experiment: Option<Experiment>,
    overrides: &[String],
) -> Result<ConfigFile> {
    let (mut doc, origin) = match path {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            let doc = toml::from_str::<toml::Table>(&text)
                .map_err(|e| toml_error(&p.display().to_string(), e))?;
            (doc, p.display().to_string())
        }
        None => {
            let preset = ConfigFile {
                schema_version: SCHEMA_VERSION,
                scenario: experiment.unwrap_or(Experiment::Trial).preset(),
                experiment: ExperimentSection::default(),
            };
            let doc = toml::Table::try_from(&preset).map_err(|e| toml_error("preset", e))?;
            (doc, "preset".to_string())
        }
    };
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let cfg: ConfigFile = match path {
        Some(path) if overrides.is_empty() => {
            // re-parse the original text so errors point at its lines
            let text = fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| toml_error(&origin, e))?
        }
        _ => doc.try_into().map_err(|e| toml_error(&origin, e))?,
    };
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidConfig(format!(
            "{origin}: schema_version {} is not supported (expected {SCHEMA_VERSION})",
            cfg.schema_version
        )));
    }
    cfg.scenario.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTiming {
    pub value: f64,
    pub method: Method,
    pub mean_wall_time_s: f64,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub schema_version: i64,
    pub experiment: Experiment,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub trials: usize,
    pub policy: InfeasibilityPolicy,
    pub seed: u64,
    pub config_path: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub scenario: ScenarioConfig,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<PathBuf>,
    pub timings: Vec<PointTiming>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    pub experiment: Option<Experiment>,
    pub trials: Option<usize>,
    pub fast: bool,
    pub seed: Option<u64>,
    pub overrides: Vec<String>,
    pub out_dir: PathBuf,
    pub sinr_log: bool,
}

#[derive(Debug)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub result: SweepResult,
}

/// Runs an experiment and writes `trials.csv`, `sweep.csv` and
/// `manifest.json` (plus `sinr.csv` and `cdf.csv` with `sinr_log`).
pub fn cmd_run(opts: &RunOptions) -> Result<RunOutput> {
    let started_at = chrono::Utc::now().to_rfc3339();
    let file_experiment = match &opts.config {
        Some(p) if opts.experiment.is_none() => {
            load_config(Some(p), None, &opts.overrides)?.experiment.name
        }
        _ => None,
    };
    let experiment = opts
        .experiment
        .or(file_experiment)
        .unwrap_or(Experiment::Trial);
    let mut overrides = opts.overrides.clone();
    if let Some(seed) = opts.seed {
        overrides.push(format!("scenario.rng_seed={seed}"));
    }
    let cfg = load_config(opts.config.as_deref(), Some(experiment), &overrides)?;
    let trials = match (opts.trials, opts.fast) {
        (Some(t), _) => t,
        (None, true) => FAST_TRIALS,
        (None, false) => cfg.experiment.trials.unwrap_or(DEFAULT_TRIALS),
    };
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let axis = experiment.axis();
    let values = match (&cfg.experiment.values, experiment) {
        (_, Experiment::Trial) => vec![0.0],
        (Some(v), _) => v.clone(),
        (None, e) => e.default_values(),
    };
    let policy = cfg.experiment.policy.unwrap_or_default();

    let result = sweep(&cfg.scenario, axis, &values, trials, policy)?;
    let served = result
        .trials
        .iter()
        .flatten()
        .flat_map(|t| &t.outcomes)
        .any(|o| o.served_links > 0 && o.status.is_feasible());
    if !served {
        return Err(Error::Infeasible(format!(
            "no method served any link in any of the {} trials; check thresholds and pool sizes",
            trials * values.len()
        )));
    }

    fs::create_dir_all(&opts.out_dir)?;
    let mut outputs = Vec::new();
    let mut create = |name: &str| -> Result<BufWriter<File>> {
        let path = opts.out_dir.join(name);
        outputs.push(path.clone());
        Ok(BufWriter::new(File::create(path)?))
    };
    write_trial_csv(&result, create("trials.csv")?)?;
    write_sweep_csv(&result, create("sweep.csv")?)?;
    if opts.sinr_log {
        write_sinr_csv(&result, create("sinr.csv")?)?;
        let cdfs = Method::ALL
            .into_iter()
            .filter_map(|m| sinr_cdf(&pooled_sinr(&result, m)).ok().map(|c| (m, c)))
            .collect::<Vec<_>>();
        write_cdf_csv(&cdfs, create("cdf.csv")?)?;
    }
    let manifest_path = opts.out_dir.join("manifest.json");
    outputs.push(manifest_path.clone());

    let timings = result
        .points
        .iter()
        .flat_map(|p| {
            p.methods.iter().map(|s| PointTiming {
                value: p.value,
                method: s.method,
                mean_wall_time_s: s.mean_wall_time_s,
            })
        })
        .collect();
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        schema_version: SCHEMA_VERSION,
        experiment,
        axis,
        values,
        trials,
        policy,
        seed: cfg.scenario.rng_seed,
        config_path: opts.config.clone(),
        overrides,
        scenario: cfg.scenario,
        started_at,
        finished_at: chrono::Utc::now().to_rfc3339(),
        outputs,
        timings,
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(&manifest_path)?), &manifest)?;
    Ok(RunOutput { manifest, result })
}

/// Renders a sweep CSV or a CDF CSV to SVG; the header decides which.
pub fn cmd_plot(input: &Path, output: &Path) -> Result<()> {
    let text = fs::read_to_string(input)?;
    let header = text.lines().next().unwrap_or("");
    let svg = if header == SWEEP_CSV_HEADER {
        sum_rate_svg(&read_sweep_csv(text.as_bytes())?)?
    } else if header == "method,sinr_db,cdf" {
        cdf_svg(&read_cdf_csv(text.as_bytes())?)?
    } else {
        return Err(Error::Schema(format!(
            "{}: neither a sweep CSV nor a CDF CSV (header `{header}`)",
            input.display()
        )));
    };
    fs::write(output, svg)?;
    Ok(())
}

/// Objectives and constraint checks of every solver on one instance.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub text: String,
    /// The oracle ran and disagreed with the exact solver, or some
    /// feasible output broke a constraint.
    pub failed: bool,
}

/// Sub-problem of tenant `t`: the links it initiates over its own pool.
fn tenant_subproblem(inst: &Instance, t: TenantId) -> Option<AllocationProblem> {
    let pools = inst.pools.as_ref()?;
    let p = &inst.problem;
    let rows: Vec<usize> = (0..p.num_links())
        .filter(|&i| inst.initiator(i) == t)
        .collect();
    if rows.is_empty() {
        return None;
    }
    let cols: Vec<usize> = pools.pool(t).iter().map(|rb| rb.0).collect();
    let rate = rows
        .iter()
        .map(|&i| cols.iter().map(|&k| p.rate[i][k]).collect())
        .collect();
    AllocationProblem::new(
        rows.iter().map(|&i| p.links[i]).collect(),
        cols.iter().map(|&k| p.rbs[k]).collect(),
        rate,
        p.l_max,
        p.r_th,
    )
    .ok()
}

pub fn cmd_verify(path: &Path) -> Result<VerifyReport> {
    let inst = read_instance(path)?;
    let p = &inst.problem;
    let mut text = String::new();
    let mut failed = false;
    let _ = writeln!(
        text,
        "instance {}: {} links x {} RBs, l_max {}, r_th {} bit/s",
        path.display(),
        p.num_links(),
        p.num_rbs(),
        p.l_max,
        p.r_th
    );
    // true when a feasible result breaks a constraint
    let report = |name: &str, a: &Allocation, q: &AllocationProblem, text: &mut String| {
        let violations = verify(a, q);
        let _ = writeln!(
            text,
            "{name:<20} {:<16} objective {}",
            a.status.to_string(),
            a.objective_bps
        );
        for v in &violations {
            let _ = writeln!(text, "    {v}");
        }
        a.status.is_feasible() && !violations.is_empty()
    };

    let (exact, stats) = solve_exact(p);
    failed |= report("exact", &exact, p, &mut text);
    let _ = writeln!(text, "    {} nodes", stats.nodes_explored);
    let oracle_note = match solve_oracle(p) {
        Ok(o) => {
            failed |= report("oracle", &o, p, &mut text);
            let same_status = o.status.is_feasible() == exact.status.is_feasible();
            let tol = 1e-9 * o.objective_bps.abs().max(1.0);
            if same_status && (o.objective_bps - exact.objective_bps).abs() <= tol {
                "oracle match".to_string()
            } else {
                "ORACLE MISMATCH".to_string()
            }
        }
        Err(Error::OracleGuard { .. }) => format!(
            "oracle skipped: instance exceeds {ORACLE_MAX_LINKS} links or {ORACLE_MAX_RBS} RBs"
        ),
        Err(e) => return Err(e),
    };
    failed |= oracle_note.starts_with("ORACLE MISMATCH");
    let _ = writeln!(text, "{oracle_note}");

    let (inter, _) = inter_tenant_heuristic(p, |l| {
        let i = p.links.iter().position(|&x| x == l).expect("own link");
        inst.receiver(i)
    });
    failed |= report("inter-heuristic", &inter, p, &mut text);
    let (greedy, _) = single_queue_greedy(p);
    failed |= report("greedy", &greedy, p, &mut text);

    if inst.pools.is_some() {
        for t in (0..inst.num_tenants()).map(TenantId) {
            if let Some(q) = tenant_subproblem(&inst, t) {
                let label = t.label();
                let opt = solve_exact(&q).0;
                failed |= report(&format!("intra-optimal {label}"), &opt, &q, &mut text);
                let heur = single_queue_greedy(&q).0;
                failed |= report(&format!("intra-heuristic {label}"), &heur, &q, &mut text);
            }
        }
    } else {
        let _ = writeln!(text, "no pools line: intra-tenant methods skipped");
    }
    Ok(VerifyReport { text, failed })
}

/// Exit code for an error: 2 for bad input, 1 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_) | Error::Parse { .. } | Error::Schema(_) | Error::Domain(_) => 2,
        _ => 1,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "d2dshare",
    version,
    about = "Inter-tenant D2D resource sharing experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write trials.csv, sweep.csv and manifest.json.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        experiment: Option<Experiment>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// key=value override; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// 200 trials per point unless --trials is given.
        #[arg(long)]
        fast: bool,
        /// Also write per-sample SINR (sinr.csv) and pooled CDFs (cdf.csv).
        #[arg(long)]
        sinr_log: bool,
    },
    /// Render a sweep or CDF CSV as SVG.
    Plot {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve an instance file with every method and check the results.
    Verify { instance: PathBuf },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Run {
            config,
            experiment,
            trials,
            seed,
            set,
            out_dir,
            fast,
            sinr_log,
        } => {
            let opts = RunOptions {
                config,
                experiment,
                trials,
                fast,
                seed,
                overrides: set,
                out_dir,
                sinr_log,
            };
            cmd_run(&opts).map(|out| {
                for p in &out.manifest.outputs {
                    println!("wrote {}", p.display());
                }
                0
            })
        }
        Command::Plot { input, output } => {
            let output = output.unwrap_or_else(|| input.with_extension("svg"));
            cmd_plot(&input, &output).map(|()| {
                println!("wrote {}", output.display());
                0
            })
        }
        Command::Verify { instance } => cmd_verify(&instance).map(|r| {
            print!("{}", r.text);
            i32::from(r.failed)
        }),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}
