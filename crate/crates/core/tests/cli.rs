use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_d2dshare"));
    c.current_dir(env!("CARGO_MANIFEST_DIR"));
    c
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn run_preset_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "run",
        "--experiment",
        "sweep-links",
        "--trials",
        "3",
        "--seed",
        "42",
        "--set",
        "experiment.values=[4]",
        "--out-dir",
        out,
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    for f in ["trials.csv", "sweep.csv", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    assert!(!dir.path().join("sinr.csv").exists());
}

#[test]
fn golden_csvs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--config",
        "fixtures/configs/sweep_links.toml",
        "--trials",
        "3",
        "--seed",
        "42",
        "--set",
        "experiment.values=[4, 8]",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    for (produced, golden) in [
        ("sweep.csv", "golden/sweep_links_sweep.csv"),
        ("trials.csv", "golden/sweep_links_trials.csv"),
    ] {
        let a = fs::read(dir.path().join(produced)).unwrap();
        let b = fs::read(fixture(golden)).unwrap();
        assert!(a == b, "{produced} differs from {golden}");
    }
}

#[test]
fn missing_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--config",
        "fixtures/configs/missing_l_max.toml",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("l_max"), "{}", text(&o.stderr));
}

#[test]
fn unknown_override_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--experiment",
        "trial",
        "--set",
        "lmax=4",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("lmax"));
}

#[test]
fn override_is_recorded_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--experiment",
        "trial",
        "--trials",
        "2",
        "--set",
        "l_max=4",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["scenario"]["l_max"], 4);
    assert!(m["overrides"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v == "l_max=4"));
    assert_eq!(m["trials"], 2);
    assert!(m["timings"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn plot_sweep_and_cdf() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--experiment",
        "sweep-range",
        "--trials",
        "2",
        "--set",
        "experiment.values=[25, 50]",
        "--sinr-log",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    assert!(dir.path().join("sinr.csv").exists());

    for name in ["sweep", "cdf"] {
        let csv = dir.path().join(format!("{name}.csv"));
        let svg = dir.path().join(format!("{name}.svg"));
        let o = run(&["plot", csv.to_str().unwrap(), "-o", svg.to_str().unwrap()]);
        assert!(o.status.success(), "{}", text(&o.stderr));
        let body = fs::read_to_string(&svg).unwrap();
        assert!(body.starts_with("<svg") && body.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn plot_rejects_empty_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    fs::write(&csv, "").unwrap();
    let o = run(&["plot", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("empty.svg").exists());
}

#[test]
fn verify_fixtures() {
    let o = run(&["verify", "fixtures/instances/greedy_gap.txt"]);
    assert!(o.status.success());
    let out = text(&o.stdout);
    assert!(out.contains("oracle match"), "{out}");

    let o = run(&["verify", "fixtures/instances/three_by_five.txt"]);
    assert!(o.status.success());
    assert!(text(&o.stdout).contains("oracle match"));

    let o = run(&["verify", "fixtures/instances/oversized.txt"]);
    assert!(o.status.success());
    assert!(text(&o.stdout).contains("oracle skipped"));

    let o = run(&["verify", "fixtures/instances/corrupt.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains(":3:"), "{}", text(&o.stderr));
}

#[test]
fn bad_arguments_and_missing_files() {
    assert_eq!(run(&["run", "--experiment", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "fixtures/instances/does_not_exist.txt"])
            .status
            .code(),
        Some(1)
    );
}
