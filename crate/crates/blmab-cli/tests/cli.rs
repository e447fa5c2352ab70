//! End-to-end checks of the installed binary: output schemas, config
//! merging, determinism, and the exit-code contract. Simulations here are
//! kept tiny; statistical quality is covered elsewhere.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn blmab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blmab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sweep_csv_has_the_fixed_schema() {
    let csv = stdout_of(&blmab(&[
        "sweep",
        "--tail", "subexp",
        "--param", "1",
        "--horizons", "200,400",
        "--n-instances", "4",
        "--n-sub", "2",
        "--seed", "3",
    ]));
    let mut lines = csv.lines();
    let manifest = lines.next().unwrap();
    assert!(manifest.starts_with("# manifest "), "{manifest}");
    assert_eq!(manifest.len(), "# manifest ".len() + 64);
    assert_eq!(
        lines.next().unwrap(),
        "policy,tail,param,c,T,n_instances,n_sub,mean_regret,std_err,seed"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    for (row, t) in rows.iter().zip(["200", "400"]) {
        assert_eq!(row[..7], ["blmoss", "subexp", "1", "0.5", t, "4", "2"]);
        assert!(row[7].parse::<f64>().unwrap() >= 0.0);
        assert!(row[8].parse::<f64>().unwrap() >= 0.0);
        assert_eq!(row[9], "3");
    }
}

#[test]
fn progress_stays_on_stderr() {
    let out = blmab(&[
        "sweep", "--tail", "subexp", "--param", "1", "--horizons", "100,200",
        "--n-instances", "2", "--n-sub", "1",
    ]);
    let stdout = stdout_of(&out);
    assert!(stdout.starts_with("# manifest "));
    assert!(stdout.lines().all(|l| l.starts_with('#') || l.contains(',')));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("T=100"), "{stderr}");
}

#[test]
fn single_point_simulate_is_deterministic() {
    let args = [
        "simulate", "--tail", "subpareto", "--param", "1", "--horizon", "300",
        "--n-instances", "1", "--n-sub", "1", "--seed", "11",
    ];
    let first = stdout_of(&blmab(&args));
    let second = stdout_of(&blmab(&args));
    assert_eq!(first, second);
    assert_eq!(first.lines().count(), 3);
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(
        &config,
        "# sweep settings\ntail = subexp\nparam = 1\nhorizons = 150,300\nn_instances = 3\nn_sub = 2\nseed = 5\n",
    )
    .unwrap();
    let from_file = stdout_of(&blmab(&["sweep", "--config", config.to_str().unwrap()]));
    assert!(from_file.lines().nth(2).unwrap().ends_with(",5"));

    // A flag overrides the file's seed; everything else is unchanged.
    let overridden = stdout_of(&blmab(&[
        "sweep", "--config", config.to_str().unwrap(), "--seed", "9",
    ]));
    assert!(overridden.lines().nth(2).unwrap().ends_with(",9"));

    // The same run spelled purely with flags has the identical manifest and
    // hence an identical body.
    let flags_only = stdout_of(&blmab(&[
        "sweep", "--tail", "subexp", "--param", "1", "--horizons", "150,300",
        "--n-instances", "3", "--n-sub", "2", "--seed", "9",
    ]));
    assert_eq!(overridden, flags_only);
}

#[test]
fn out_directory_gets_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = blmab(&[
        "sweep", "--tail", "subexp", "--param", "2", "--horizons", "100,200",
        "--n-instances", "3", "--n-sub", "2", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "data went to files, not stdout");

    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let json = read_json(&dir.path().join("sweep.json"));
    let manifest = csv.lines().next().unwrap().strip_prefix("# manifest ").unwrap();
    assert_eq!(json["manifest"].as_str().unwrap(), manifest);
    assert_eq!(json["command"], "sweep");
    assert_eq!(json["config"]["param"], "2");
    assert_eq!(json["groups"][0]["points"].as_array().unwrap().len(), 2);
    assert!(json["groups"][0]["bounds"].is_array());
    assert!(json["groups"][0]["fit"].is_object() || json["groups"][0]["fit"].is_null());

    let sha = {
        use sha2::{Digest, Sha256};
        let mut hex = String::new();
        for b in Sha256::digest(csv.as_bytes()) {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    };
    assert_eq!(json["csv_sha256"].as_str().unwrap(), sha);
}

#[test]
fn demo_reports_both_policies() {
    let dir = tempfile::tempdir().unwrap();
    let out = blmab(&[
        "demo-lower-bound", "--horizons", "200,400", "--n-instances", "4",
        "--n-sub", "1", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("demo-lower-bound.csv")).unwrap();
    let policies: Vec<&str> =
        csv.lines().skip(2).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(policies, ["ucb1", "ucb1", "blmoss", "blmoss"]);
    let json = read_json(&dir.path().join("demo-lower-bound.json"));
    assert_eq!(json["groups"].as_array().unwrap().len(), 2);
    assert_eq!(json["groups"][1]["alpha_override"], 1.0);
}

#[test]
fn fit_round_trips_sweep_output() {
    let dir = tempfile::tempdir().unwrap();
    blmab(&[
        "sweep", "--tail", "uniform", "--policy", "ucb1", "--epsilon", "0.2",
        "--horizons", "200,400,800", "--n-instances", "6", "--n-sub", "1",
        "--out", dir.path().to_str().unwrap(),
    ]);
    let csv_path = dir.path().join("sweep.csv");
    let report = stdout_of(&blmab(&["fit", "--input", csv_path.to_str().unwrap()]));
    let json: Value = serde_json::from_str(&report).unwrap();
    let fit = &json["reports"][0]["fit"];
    // Two-level uniform arrivals make the all-arms baseline linear.
    assert!(fit["gamma_loglog"].as_f64().unwrap() > 0.9);
    assert_eq!(json["reports"][0]["policy"], "ucb1");
}

#[test]
fn fit_on_synthetic_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let mut text = String::from("T,mean_regret\n");
    for t in [10_000u64, 20_000, 50_000, 70_000, 100_000] {
        text.push_str(&format!("{t},{}\n", 2.0 * (t as f64).powf(0.6)));
    }
    fs::write(&path, text).unwrap();
    let out = blmab(&["fit", "--input", path.to_str().unwrap(), "--beta", "0.25"]);
    let json: Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let fit = &json["reports"][0]["fit"];
    assert_eq!(fit["gamma_grid"].as_f64().unwrap(), 0.60);
    assert!((fit["gamma_loglog"].as_f64().unwrap() - 0.6).abs() < 1e-9);
    let theory = json["theoretical_gamma"].as_f64().unwrap();
    assert!((theory - 0.8333333333333334).abs() < 1e-12);
}

#[test]
fn fit_warns_when_methods_disagree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("steep.csv");
    // Slope ~2 in log-log space: the grid caps at 1, so the methods differ.
    fs::write(&path, "T,mean_regret\n100,50\n200,199\n").unwrap();
    let out = blmab(&["fit", "--input", path.to_str().unwrap()]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("disagree"), "{stderr}");
}

#[test]
fn estimate_reports_both_estimators_and_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.txt");
    fs::write(&path, "arrival\n2\n2\n2\n2\n").unwrap();
    let out = blmab(&[
        "estimate", "--input", path.to_str().unwrap(), "--horizon", "100",
        "--mu", "1", "--delta", "0.1",
    ]);
    let json: Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["fit"]["lambda_hat"].as_f64().unwrap(), 0.5);
    assert_eq!(json["fit"]["beta_mean"].as_f64().unwrap(), 2.0);
    assert_eq!(json["required_samples"].as_u64().unwrap(), 14_979);
    assert_eq!(json["sufficient"], Value::Bool(false));
}

#[test]
fn bound_check_passes_on_a_clean_run() {
    let out = blmab(&[
        "bound-check", "--tail", "subexp", "--param", "0.5",
        "--horizons", "500,1000", "--n-instances", "4", "--n-sub", "2",
    ]);
    assert_eq!(code_of(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stderr).unwrap().contains("bound ok"));
}

#[test]
fn exit_codes_follow_the_error_taxonomy() {
    // Usage: unknown flag (clap), bad key, missing param, wrong policy key.
    assert_eq!(code_of(&blmab(&["sweep", "--no-such-flag"])), 2);
    assert_eq!(code_of(&blmab(&["sweep", "--tail", "subexp"])), 2);
    assert_eq!(code_of(&blmab(&["bound-check", "--tail", "subexp", "--param", "1", "--policy", "ucb1"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "tial = subexp\n").unwrap();
    assert_eq!(code_of(&blmab(&["sweep", "--config", config.to_str().unwrap()])), 2);

    // Data: malformed event times, unfittable curves.
    let events = dir.path().join("events.txt");
    fs::write(&events, "1.5\nnot-a-number\n2.0\n").unwrap();
    assert_eq!(
        code_of(&blmab(&["estimate", "--input", events.to_str().unwrap(), "--horizon", "10"])),
        3
    );
    let single = dir.path().join("single.csv");
    fs::write(&single, "T,mean_regret\n10,5\n").unwrap();
    assert_eq!(code_of(&blmab(&["fit", "--input", single.to_str().unwrap()])), 3);

    // I/O: missing file.
    assert_eq!(code_of(&blmab(&["fit", "--input", "/no/such/file.csv"])), 5);
}

#[test]
fn threads_do_not_change_the_bytes() {
    let run = |threads: &str, dir: &Path| {
        let out = blmab(&[
            "sweep", "--tail", "subpareto", "--param", "1", "--horizons", "200,400",
            "--n-instances", "6", "--n-sub", "2", "--threads", threads,
            "--out", dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        fs::read(dir.join("sweep.csv")).unwrap()
    };
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    assert_eq!(run("1", dir1.path()), run("2", dir2.path()));
}
