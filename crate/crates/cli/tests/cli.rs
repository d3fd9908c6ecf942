use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;

use entchan::{run, simulation_status, Cli, Status, SWEEP_HEADER};
use entchan_core::{success_exact, ChannelSpec, Strategy};

fn entchan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entchan"))
        .args(args)
        .env_remove("ENTCHAN_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value_after(report: &str, label: &str) -> f64 {
    let line = report
        .lines()
        .find(|l| l.starts_with(label))
        .unwrap_or_else(|| panic!("no {label} in\n{report}"));
    line[label.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

fn in_process(args: &[&str]) -> (anyhow::Result<Status>, String) {
    let cli = Cli::try_parse_from(std::iter::once("entchan").chain(args.iter().copied())).unwrap();
    let mut out = String::new();
    let status = run(&cli, &mut out);
    (status, out)
}

#[test]
fn optimize_reports_the_equal_channel_optimum() {
    let out = entchan(&["optimize", "--channel", "0.3333333333,0.3333333333,0.3333333334"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert!(
        (value_after(&report, "analytic optimum") - 0.902369).abs() < 1e-6,
        "{report}"
    );
    assert!(
        (value_after(&report, "numeric optimum") - 0.902369).abs() < 1e-6,
        "{report}"
    );
    assert!(
        report.contains("a = 0.7071067813  b = 0.9238795325  b' = 0.3826834324"),
        "{report}"
    );
    assert!(!report.contains("classical channel suffices"));
}

#[test]
fn optimize_flags_perfect_channels() {
    let out = entchan(&["optimize", "--channel", "0.5,0,0.5", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(value_after(&report, "optimum "), 1.0);
    assert!(report.contains("classical channel suffices"));
}

#[test]
fn malformed_input_is_a_usage_error() {
    for args in [
        &["optimize", "--channel", "0.3,0.3"][..],
        &["optimize", "--channel", "0.5,0.6,0.2"],
        &["optimize", "--channel", "0.5,0.5,0", "--dim", "1"],
        &["optimize", "--channel", "0.5,0.5,0", "--shared", "half"],
        &["simulate", "--channel", "0.5,0.5,0", "--trials", "0"],
        &[
            "simulate",
            "--channel",
            "0.5,0.5,0",
            "--strategy",
            "/nonexistent/strategy.json",
        ],
        &["sweep", "--step", "0.7"],
        &["sweep", "--step", "0"],
        &["qudit", "--dim", "1"],
        &["frobnicate"],
    ] {
        let out = entchan(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn invalid_strategy_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"dimension": 2, "shared": {"type": "schmidt", "l0": 0.5}}"#).unwrap();
    let out = entchan(&[
        "simulate",
        "--channel",
        "0.2,0.3,0.5",
        "--strategy",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn optimize_then_simulate(channel: &str, extra: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strategy.json");
    let path_str = path.to_str().unwrap();
    let mut args = vec!["optimize", "--channel", channel, "--json", path_str, "--restarts", "8"];
    args.extend_from_slice(extra);
    let opt = entchan(&args);
    assert_eq!(opt.status.code(), Some(0), "{}", String::from_utf8_lossy(&opt.stderr));
    let reported = value_after(&stdout(&opt), "optimum ");

    let strategy = Strategy::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    let spec: ChannelSpec = channel.parse().unwrap();
    let exact = success_exact(&strategy, &spec).unwrap();
    // the report rounds to ten significant digits
    assert!((exact - reported).abs() < 1e-9, "{exact} vs {reported}");

    let json = dir.path().join("run.json");
    let sim = entchan(&[
        "simulate",
        "--strategy",
        path_str,
        "--channel",
        channel,
        "--trials",
        "100000",
        "--seed",
        "3",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(sim.status.code(), Some(0));
    let run: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!((run["exact_rate"].as_f64().unwrap() - exact).abs() < 1e-10);
}

#[test]
fn optimized_strategies_round_trip_into_simulate() {
    optimize_then_simulate("0.2,0.3,0.5", &[]);
    optimize_then_simulate("0.4,0.1,0.5", &[]);
    optimize_then_simulate(
        "0.3333333333,0.3333333333,0.3333333334",
        &["--dim", "3", "--shared", "full"],
    );
}

#[test]
fn shared_state_can_come_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.json");
    fs::write(&path, Strategy::qubit_optimal().to_json()).unwrap();
    let out = entchan(&[
        "optimize",
        "--channel",
        "0.2,0.3,0.5",
        "--shared",
        "file",
        path.to_str().unwrap(),
        "--restarts",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert!(
        (value_after(&report, "numeric optimum") - 0.9192582404).abs() < 2e-10,
        "{report}"
    );
    let mismatch = entchan(&[
        "optimize",
        "--channel",
        "0.2,0.3,0.5",
        "--shared",
        "file",
        path.to_str().unwrap(),
        "--dim",
        "3",
    ]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_agrees_with_exact_rate() {
    let dir = tempfile::tempdir().unwrap();
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let base = [
        "simulate",
        "--strategy",
        "optimal",
        "--channel",
        "0.3333333333,0.3333333333,0.3333333334",
    ];
    let run_with = |csv: &Path| {
        let mut args = base.to_vec();
        args.extend_from_slice(&["--trials", "1000000", "--seed", "9", "--csv", csv.to_str().unwrap()]);
        entchan(&args)
    };
    let a = run_with(&csv_a);
    let b = run_with(&csv_b);
    assert_eq!(a.status.code(), Some(0));
    let report = stdout(&a);
    let replaced = |s: String| s.replace(csv_b.to_str().unwrap(), csv_a.to_str().unwrap());
    assert_eq!(report, replaced(stdout(&b)));
    assert!(
        (value_after(&report, "empirical rate") - 0.902369).abs() < 0.0009,
        "{report}"
    );
    assert_eq!(fs::read(&csv_a).unwrap(), fs::read(&csv_b).unwrap());

    let text = fs::read_to_string(&csv_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,q,alpha,tag,bit,beta,q_hat,success"));
    let successes = lines.filter(|l| l.ends_with(",1")).count() as f64;
    assert_eq!(successes, value_after(&report, "successes"));
}

#[test]
fn simulate_seed_falls_back_to_environment() {
    let args = ["simulate", "--channel", "0.2,0.3,0.5", "--trials", "5000"];
    let with_env = Command::new(env!("CARGO_BIN_EXE_entchan"))
        .args(args)
        .env("ENTCHAN_SEED", "77")
        .output()
        .unwrap();
    let explicit = entchan(&[&args[..], &["--seed", "77"]].concat());
    assert_eq!(with_env.stdout, explicit.stdout);
    assert!(stdout(&explicit).contains("seed            77"));
}

#[test]
fn deterministic_strategies_have_zero_z() {
    let out = entchan(&["simulate", "--channel", "0,0,1", "--trials", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(value_after(&stdout(&out), "z-score"), 0.0);
}

#[test]
fn sweep_csv_has_the_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = entchan(&["sweep", "--step", "0.05", "--csv", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>().join(","),
        SWEEP_HEADER
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 231);
    for row in &rows {
        let c: Vec<f64> = (0..5).map(|k| row[k].parse().unwrap()).collect();
        assert!((c[0] + c[1] + c[2] - 1.0).abs() < 1e-12);
        if c[..3].contains(&0.0) {
            assert_eq!(c[4], 1.0, "{row:?}");
        }
        assert!(row[5].is_empty() && row[6].is_empty());
    }
}

#[test]
fn sweep_with_numeric_closes_the_gap() {
    let (status, report) = in_process(&["sweep", "--step", "0.05", "--with-numeric", "--seed", "5"]);
    assert_eq!(status.unwrap(), Status::Passed, "{report}");
    assert!(value_after(&report, "max |gap|") < 1e-6);
    assert!(report.contains("rows 231 "));
}

#[test]
fn sweep_includes_the_equal_channel_on_a_thirds_lattice() {
    let (status, report) = in_process(&["sweep", "--step", "0.3333333333333333"]);
    assert_eq!(status.unwrap(), Status::Passed);
    let row = report
        .lines()
        .find(|l| l.split_whitespace().take(3).all(|c| c == "0.3333333333"))
        .expect("equal channel row");
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(cols[3], "0.8333333333");
    assert_eq!(cols[4], "0.9023689271");
}

#[test]
fn qudit_reports_bound_and_attainment() {
    let out = entchan(&["qudit", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert!((value_after(&report, "bound (2/d)Fmax") - 0.0460237).abs() < 1e-7);
    assert!((value_after(&report, "achieved") - 0.0460237).abs() < 1e-7);
    assert!(value_after(&report, "max sampled F") <= value_after(&report, "bound (2/d)Fmax") + 1e-9);
    let two = stdout(&entchan(&["qudit", "--dim", "2", "--samples", "50"]));
    assert!((value_after(&two, "bound (2/d)Fmax") - 0.0690356).abs() < 1e-7);
}

#[test]
fn verify_passes_by_default_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let out = entchan(&["verify", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let results = report["results"].as_array().unwrap();
    assert!(results.len() >= 20);
    assert!(results.iter().all(|r| r["passed"] == true));
}

#[test]
fn verify_is_seed_robust() {
    for seed in 0..10u64 {
        let (status, report) = in_process(&["verify", "--seed", &seed.to_string()]);
        assert_eq!(status.unwrap(), Status::Passed, "seed {seed}\n{report}");
    }
}

#[test]
fn verify_fails_with_a_corrupted_tolerance() {
    let (status, report) = in_process(&["verify", "--tolerance-scale", "1e-9"]);
    assert_eq!(status.unwrap(), Status::Failed);
    assert!(report.contains("FAIL"));
}

#[test]
fn commands_are_deterministic() {
    for args in [
        &[
            "optimize",
            "--channel",
            "0.1,0.45,0.45",
            "--restarts",
            "6",
            "--seed",
            "4",
        ][..],
        &["qudit", "--dim", "4", "--samples", "200", "--seed", "8"],
        &["sweep", "--step", "0.25", "--with-numeric"],
    ] {
        assert_eq!(entchan(args).stdout, entchan(args).stdout, "{args:?}");
    }
}

#[test]
fn z_gate_trips_beyond_four_sigma() {
    assert_eq!(simulation_status(3.99), Status::Passed);
    assert_eq!(simulation_status(-4.0), Status::Passed);
    assert_eq!(simulation_status(4.01), Status::Failed);
    assert_eq!(simulation_status(f64::NAN), Status::Failed);
}
