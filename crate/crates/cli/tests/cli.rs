use std::path::Path;
use std::process::{Command, Output};

use contact_cli::output::JsonTable;
use contact_cli::ResultRow;

fn contact_mf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contact-mf"))
        .args(args)
        .env_remove("CONTACT_MF_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV table, skipping the formula line and the header.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(2).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

const SMALL_GRID: &[&str] = &["survival", "--lambda", "2,3", "--d", "4", "--trials", "60", "--threshold", "100"];

#[test]
fn bound_without_hitting_is_a_quarter() {
    let out = contact_mf(&["bound", "--lambda", "2", "--hitting", "0", "--set-size", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# "));
    let rows = csv_rows(&text);
    let lemma: f64 = rows[0][5].parse().unwrap();
    assert!((lemma - 0.25).abs() < 1e-12);
}

#[test]
fn ode_settles_at_the_fixed_point() {
    let out = contact_mf(&["ode", "--lambda", "2", "--t-end", "20"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    let last = rows.last().unwrap();
    assert_eq!(last[0].parse::<f64>().unwrap(), 20.0);
    assert!((last[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn survival_is_reproducible_and_within_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let mut args = SMALL_GRID.to_vec();
        args.extend(["--seed", "11", "--out", path.to_str().unwrap()]);
        assert!(contact_mf(&args).status.success());
    }
    assert_eq!(read(&a), read(&b));
    let text = read(&a);
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "lambda,d,p_hat,std_err,n_censored,lower_bound,upper_bound,griffeath_bound,H_estimate,K_used,seed"
    );
    assert_eq!(csv_rows(&text).len(), 2);
}

#[test]
fn seed_falls_back_to_the_environment() {
    let flag = contact_mf(&[SMALL_GRID, &["--seed", "5"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_contact-mf"))
        .args(SMALL_GRID)
        .env("CONTACT_MF_SEED", "5")
        .output()
        .unwrap();
    let other = contact_mf(&[SMALL_GRID, &["--seed", "6"]].concat());
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn json_rows_round_trip() {
    let out = contact_mf(&[SMALL_GRID, &["--format", "json", "--seed", "2"]].concat());
    assert!(out.status.success());
    let table: JsonTable<Vec<ResultRow>> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(table.rows.len(), 2);
    let row = &table.rows[1];
    assert_eq!((row.lambda, row.d), (3.0, 4));
    assert!(row.within_bounds());
    let text = serde_json::to_string(row).unwrap();
    assert!(text.contains("\"H_estimate\"") && text.contains("\"K_used\""));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 4\n[bound]\nlambda = 3.0\nhitting = 0.1\nset-size = 2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = csv_rows(&stdout(&contact_mf(&["bound", "--config", cfg])));
    assert_eq!(from_file[0][0].parse::<f64>().unwrap(), 3.0);
    assert_eq!(from_file[0][3], "2");
    let overridden = csv_rows(&stdout(&contact_mf(&["bound", "--config", cfg, "--lambda", "2"])));
    assert_eq!(overridden[0][0].parse::<f64>().unwrap(), 2.0);
    assert_eq!(overridden[0][3], "2");
}

#[test]
fn campaign_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let mut args = vec!["campaign", "--lambda", "2", "--d", "3,4", "--trials", "40", "--threshold", "50"];
    args.extend(["--out", out.to_str().unwrap()]);
    assert!(contact_mf(&args).status.success());
    let plot = read(&dir.path().join("grid.plot.csv"));
    assert_eq!(plot.lines().nth(1).unwrap(), "series,x,y,sigma");
    assert_eq!(csv_rows(&plot).len(), 2);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| contact_mf(args).status.code().unwrap();
    assert_eq!(code(&["survival", "--lambda", "2"]), 2);
    assert_eq!(code(&["bound", "--lambda", "nope"]), 2);
    assert_eq!(code(&["bound", "--lambda", "2", "--hitting", "1.5"]), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[bound]\nlamda = 2.0\n").unwrap();
    let out = contact_mf(&["bound", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda"));

    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(code(&["bound", "--lambda", "2", "--out", missing.to_str().unwrap()]), 4);

    let blowup = ["moments", "--lambda", "2", "--d", "4", "--radius", "6", "--time", "50", "--dt", "2"];
    assert_eq!(code(&blowup), 3);
}
