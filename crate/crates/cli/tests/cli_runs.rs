use std::path::Path;
use std::process::Command;

use dpgrid_cli::output::read_csv;
use dpgrid_cli::stats::summarize;
use dpgrid_cli::tco_exp::{TcoRunRow, TcoSummaryRow};
use dpgrid_cli::wpo_exp::{WpoRunRow, WpoSummaryRow};

fn dpgrid(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dpgrid")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_WPO: &str = "
[wind]
samples = 120

[wpo]
alpha_grid = [0.15, 0.3]
replications = 3
";

const SMALL_TCO: &str = "
[tco]
population = 8
alpha_grid = [5.0, 15.0]
iterations = [1, 2]
replications = 2
";

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
        (None, None) => true,
        _ => false,
    }
}

#[test]
fn gen_wind_writes_the_documented_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = dpgrid(&["gen-wind", "--out", out, "--seed", "4"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(dir.path().join("wind.csv")).unwrap();
    let mut lines = text.lines();
    let prov = lines.next().unwrap();
    assert!(prov.starts_with("# dpgrid ") && prov.contains("config_sha256=") && prov.ends_with("seed=4"));
    assert_eq!(lines.next(), Some("speed_ms,power_pu"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 1000);
    assert!(rows.iter().all(|&(v, p)| (2.5..12.5).contains(&v) && (0.0..=1.0).contains(&p)));
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for text in ["unknown_key = 1", "[tco]\npsi = 50.0", "[wind]\nspeed_min = -3.0", "not toml ["] {
        let cfg = write_config(dir.path(), text);
        let res = dpgrid(&["run-wpo", "--config", &cfg, "--out", out]);
        assert_eq!(res.status.code(), Some(2), "{text}");
    }
    let res = dpgrid(&["run-tco", "--config", "/nonexistent/run.toml", "--out", out]);
    assert_eq!(res.status.code(), Some(2));
    let cfg = write_config(dir.path(), "[tco]\ncase = \"/nonexistent/case.json\"");
    assert_eq!(dpgrid(&["run-tco", "--config", &cfg, "--out", out]).status.code(), Some(2));
    assert_eq!(dpgrid(&["run-tco", "--full-scale", "--out", out]).status.code(), Some(2));
    assert_eq!(dpgrid(&["run-wpo", "--jobs", "0", "--out", out]).status.code(), Some(2));
}

#[test]
fn run_failures_exit_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "speed_ms,power_pu\n5.0,1.5\n").unwrap();
    let cfg = write_config(dir.path(), &format!("[wpo]\ndataset = \"{}\"", bad.display()));
    assert_eq!(dpgrid(&["run-wpo", "--config", &cfg, "--out", out]).status.code(), Some(1));
}

#[test]
fn wpo_runs_are_reproducible_and_aggregates_recompute() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_WPO);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "2")] {
        let res = dpgrid(&["run-wpo", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let runs_a = std::fs::read(a.join("wpo/runs.csv")).unwrap();
    let runs_b = std::fs::read(b.join("wpo/runs.csv")).unwrap();
    // Job count and output directory are part of the config hash; compare
    // everything after the provenance line.
    let body = |v: &[u8]| v.splitn(2, |&c| c == b'\n').nth(1).unwrap().to_vec();
    assert_eq!(body(&runs_a), body(&runs_b));

    let runs: Vec<WpoRunRow> = read_csv(&a.join("wpo/runs.csv")).unwrap();
    let summary: Vec<WpoSummaryRow> = read_csv(&a.join("wpo/summary.csv")).unwrap();
    assert_eq!(runs.len(), 2 * 2 * 3);
    assert_eq!(summary.len(), 2 * 3);
    assert!(runs.iter().all(|r| r.failure.is_none()));
    for row in summary.iter().filter(|r| r.method != "real") {
        let losses: Vec<f64> =
            runs.iter().filter(|r| r.alpha == row.alpha && r.method == row.method).filter_map(|r| r.loss).collect();
        let s = summarize(&losses).unwrap();
        assert_eq!(row.runs, 3);
        assert!(close(row.mean_loss, Some(s.mean)) && close(row.std_loss, Some(s.std)));
        assert!(close(row.p05, Some(s.p05)) && close(row.p95, Some(s.p95)));
    }
    let real: Vec<&WpoSummaryRow> = summary.iter().filter(|r| r.method == "real").collect();
    assert_eq!(real.len(), 2);
    assert_eq!(real[0].mean_loss, real[1].mean_loss);

    let releases = a.join("wpo/releases");
    let csv = std::fs::read_to_string(releases.join("wpo_alpha0.15_seed1.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("speed_ms,power_pu_synthetic"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(releases.join("wpo_alpha0.15_seed1.json")).unwrap()).unwrap();
    for key in ["ledger", "ell_bar", "beta_bar", "diagnostics", "config", "seed", "provenance", "run_config"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["ledger"]["total"], 1.0);
    assert_eq!(json["provenance"]["seed"], 1);
}

#[test]
fn tco_runs_are_reproducible_and_aggregates_recompute() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_TCO);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let res = dpgrid(&["run-tco", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "9"]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    // The output directory is part of the config hash; compare after the provenance line.
    let body = |v: Vec<u8>| v.splitn(2, |&c| c == b'\n').nth(1).unwrap().to_vec();
    for file in ["runs.csv", "summary.csv", "capacities.csv"] {
        let read = |dir: &Path| body(std::fs::read(dir.join("tco").join(file)).unwrap());
        assert_eq!(read(&a), read(&b), "{file}");
    }
    let runs: Vec<TcoRunRow> = read_csv(&a.join("tco/runs.csv")).unwrap();
    let summary: Vec<TcoSummaryRow> = read_csv(&a.join("tco/summary.csv")).unwrap();
    assert_eq!(runs.len(), 2 * 2 * 2);
    assert_eq!(summary.len(), 2 * 2);
    for row in &summary {
        let cell: Vec<&TcoRunRow> = runs.iter().filter(|r| r.alpha == row.alpha && r.iterations == row.iterations).collect();
        let inf: Vec<f64> = cell.iter().filter_map(|r| r.infeasible_pct).collect();
        let sub: Vec<f64> = cell.iter().filter_map(|r| r.suboptimality_pct).collect();
        let (si, ss) = (summarize(&inf).unwrap(), summarize(&sub).unwrap());
        assert!(close(row.infeasible_mean, Some(si.mean)) && close(row.infeasible_std, Some(si.std)));
        assert!(close(row.infeasible_p05, Some(si.p05)) && close(row.infeasible_p95, Some(si.p95)));
        assert!(close(row.suboptimality_mean, Some(ss.mean)) && close(row.suboptimality_std, Some(ss.std)));
        assert!(close(row.suboptimality_p05, Some(ss.p05)) && close(row.suboptimality_p95, Some(ss.p95)));
    }
    let caps = std::fs::read_to_string(a.join("tco/capacities.csv")).unwrap();
    assert_eq!(caps.lines().count(), 2 + 8 * 11);

    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(a.join("tco/releases/tco_alpha5_T2_seed9.json")).unwrap(),
    )
    .unwrap();
    for key in ["phi_bar", "trace", "ledger", "metrics", "config", "seed", "flagged", "provenance"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["ledger"]["entries"].as_array().unwrap().len(), 5);
    let phi = std::fs::read_to_string(a.join("tco/releases/tco_alpha5_T2_seed9.csv")).unwrap();
    assert_eq!(phi.lines().nth(1), Some("line,from_bus,to_bus,phi_bar_mw"));
}

#[test]
fn noise_off_is_explicit_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_WPO);
    let out = dir.path().join("off");
    let res = dpgrid(&["run-wpo", "--config", &cfg, "--out", out.to_str().unwrap(), "--unsafe-noise-off"]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("noise is off"));
    let echoed = std::fs::read_to_string(out.join("wpo/config.toml")).unwrap();
    assert!(echoed.contains("unsafe_noise_off = true"));
    // Without noise the baseline reproduces the real targets; only the
    // replication mean can round differently.
    let summary: Vec<WpoSummaryRow> = read_csv(&out.join("wpo/summary.csv")).unwrap();
    let real = summary.iter().find(|r| r.method == "real").unwrap().mean_loss;
    let lap = summary.iter().find(|r| r.method == "laplace").unwrap().mean_loss;
    assert!(close(real, lap), "{real:?} vs {lap:?}");
}
