//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;

use dpgrid_cli::{acceptance, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let pool = dpgrid_cli::pool(cfg.jobs).expect("worker pool");
    let reports = acceptance::run_all(&cfg, &pool, |r| println!("{}", r.line()));
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", reports.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
