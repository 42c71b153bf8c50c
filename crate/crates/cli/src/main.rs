use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpgrid_cli::output::{self, Provenance};
use dpgrid_cli::{acceptance, tco_exp, wind, wpo_exp, Result, RunConfig};

/// Differentially private synthetic wind and transmission-capacity releases.
#[derive(Parser)]
#[command(name = "dpgrid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic wind dataset to `<out>/wind.csv`.
    GenWind(Common),
    /// WPO against the Laplace baseline over the α grid.
    RunWpo(Common),
    /// TCO over the (α, T) grid.
    RunTco(Common),
    /// Run the acceptance suite and report measured against expected values.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults apply to anything left out.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for replications.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full-size profile; needs `tco.full_scale_case` in the config.
    #[arg(long)]
    full_scale: bool,
    /// Turn every noise draw off. The outputs are not private.
    #[arg(long)]
    unsafe_noise_off: bool,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(jobs) = self.jobs {
            cfg.jobs = jobs;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        cfg.unsafe_noise_off |= self.unsafe_noise_off;
        if self.full_scale {
            cfg.apply_full_scale()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn gen_wind(cfg: &RunConfig) -> Result<()> {
    output::create_dir(&cfg.out)?;
    let data = wind::generate(&cfg.wind, cfg.seed)?;
    let path = cfg.out.join("wind.csv");
    wind::write_dataset(&path, &Provenance::new(cfg, cfg.seed), &data)?;
    println!("wrote {} records to {}", data.len(), path.display());
    Ok(())
}

fn run_wpo(cfg: &RunConfig) -> Result<()> {
    let out = wpo_exp::run(cfg, &dpgrid_cli::pool(cfg.jobs)?)?;
    println!("alpha,method,runs,failures,mean_loss,p05,p95");
    for r in &out.summary {
        let f = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.4}"));
        println!("{},{},{},{},{},{},{}", r.alpha, r.method, r.runs, r.failures, f(r.mean_loss), f(r.p05), f(r.p95));
    }
    println!("outputs in {}", out.dir.display());
    let failed = out.sweep.runs.iter().filter(|r| r.failure.is_some()).count();
    if failed > 0 {
        eprintln!("warning: {failed} replications failed; see runs.csv");
    }
    Ok(())
}

fn run_tco(cfg: &RunConfig) -> Result<()> {
    let out = tco_exp::run(cfg, &dpgrid_cli::pool(cfg.jobs)?)?;
    println!("alpha,T,runs,failures,flagged,infeasible_mean,suboptimality_mean");
    for r in &out.summary {
        let f = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.3}"));
        println!(
            "{},{},{},{},{},{},{}",
            r.alpha,
            r.iterations,
            r.runs,
            r.failures,
            r.flagged,
            f(r.infeasible_mean),
            f(r.suboptimality_mean)
        );
    }
    println!("outputs in {}", out.dir.display());
    Ok(())
}

fn verify(cfg: &RunConfig) -> Result<()> {
    let reports = acceptance::run_all(cfg, &dpgrid_cli::pool(cfg.jobs)?, |r| println!("{}", r.line()));
    let dir = cfg.out.join("verify");
    output::create_dir(&dir)?;
    #[derive(serde::Serialize)]
    struct Report<'a> {
        criteria: &'a [acceptance::CriterionReport],
        all_passed: bool,
        run_config: &'a RunConfig,
    }
    let all_passed = reports.iter().all(|r| r.passed);
    let doc = Report { criteria: &reports, all_passed, run_config: cfg };
    output::write_json(&dir.join("report.json"), &Provenance::new(cfg, cfg.seed), &doc)?;
    println!("{} of {} checks passed; report in {}", reports.iter().filter(|r| r.passed).count(), reports.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&RunConfig) -> Result<()>) = match &cli.command {
        Command::GenWind(c) => (c, gen_wind),
        Command::RunWpo(c) => (c, run_wpo),
        Command::RunTco(c) => (c, run_tco),
        Command::Verify(c) => (c, verify),
    };
    if common.unsafe_noise_off {
        eprintln!("warning: noise is off; nothing written by this run is differentially private");
    }
    match common.resolve().and_then(|cfg| run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
        }
    }
}
