//! The wind-release experiment: WPO against the Laplace baseline over an
//! α grid and seeded replications.

use std::path::{Path, PathBuf};

use dpgrid_core::dp::{derive_seed, AdjacencyParam, NoiseSource, PrivacyLedger};
use dpgrid_core::regression::{rbf_features, FeatureSpec, RidgeSystem};
use dpgrid_core::wpo::{laplace_baseline, wpo_release, SyntheticWindRelease, WindDataset, WpoConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{self, Provenance};
use crate::stats::summarize;
use crate::wind;

pub const REAL: &str = "real";
pub const LAPLACE: &str = "laplace";
pub const WPO: &str = "wpo";

/// One replication of one method. Failed replications keep their row with
/// `failure` set and no measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpoRunRow {
    pub alpha: f64,
    pub method: String,
    pub replication: usize,
    pub seed: u64,
    /// Ridge loss refitted on the released targets.
    pub loss: Option<f64>,
    pub in_unit_box: Option<bool>,
    pub weight_residual: Option<f64>,
    pub loss_residual: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpoSummaryRow {
    pub alpha: f64,
    pub method: String,
    pub runs: usize,
    pub failures: usize,
    pub mean_loss: Option<f64>,
    pub std_loss: Option<f64>,
    pub p05: Option<f64>,
    pub p95: Option<f64>,
}

pub struct WpoSweep {
    pub real_loss: f64,
    /// Sorted by (α, method, seed).
    pub runs: Vec<WpoRunRow>,
    /// The replication-0 WPO release of every α that succeeded.
    pub releases: Vec<SyntheticWindRelease>,
}

fn wpo_config(cfg: &RunConfig, alpha: f64, seed: u64) -> WpoConfig {
    WpoConfig {
        epsilon: cfg.wpo.epsilon,
        alpha,
        lambda: cfg.wpo.lambda,
        gamma_beta: cfg.wpo.gamma_beta,
        gamma_y: cfg.wpo.gamma_y,
        seed,
        noise: cfg.noise(),
        allow_noise_off: cfg.unsafe_noise_off,
    }
}

fn failed(alpha: f64, method: &str, replication: usize, seed: u64, err: impl ToString) -> WpoRunRow {
    WpoRunRow {
        alpha,
        method: method.into(),
        replication,
        seed,
        loss: None,
        in_unit_box: None,
        weight_residual: None,
        loss_residual: None,
        failure: Some(err.to_string()),
    }
}

fn baseline_run(
    data: &WindDataset,
    system: &RidgeSystem,
    cfg: &RunConfig,
    alpha: f64,
    replication: usize,
    seed: u64,
) -> WpoRunRow {
    let run = || -> dpgrid_core::Result<(f64, bool)> {
        let mut noise = NoiseSource::new(seed, cfg.noise());
        noise.guard(cfg.unsafe_noise_off)?;
        let mut ledger = PrivacyLedger::new();
        let y = laplace_baseline(&data.power, AdjacencyParam::new(alpha)?, cfg.wpo.epsilon, &mut noise, &mut ledger)?;
        Ok((system.fit(&y)?.loss, y.iter().all(|v| (0.0..=1.0).contains(v))))
    };
    match run() {
        Ok((loss, inside)) => WpoRunRow {
            alpha,
            method: LAPLACE.into(),
            replication,
            seed,
            loss: Some(loss),
            in_unit_box: Some(inside),
            weight_residual: None,
            loss_residual: None,
            failure: None,
        },
        Err(e) => failed(alpha, LAPLACE, replication, seed, e),
    }
}

fn wpo_run(
    data: &WindDataset,
    spec: &FeatureSpec,
    cfg: &RunConfig,
    alpha: f64,
    replication: usize,
    seed: u64,
) -> (WpoRunRow, Option<SyntheticWindRelease>) {
    match wpo_release(data, spec, &wpo_config(cfg, alpha, seed)) {
        Ok(rel) => {
            let row = WpoRunRow {
                alpha,
                method: WPO.into(),
                replication,
                seed,
                loss: Some(rel.diagnostics.synthetic_loss),
                in_unit_box: Some(rel.power.iter().all(|v| (0.0..=1.0).contains(v))),
                weight_residual: Some(rel.diagnostics.weight_residual),
                loss_residual: Some(rel.diagnostics.loss_residual),
                failure: None,
            };
            (row, Some(rel))
        }
        Err(e) => (failed(alpha, WPO, replication, seed, e), None),
    }
}

/// Runs every (α, replication) pair on `pool`. Replication `r` of both
/// methods uses seed `cfg.seed ^ r`.
pub fn sweep(data: &WindDataset, cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<WpoSweep> {
    let spec = cfg.features.spec()?;
    let system = RidgeSystem::new(rbf_features(&data.speeds, &spec)?, cfg.wpo.lambda)?;
    let real_loss = system.fit(&data.power)?.loss;

    let jobs: Vec<(f64, usize)> =
        cfg.wpo.alpha_grid.iter().flat_map(|&a| (0..cfg.wpo.replications).map(move |r| (a, r))).collect();
    let results: Vec<(WpoRunRow, WpoRunRow, Option<SyntheticWindRelease>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(alpha, r)| {
                let seed = derive_seed(cfg.seed, r as u64);
                let base = baseline_run(data, &system, cfg, alpha, r, seed);
                let (row, rel) = wpo_run(data, &spec, cfg, alpha, r, seed);
                (base, row, if r == 0 { rel } else { None })
            })
            .collect()
    });

    let mut runs = Vec::with_capacity(2 * results.len());
    let mut releases = Vec::new();
    for (base, row, rel) in results {
        runs.push(base);
        runs.push(row);
        releases.extend(rel);
    }
    runs.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then_with(|| a.method.cmp(&b.method)).then(a.seed.cmp(&b.seed)));
    releases.sort_by(|a, b| a.config.alpha.total_cmp(&b.config.alpha));
    Ok(WpoSweep { real_loss, runs, releases })
}

/// One row per (α, method), including the real-data loss as a reference.
pub fn summarize_runs(sweep: &WpoSweep, alpha_grid: &[f64]) -> Vec<WpoSummaryRow> {
    let mut rows = Vec::new();
    for &alpha in alpha_grid {
        let l = sweep.real_loss;
        rows.push(WpoSummaryRow {
            alpha,
            method: REAL.into(),
            runs: 1,
            failures: 0,
            mean_loss: Some(l),
            std_loss: Some(0.0),
            p05: Some(l),
            p95: Some(l),
        });
        for method in [LAPLACE, WPO] {
            let cell: Vec<&WpoRunRow> = sweep.runs.iter().filter(|r| r.alpha == alpha && r.method == method).collect();
            let losses: Vec<f64> = cell.iter().filter_map(|r| r.loss).collect();
            let s = summarize(&losses);
            rows.push(WpoSummaryRow {
                alpha,
                method: method.into(),
                runs: cell.len(),
                failures: cell.len() - losses.len(),
                mean_loss: s.map(|s| s.mean),
                std_loss: s.map(|s| s.std),
                p05: s.map(|s| s.p05),
                p95: s.map(|s| s.p95),
            });
        }
    }
    rows
}

#[derive(Serialize)]
struct Sidecar<'a> {
    ledger: &'a PrivacyLedger,
    ell_bar: f64,
    beta_bar: &'a [f64],
    diagnostics: &'a dpgrid_core::wpo::WpoDiagnostics,
    config: &'a WpoConfig,
    features: &'a FeatureSpec,
    run_config: &'a RunConfig,
    seed: u64,
}

pub struct WpoOutcome {
    pub dir: PathBuf,
    pub sweep: WpoSweep,
    pub summary: Vec<WpoSummaryRow>,
}

/// Loads or generates the dataset, runs the sweep and writes everything
/// under `<out>/wpo`.
pub fn run(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<WpoOutcome> {
    let dir = cfg.out.join("wpo");
    output::create_dir(&dir.join("releases"))?;
    let prov = Provenance::new(cfg, cfg.seed);
    output::write_text(&dir.join("config.toml"), &format!("{}\n{}", prov.line(), cfg.to_toml()))?;
    let data = match &cfg.wpo.dataset {
        Some(path) => wind::read_dataset(path)?,
        None => {
            let data = wind::generate(&cfg.wind, cfg.seed)?;
            wind::write_dataset(&dir.join("dataset.csv"), &prov, &data)?;
            data
        }
    };
    let sweep = sweep(&data, cfg, pool)?;
    let summary = summarize_runs(&sweep, &cfg.wpo.alpha_grid);
    output::write_csv(&dir.join("runs.csv"), &prov, &sweep.runs)?;
    output::write_csv(&dir.join("summary.csv"), &prov, &summary)?;
    for rel in &sweep.releases {
        write_release(&dir.join("releases"), cfg, rel)?;
    }
    Ok(WpoOutcome { dir, sweep, summary })
}

pub fn write_release(dir: &Path, cfg: &RunConfig, rel: &SyntheticWindRelease) -> Result<()> {
    let seed = rel.config.seed;
    let prov = Provenance::new(cfg, seed);
    let stem = format!("wpo_alpha{}_seed{seed}", output::tag(rel.config.alpha));
    wind::write_release(&dir.join(format!("{stem}.csv")), &prov, &rel.speeds, &rel.power)?;
    let sidecar = Sidecar {
        ledger: &rel.ledger,
        ell_bar: rel.loss_bar,
        beta_bar: &rel.beta_bar,
        diagnostics: &rel.diagnostics,
        config: &rel.config,
        features: &rel.features,
        run_config: cfg,
        seed,
    };
    output::write_json(&dir.join(format!("{stem}.json")), &prov, &sidecar)
}
