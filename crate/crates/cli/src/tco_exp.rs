//! The capacity-release experiment: TCO over an (α, T) grid with seeded
//! replications against one public population.

use std::path::{Path, PathBuf};

use dpgrid_core::dp::{derive_seed, rng_from_seed};
use dpgrid_core::opf::{sample_population, Network, NetworkCase, OpfPopulation, PopulationOptions};
use dpgrid_core::tco::{tco_release, CapacityRelease, TcoConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{self, Provenance};
use crate::stats::summarize;

/// The bundled 6-bus case used when no case file is configured.
pub const BUNDLED_CASE: &str = include_str!("../../../data/case6ww.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcoRunRow {
    pub alpha: f64,
    pub iterations: usize,
    pub replication: usize,
    pub seed: u64,
    pub infeasible_pct: Option<f64>,
    pub suboptimality_pct: Option<f64>,
    /// Some iteration failed and kept its previous capacities.
    pub flagged: bool,
    pub failed_iterations: usize,
    pub nodes: usize,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcoSummaryRow {
    pub alpha: f64,
    pub iterations: usize,
    pub runs: usize,
    pub failures: usize,
    pub flagged: usize,
    pub infeasible_mean: Option<f64>,
    pub infeasible_std: Option<f64>,
    pub infeasible_p05: Option<f64>,
    pub infeasible_p95: Option<f64>,
    pub suboptimality_mean: Option<f64>,
    pub suboptimality_std: Option<f64>,
    pub suboptimality_p05: Option<f64>,
    pub suboptimality_p95: Option<f64>,
}

/// One line of one release, for capacity box plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub alpha: f64,
    pub iterations: usize,
    pub replication: usize,
    pub seed: u64,
    pub line: usize,
    pub from_bus: u32,
    pub to_bus: u32,
    pub real_mw: f64,
    pub released_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ReleasedLine {
    line: usize,
    from_bus: u32,
    to_bus: u32,
    phi_bar_mw: f64,
}

/// The configured case with its ratings scaled by `capacity_factor`.
pub fn load_network(cfg: &RunConfig) -> Result<Network> {
    let text = match &cfg.tco.case {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("case {}: {e}", path.display())))?
        }
        None => BUNDLED_CASE.to_string(),
    };
    let case = NetworkCase::from_json(&text).map_err(|e| CliError::Config(format!("case: {e}")))?;
    let net = Network::from_case(case).map_err(|e| CliError::Config(format!("case: {e}")))?;
    Ok(net.with_scaled_capacities(cfg.tco.capacity_factor)?)
}

/// The public population and the real (scaled) capacities.
pub fn population(cfg: &RunConfig) -> Result<(OpfPopulation, Vec<f64>)> {
    let net = load_network(cfg)?;
    let caps = net.capacities();
    let t = &cfg.tco;
    let opts = PopulationOptions {
        size: t.population,
        spread: t.spread,
        cost_range: (t.cost_min, t.cost_max),
        sample_p_min: t.sample_p_min,
        ..PopulationOptions::default()
    };
    let mut rng = rng_from_seed(t.population_seed.unwrap_or(cfg.seed));
    let pop = sample_population(&net, &caps, &opts, &mut rng)?;
    Ok((pop, caps))
}

pub fn tco_config(cfg: &RunConfig, alpha: f64, iterations: usize, seed: u64) -> TcoConfig {
    TcoConfig {
        epsilon: cfg.tco.epsilon,
        alpha,
        iterations,
        psi: cfg.tco.psi,
        seed,
        noise: cfg.noise(),
        allow_noise_off: cfg.unsafe_noise_off,
        postprocess: cfg.tco.postprocess.options(),
    }
}

pub struct TcoSweep {
    /// Sorted by (α, T, seed).
    pub runs: Vec<TcoRunRow>,
    pub capacities: Vec<CapacityRow>,
    /// The replication-0 release of every (α, T) cell that succeeded.
    pub releases: Vec<CapacityRelease>,
}

/// Runs every (α, T, replication) triple on `pool`. Replication `r` uses
/// seed `cfg.seed ^ r` in every cell.
pub fn sweep(pop: &OpfPopulation, caps: &[f64], cfg: &RunConfig, pool: &rayon::ThreadPool) -> TcoSweep {
    let t = &cfg.tco;
    let mut jobs = Vec::new();
    for &alpha in &t.alpha_grid {
        for &iters in &t.iterations {
            for r in 0..t.replications {
                jobs.push((alpha, iters, r));
            }
        }
    }
    let lines = &pop.network.case().lines;
    let results: Vec<(TcoRunRow, Vec<CapacityRow>, Option<CapacityRelease>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(alpha, iterations, replication)| {
                let seed = derive_seed(cfg.seed, replication as u64);
                match tco_release(pop, caps, &tco_config(cfg, alpha, iterations, seed)) {
                    Ok(rel) => {
                        let failed_iterations = rel.trace.iterations.iter().filter(|it| it.failure.is_some()).count();
                        let nodes = rel.trace.iterations.iter().filter_map(|it| it.postprocess.as_ref()).map(|p| p.nodes).sum();
                        let row = TcoRunRow {
                            alpha,
                            iterations,
                            replication,
                            seed,
                            infeasible_pct: Some(rel.metrics.infeasible_pct),
                            suboptimality_pct: Some(rel.metrics.suboptimality_pct),
                            flagged: rel.flagged,
                            failed_iterations,
                            nodes,
                            failure: None,
                        };
                        let capacities = lines
                            .iter()
                            .enumerate()
                            .map(|(l, line)| CapacityRow {
                                alpha,
                                iterations,
                                replication,
                                seed,
                                line: l,
                                from_bus: line.from,
                                to_bus: line.to,
                                real_mw: caps[l],
                                released_mw: rel.phi_bar[l],
                            })
                            .collect();
                        (row, capacities, (replication == 0).then_some(rel))
                    }
                    Err(e) => {
                        let row = TcoRunRow {
                            alpha,
                            iterations,
                            replication,
                            seed,
                            infeasible_pct: None,
                            suboptimality_pct: None,
                            flagged: false,
                            failed_iterations: 0,
                            nodes: 0,
                            failure: Some(e.to_string()),
                        };
                        (row, Vec::new(), None)
                    }
                }
            })
            .collect()
    });

    let mut runs = Vec::with_capacity(results.len());
    let mut capacities = Vec::new();
    let mut releases = Vec::new();
    for (row, caps, rel) in results {
        runs.push(row);
        capacities.extend(caps);
        releases.extend(rel);
    }
    runs.sort_by(|x, y| x.alpha.total_cmp(&y.alpha).then(x.iterations.cmp(&y.iterations)).then(x.seed.cmp(&y.seed)));
    capacities.sort_by(|x, y| {
        x.alpha.total_cmp(&y.alpha).then(x.iterations.cmp(&y.iterations)).then(x.seed.cmp(&y.seed)).then(x.line.cmp(&y.line))
    });
    releases.sort_by(|x, y| x.config.alpha.total_cmp(&y.config.alpha).then(x.config.iterations.cmp(&y.config.iterations)));
    TcoSweep { runs, capacities, releases }
}

/// One row per (α, T), in grid order.
pub fn summarize_runs(runs: &[TcoRunRow], alpha_grid: &[f64], iterations: &[usize]) -> Vec<TcoSummaryRow> {
    let mut rows = Vec::new();
    for &alpha in alpha_grid {
        for &t in iterations {
            let cell: Vec<&TcoRunRow> = runs.iter().filter(|r| r.alpha == alpha && r.iterations == t).collect();
            let inf: Vec<f64> = cell.iter().filter_map(|r| r.infeasible_pct).collect();
            let sub: Vec<f64> = cell.iter().filter_map(|r| r.suboptimality_pct).collect();
            let (si, ss) = (summarize(&inf), summarize(&sub));
            rows.push(TcoSummaryRow {
                alpha,
                iterations: t,
                runs: cell.len(),
                failures: cell.iter().filter(|r| r.failure.is_some()).count(),
                flagged: cell.iter().filter(|r| r.flagged).count(),
                infeasible_mean: si.map(|s| s.mean),
                infeasible_std: si.map(|s| s.std),
                infeasible_p05: si.map(|s| s.p05),
                infeasible_p95: si.map(|s| s.p95),
                suboptimality_mean: ss.map(|s| s.mean),
                suboptimality_std: ss.map(|s| s.std),
                suboptimality_p05: ss.map(|s| s.p05),
                suboptimality_p95: ss.map(|s| s.p95),
            });
        }
    }
    rows
}

#[derive(Serialize)]
struct ReleaseDocument<'a> {
    #[serde(flatten)]
    release: &'a CapacityRelease,
    run_config: &'a RunConfig,
}

pub struct TcoOutcome {
    pub dir: PathBuf,
    pub sweep: TcoSweep,
    pub summary: Vec<TcoSummaryRow>,
}

/// Samples the population, runs the sweep and writes everything under
/// `<out>/tco`.
pub fn run(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<TcoOutcome> {
    let (pop, caps) = population(cfg)?;
    let dir = cfg.out.join("tco");
    output::create_dir(&dir.join("releases"))?;
    let prov = Provenance::new(cfg, cfg.seed);
    output::write_text(&dir.join("config.toml"), &format!("{}\n{}", prov.line(), cfg.to_toml()))?;
    let sweep = sweep(&pop, &caps, cfg, pool);
    let summary = summarize_runs(&sweep.runs, &cfg.tco.alpha_grid, &cfg.tco.iterations);
    output::write_csv(&dir.join("runs.csv"), &prov, &sweep.runs)?;
    output::write_csv(&dir.join("summary.csv"), &prov, &summary)?;
    output::write_csv(&dir.join("capacities.csv"), &prov, &sweep.capacities)?;
    for rel in &sweep.releases {
        write_release(&dir.join("releases"), cfg, &pop.network, rel)?;
    }
    Ok(TcoOutcome { dir, sweep, summary })
}

pub fn write_release(dir: &Path, cfg: &RunConfig, net: &Network, rel: &CapacityRelease) -> Result<()> {
    let prov = Provenance::new(cfg, rel.seed);
    let stem = format!("tco_alpha{}_T{}_seed{}", output::tag(rel.config.alpha), rel.config.iterations, rel.seed);
    let lines: Vec<ReleasedLine> = net
        .case()
        .lines
        .iter()
        .enumerate()
        .map(|(l, line)| ReleasedLine { line: l, from_bus: line.from, to_bus: line.to, phi_bar_mw: rel.phi_bar[l] })
        .collect();
    output::write_csv(&dir.join(format!("{stem}.csv")), &prov, &lines)?;
    output::write_json(&dir.join(format!("{stem}.json")), &prov, &ReleaseDocument { release: rel, run_config: cfg })
}
