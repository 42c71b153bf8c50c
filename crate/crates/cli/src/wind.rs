//! Synthetic wind datasets and their CSV form.

use std::path::Path;

use dpgrid_core::dp::rng_from_seed;
use dpgrid_core::wpo::WindDataset;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::WindConfig;
use crate::curve;
use crate::error::{CliError, Result};
use crate::output::{self, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct WindRow {
    speed_ms: f64,
    power_pu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct ReleaseRow {
    speed_ms: f64,
    power_pu_synthetic: f64,
}

/// Uniform speeds, curve output plus Gaussian noise, clipped to [0, 1].
pub fn generate(config: &WindConfig, seed: u64) -> Result<WindDataset> {
    let noise = Normal::new(0.0, config.noise_std).map_err(|e| CliError::Config(format!("wind.noise_std: {e}")))?;
    let mut rng = rng_from_seed(seed);
    let mut speeds = Vec::with_capacity(config.samples);
    let mut power = Vec::with_capacity(config.samples);
    for _ in 0..config.samples {
        let v = rng.random_range(config.speed_min..config.speed_max);
        let p: f64 = curve::power(v) + noise.sample(&mut rng);
        speeds.push(v);
        power.push(p.clamp(0.0, 1.0));
    }
    Ok(WindDataset::new(speeds, power)?)
}

pub fn write_dataset(path: &Path, prov: &Provenance, data: &WindDataset) -> Result<()> {
    let rows: Vec<WindRow> =
        data.speeds.iter().zip(&data.power).map(|(&speed_ms, &power_pu)| WindRow { speed_ms, power_pu }).collect();
    output::write_csv(path, prov, &rows)
}

pub fn read_dataset(path: &Path) -> Result<WindDataset> {
    let rows: Vec<WindRow> = output::read_csv(path)?;
    let (speeds, power) = rows.into_iter().map(|r| (r.speed_ms, r.power_pu)).unzip();
    WindDataset::new(speeds, power).map_err(|e| CliError::Run(format!("{}: {e}", path.display())))
}

pub fn write_release(path: &Path, prov: &Provenance, speeds: &[f64], power: &[f64]) -> Result<()> {
    let rows: Vec<ReleaseRow> = speeds
        .iter()
        .zip(power)
        .map(|(&speed_ms, &power_pu_synthetic)| ReleaseRow { speed_ms, power_pu_synthetic })
        .collect();
    output::write_csv(path, prov, &rows)
}
