//! The run configuration: one TOML file covering every subcommand.
//!
//! Every field has a default, so an empty file is a valid desk-scale
//! configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use dpgrid_core::dp::NoiseMode;
use dpgrid_core::regression::{FeatureSpec, DEFAULT_LAMBDA};
use dpgrid_core::tco::PostprocessOptions;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curve;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Base seed; replication `r` uses `seed ^ r`.
    pub seed: u64,
    /// Worker threads for replications.
    pub jobs: usize,
    pub out: PathBuf,
    /// Disables every noise draw. Releases made this way are not private.
    pub unsafe_noise_off: bool,
    pub wind: WindConfig,
    pub features: FeatureConfig,
    pub wpo: WpoExperiment,
    pub tco: TcoExperiment,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            jobs: 1,
            out: PathBuf::from("out"),
            unsafe_noise_off: false,
            wind: WindConfig::default(),
            features: FeatureConfig::default(),
            wpo: WpoExperiment::default(),
            tco: TcoExperiment::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindConfig {
    pub samples: usize,
    pub speed_min: f64,
    pub speed_max: f64,
    /// Standard deviation of the Gaussian perturbation, in per-unit power.
    pub noise_std: f64,
}

impl Default for WindConfig {
    fn default() -> Self {
        Self { samples: 1000, speed_min: 2.5, speed_max: 12.5, noise_std: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub centers: Vec<f64>,
    pub width: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        let spec = FeatureSpec::wind();
        Self { centers: spec.centers, width: spec.width }
    }
}

impl FeatureConfig {
    pub fn spec(&self) -> Result<FeatureSpec> {
        FeatureSpec::new(self.centers.clone(), self.width).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WpoExperiment {
    /// Wind CSV to release. Absent means a dataset generated from `[wind]`.
    pub dataset: Option<PathBuf>,
    pub epsilon: f64,
    /// Adjacency radii as fractions of nameplate output (0.15 is 15%).
    pub alpha_grid: Vec<f64>,
    pub replications: usize,
    pub lambda: f64,
    pub gamma_beta: f64,
    pub gamma_y: f64,
}

impl Default for WpoExperiment {
    fn default() -> Self {
        Self {
            dataset: None,
            epsilon: 1.0,
            alpha_grid: vec![0.05, 0.15, 0.30],
            replications: 50,
            lambda: DEFAULT_LAMBDA,
            gamma_beta: 1e-5,
            gamma_y: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TcoExperiment {
    /// Network case JSON. Absent means the bundled 6-bus case.
    pub case: Option<PathBuf>,
    /// Case used by `--full-scale`; no default ships with the repository.
    pub full_scale_case: Option<PathBuf>,
    /// Multiplier on every line rating before sampling.
    pub capacity_factor: f64,
    pub population: usize,
    /// Seed of the public population. Absent means the base seed.
    pub population_seed: Option<u64>,
    pub spread: f64,
    pub cost_min: f64,
    pub cost_max: f64,
    pub sample_p_min: bool,
    pub epsilon: f64,
    /// Adjacency radii in MW.
    pub alpha_grid: Vec<f64>,
    /// Iteration counts `T` to sweep.
    pub iterations: Vec<usize>,
    pub replications: usize,
    pub psi: f64,
    pub postprocess: PostprocessConfig,
}

impl Default for TcoExperiment {
    fn default() -> Self {
        Self {
            case: None,
            full_scale_case: None,
            capacity_factor: 0.6,
            population: 100,
            population_seed: None,
            spread: 0.125,
            cost_min: 80.0,
            cost_max: 100.0,
            sample_p_min: false,
            epsilon: 1.0,
            alpha_grid: vec![5.0, 15.0, 30.0],
            iterations: vec![1, 5],
            replications: 30,
            psi: 3000.0,
            postprocess: PostprocessConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PostprocessConfig {
    /// Initial dual bound; absent means ψ.
    pub dual_bound: Option<f64>,
    pub max_escalations: usize,
    pub max_nodes: usize,
    pub relative_gap: f64,
    pub dual_weight: f64,
}

impl Default for PostprocessConfig {
    fn default() -> Self {
        let d = PostprocessOptions::default();
        Self {
            dual_bound: d.dual_bound,
            max_escalations: d.max_escalations,
            max_nodes: d.max_nodes,
            relative_gap: d.relative_gap,
            dual_weight: d.dual_weight,
        }
    }
}

impl PostprocessConfig {
    pub fn options(&self) -> PostprocessOptions {
        PostprocessOptions {
            dual_bound: self.dual_bound,
            max_escalations: self.max_escalations,
            max_nodes: self.max_nodes,
            relative_gap: self.relative_gap,
            dual_weight: self.dual_weight,
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    check(v.is_finite() && v > 0.0, || format!("{name} must be finite and positive, got {v}"))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("every config field is TOML-representable")
    }

    pub fn validate(&self) -> Result<()> {
        check(self.jobs >= 1, || "jobs must be at least 1".into())?;

        let w = &self.wind;
        check(w.samples >= 2, || format!("wind.samples must be at least 2, got {}", w.samples))?;
        let (lo, hi) = curve::DOMAIN;
        check(lo <= w.speed_min && w.speed_min < w.speed_max && w.speed_max <= hi, || {
            format!("wind speed range [{}, {}] must be increasing and inside [{lo}, {hi}] m/s", w.speed_min, w.speed_max)
        })?;
        check(w.noise_std.is_finite() && w.noise_std >= 0.0, || "wind.noise_std must be finite and >= 0".into())?;
        self.features.spec()?;

        let p = &self.wpo;
        positive("wpo.epsilon", p.epsilon)?;
        positive("wpo.lambda", p.lambda)?;
        check(!p.alpha_grid.is_empty(), || "wpo.alpha_grid is empty".into())?;
        for &a in &p.alpha_grid {
            positive("wpo.alpha_grid entry", a)?;
        }
        check(p.replications >= 1, || "wpo.replications must be at least 1".into())?;
        for (name, g) in [("wpo.gamma_beta", p.gamma_beta), ("wpo.gamma_y", p.gamma_y)] {
            check(g.is_finite() && g >= 0.0, || format!("{name} must be finite and >= 0"))?;
        }

        let t = &self.tco;
        positive("tco.capacity_factor", t.capacity_factor)?;
        check(t.population >= 1, || "tco.population must be at least 1".into())?;
        check(t.spread.is_finite() && (0.0..1.0).contains(&t.spread), || "tco.spread must lie in [0, 1)".into())?;
        positive("tco.cost_min", t.cost_min)?;
        check(t.cost_min <= t.cost_max && t.cost_max.is_finite(), || "tco.cost_min must not exceed tco.cost_max".into())?;
        positive("tco.epsilon", t.epsilon)?;
        check(!t.alpha_grid.is_empty(), || "tco.alpha_grid is empty".into())?;
        for &a in &t.alpha_grid {
            positive("tco.alpha_grid entry", a)?;
        }
        check(!t.iterations.is_empty() && t.iterations.iter().all(|&k| k >= 1), || {
            "tco.iterations must be a non-empty list of counts >= 1".into()
        })?;
        check(t.replications >= 1, || "tco.replications must be at least 1".into())?;
        positive("tco.psi", t.psi)?;
        check(t.psi > t.cost_max, || format!("tco.psi = {} must exceed tco.cost_max = {}", t.psi, t.cost_max))?;
        let pp = &t.postprocess;
        if let Some(m) = pp.dual_bound {
            positive("tco.postprocess.dual_bound", m)?;
        }
        check(pp.max_nodes >= 1, || "tco.postprocess.max_nodes must be at least 1".into())?;
        for (name, v) in [("relative_gap", pp.relative_gap), ("dual_weight", pp.dual_weight)] {
            check(v.is_finite() && v >= 0.0, || format!("tco.postprocess.{name} must be finite and >= 0"))?;
        }
        Ok(())
    }

    /// Switches to the full-size profile: 300 replications, 1000 instances,
    /// α from 5 to 30 MW in steps of 5 and `T` from 1 to 10.
    pub fn apply_full_scale(&mut self) -> Result<()> {
        let case = self.tco.full_scale_case.clone().ok_or_else(|| {
            CliError::Config("--full-scale needs tco.full_scale_case; no full-size case is bundled".into())
        })?;
        self.tco.case = Some(case);
        self.tco.population = 1000;
        self.tco.replications = 300;
        self.tco.alpha_grid = (1..=6).map(|k| 5.0 * k as f64).collect();
        self.tco.iterations = (1..=10).collect();
        self.wpo.replications = 300;
        self.validate()
    }

    pub fn noise(&self) -> NoiseMode {
        if self.unsafe_noise_off {
            NoiseMode::Off
        } else {
            NoiseMode::Live
        }
    }

    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = RunConfig::default();
        cfg.tco.case = Some("case.json".into());
        cfg.wpo.alpha_grid = vec![0.3];
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_and_invalid_fields() {
        for text in [
            "bogus = 1",
            "[wpo]\nepsilon = 0.0",
            "[wind]\nspeed_min = 13.0",
            "[wind]\nspeed_max = 40.0",
            "[tco]\niterations = []",
            "[tco]\npsi = 90.0",
            "jobs = 0",
            "[features]\ncenters = [2.0, 1.0]",
        ] {
            assert!(matches!(RunConfig::from_toml(text), Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn hash_tracks_every_field() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.tco.replications += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), RunConfig::default().hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn full_scale_needs_a_case() {
        let mut cfg = RunConfig::default();
        assert!(matches!(cfg.apply_full_scale(), Err(CliError::Config(_))));
        cfg.tco.full_scale_case = Some("rts73.json".into());
        cfg.apply_full_scale().unwrap();
        assert_eq!(cfg.tco.iterations.len(), 10);
        assert_eq!(cfg.tco.alpha_grid, [5.0, 10.0, 15.0, 20.0, 25.0, 30.0]);
    }
}
