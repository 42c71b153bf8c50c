//! Wind-power obfuscation: a private synthetic copy of a power-curve dataset
//! whose ridge fit stays close to the original one.
//!
//! Three Laplace queries touch the real targets: the targets themselves, the
//! ridge loss and the ridge weights. Everything after [`wpo_privatize`] sees
//! only their noisy outputs and public inputs, so [`wpo_postprocess`] is
//! post-processing and spends no budget.

use dpgrid_solver::{AffineExpr, ConicProgram, LinearProgram, Sense, Status};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dp::{
    laplace_mechanism, split_budget_wpo, AdjacencyParam, BudgetSplit, NoiseMode, NoiseSource,
    PrivacyLedger,
};
use crate::error::{positive, Error, Result};
use crate::regression::{rbf_features, FeatureSpec, RidgeSystem, DEFAULT_LAMBDA};

/// Wind speeds (public) and normalized power outputs (private, in `[0, 1]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindDataset {
    pub speeds: Vec<f64>,
    pub power: Vec<f64>,
}

impl WindDataset {
    pub fn new(speeds: Vec<f64>, power: Vec<f64>) -> Result<Self> {
        if speeds.len() != power.len() {
            return Err(Error::Dimension(format!(
                "{} speeds but {} power values",
                speeds.len(),
                power.len()
            )));
        }
        if speeds.is_empty() {
            return Err(Error::Dimension("dataset is empty".into()));
        }
        if speeds.iter().any(|s| !s.is_finite()) {
            return Err(Error::Parameter("wind speeds must be finite".into()));
        }
        if let Some(p) = power.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Parameter(format!("power values must lie in [0, 1], got {p}")));
        }
        Ok(Self { speeds, power })
    }

    pub fn len(&self) -> usize {
        self.speeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeds.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpoConfig {
    pub epsilon: f64,
    /// Adjacency radius in power units (0.15 means 15% of rated output).
    pub alpha: f64,
    pub lambda: f64,
    pub gamma_beta: f64,
    pub gamma_y: f64,
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseMode,
    /// Must be set for [`NoiseMode::Off`] to be accepted.
    #[serde(default)]
    pub allow_noise_off: bool,
}

impl Default for WpoConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            alpha: 0.15,
            lambda: DEFAULT_LAMBDA,
            gamma_beta: 1e-5,
            gamma_y: 1e-5,
            seed: 0,
            noise: NoiseMode::Live,
            allow_noise_off: false,
        }
    }
}

impl WpoConfig {
    pub fn validate(&self) -> Result<()> {
        positive("epsilon", self.epsilon)?;
        positive("alpha", self.alpha)?;
        positive("lambda", self.lambda)?;
        for (name, g) in [("gamma_beta", self.gamma_beta), ("gamma_y", self.gamma_y)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::Parameter(format!("{name} must be finite and >= 0, got {g}")));
            }
        }
        Ok(())
    }
}

/// The noisy query answers, the only inputs post-processing may read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivatizedWindInputs {
    pub y0: Vec<f64>,
    pub loss_bar: f64,
    pub beta_bar: Vec<f64>,
}

/// Runs the three Laplace queries on the real targets `y`.
pub fn wpo_privatize(
    y: &[f64],
    system: &RidgeSystem,
    alpha: AdjacencyParam,
    split: BudgetSplit,
    noise: &mut NoiseSource,
    ledger: &mut PrivacyLedger,
) -> Result<PrivatizedWindInputs> {
    let fit = system.fit(y)?;
    let y0 = laplace_mechanism(y, alpha.get(), split.epsilon_1, noise, ledger, "wpo/targets")?;
    let loss_bar = laplace_mechanism(
        &[fit.loss],
        system.loss_sensitivity(alpha),
        split.epsilon_2,
        noise,
        ledger,
        "wpo/loss",
    )?[0];
    let beta_bar = laplace_mechanism(
        fit.beta.as_slice(),
        system.weight_sensitivity(alpha),
        split.epsilon_2,
        noise,
        ledger,
        "wpo/weights",
    )?;
    Ok(PrivatizedWindInputs { y0, loss_bar, beta_bar })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpoSolution {
    /// Synthetic targets, clamped to `[0, 1]` exactly.
    pub y_tilde: Vec<f64>,
    pub beta: Vec<f64>,
    pub loss: f64,
    pub objective: f64,
    /// `max |β - Aỹ|` at the returned point.
    pub weight_residual: f64,
    /// `max(0, ‖Xβ - ỹ‖ - ℓ)` at the returned point.
    pub loss_residual: f64,
    pub iterations: usize,
}

/// Finds the dataset in `[0, 1]^m` whose ridge loss is closest to the noisy
/// loss, with small penalties pulling the weights towards the noisy weights
/// and the targets towards the noisy targets.
///
/// Variables: `ỹ`, `β = Aỹ`, `ℓ ≥ ‖Xβ - ỹ‖`, `u ≥ |ℓ̄ - ℓ|`, and
/// `t_β ≥ ‖β̄ - β‖`, `t_y ≥ ‖ỹ⁰ - ỹ‖`; minimize `u + γ_β t_β + γ_y t_y`.
pub fn wpo_postprocess(
    inputs: &PrivatizedWindInputs,
    system: &RidgeSystem,
    gamma_beta: f64,
    gamma_y: f64,
) -> Result<WpoSolution> {
    let m = system.num_samples();
    let p = system.num_features();
    if inputs.y0.len() != m || inputs.beta_bar.len() != p {
        return Err(Error::Dimension("privatized inputs do not match the design matrix".into()));
    }
    let x = system.design();
    let a = system.operator();

    let mut lp = LinearProgram::new();
    let y: Vec<usize> = (0..m).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
    let beta: Vec<usize> = (0..p).map(|_| lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY)).collect();
    let ell = lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY);
    let u = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
    let t_beta = lp.add_var(gamma_beta, f64::NEG_INFINITY, f64::INFINITY);
    let t_y = lp.add_var(gamma_y, f64::NEG_INFINITY, f64::INFINITY);

    for k in 0..p {
        let mut coeffs = vec![(beta[k], 1.0)];
        coeffs.extend((0..m).map(|i| (y[i], -a[(k, i)])));
        lp.add_row(coeffs, Sense::Eq, 0.0);
    }
    lp.add_row(vec![(u, 1.0), (ell, 1.0)], Sense::Ge, inputs.loss_bar);
    lp.add_row(vec![(u, 1.0), (ell, -1.0)], Sense::Ge, -inputs.loss_bar);

    let mut prog = ConicProgram::new(lp);
    let fit_tail = (0..m)
        .map(|i| {
            let mut terms: Vec<(usize, f64)> = (0..p).map(|k| (beta[k], x[(i, k)])).collect();
            terms.push((y[i], -1.0));
            AffineExpr::new(terms, 0.0)
        })
        .collect();
    prog.add_cone(AffineExpr::var(ell), fit_tail);
    let beta_tail = (0..p)
        .map(|k| AffineExpr::new(vec![(beta[k], -1.0)], inputs.beta_bar[k]))
        .collect();
    prog.add_cone(AffineExpr::var(t_beta), beta_tail);
    let y_tail = (0..m)
        .map(|i| AffineExpr::new(vec![(y[i], -1.0)], inputs.y0[i]))
        .collect();
    prog.add_cone(AffineExpr::var(t_y), y_tail);

    let out = dpgrid_solver::solve_socp(&prog)?;
    if out.status != Status::Optimal {
        return Err(Error::Optimization(format!("WPO post-processing ended with {:?}", out.status)));
    }

    let y_tilde: Vec<f64> = y.iter().map(|&j| out.x[j].clamp(0.0, 1.0)).collect();
    let beta_val = DVector::from_iterator(p, beta.iter().map(|&j| out.x[j]));
    let ell_val = out.x[ell];
    let implied = a * DVector::from_column_slice(&y_tilde);
    let weight_residual = (&beta_val - implied).amax();
    let fit_norm = (x * &beta_val - DVector::from_column_slice(&y_tilde)).norm();
    Ok(WpoSolution {
        y_tilde,
        beta: beta_val.as_slice().to_vec(),
        loss: ell_val,
        objective: out.objective,
        weight_residual,
        loss_residual: (fit_norm - ell_val).max(0.0),
        iterations: out.iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticWindRelease {
    pub speeds: Vec<f64>,
    pub power: Vec<f64>,
    pub loss_bar: f64,
    pub beta_bar: Vec<f64>,
    pub ledger: PrivacyLedger,
    pub config: WpoConfig,
    pub features: FeatureSpec,
    pub diagnostics: WpoDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WpoDiagnostics {
    pub objective: f64,
    pub weight_residual: f64,
    pub loss_residual: f64,
    /// Ridge loss refitted on the synthetic targets.
    pub synthetic_loss: f64,
    pub solver_iterations: usize,
}

/// The full pipeline: privatize, post-process, and attach the ledger.
pub fn wpo_release(
    dataset: &WindDataset,
    features: &FeatureSpec,
    config: &WpoConfig,
) -> Result<SyntheticWindRelease> {
    config.validate()?;
    let mut noise = NoiseSource::new(config.seed, config.noise);
    noise.guard(config.allow_noise_off)?;
    let alpha = AdjacencyParam::new(config.alpha)?;
    let split = split_budget_wpo(config.epsilon)?;
    let system = RidgeSystem::new(rbf_features(&dataset.speeds, features)?, config.lambda)?;

    let mut ledger = PrivacyLedger::new();
    let inputs = wpo_privatize(&dataset.power, &system, alpha, split, &mut noise, &mut ledger)?;
    let sol = wpo_postprocess(&inputs, &system, config.gamma_beta, config.gamma_y)?;
    let synthetic_loss = system.fit(&sol.y_tilde)?.loss;
    Ok(SyntheticWindRelease {
        speeds: dataset.speeds.clone(),
        power: sol.y_tilde,
        loss_bar: inputs.loss_bar,
        beta_bar: inputs.beta_bar,
        ledger,
        config: config.clone(),
        features: features.clone(),
        diagnostics: WpoDiagnostics {
            objective: sol.objective,
            weight_residual: sol.weight_residual,
            loss_residual: sol.loss_residual,
            synthetic_loss,
            solver_iterations: sol.iterations,
        },
    })
}

/// Output perturbation alone: `clamp(y + Lap(α/ε), 0, 1)`.
pub fn laplace_baseline(
    y: &[f64],
    alpha: AdjacencyParam,
    epsilon: f64,
    noise: &mut NoiseSource,
    ledger: &mut PrivacyLedger,
) -> Result<Vec<f64>> {
    let noisy = laplace_mechanism(y, alpha.get(), epsilon, noise, ledger, "laplace/targets")?;
    Ok(noisy.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_dataset() -> WindDataset {
        let speeds: Vec<f64> = (0..40).map(|i| 2.5 + 10.0 * i as f64 / 39.0).collect();
        let power = speeds.iter().map(|s| ((s - 3.0) / 9.0).clamp(0.0, 1.0)).collect();
        WindDataset::new(speeds, power).unwrap()
    }

    #[test]
    fn ledger_spends_exactly_epsilon() {
        let cfg = WpoConfig { epsilon: 0.7, seed: 5, ..WpoConfig::default() };
        let rel = wpo_release(&small_dataset(), &FeatureSpec::wind(), &cfg).unwrap();
        let labels: Vec<&str> = rel.ledger.entries().iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, ["wpo/targets", "wpo/loss", "wpo/weights"]);
        assert_eq!(rel.ledger.total(), 0.7);
        assert!(rel.power.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(rel.diagnostics.weight_residual <= 1e-6);
        assert!(rel.diagnostics.loss_residual <= 1e-6);
    }

    #[test]
    fn noise_off_needs_opt_in() {
        let cfg = WpoConfig { noise: NoiseMode::Off, ..WpoConfig::default() };
        let err = wpo_release(&small_dataset(), &FeatureSpec::wind(), &cfg).unwrap_err();
        assert!(matches!(err, Error::NoiseOffRefused));
    }

    #[test]
    fn noise_off_reproduces_the_fit() {
        let data = small_dataset();
        let cfg = WpoConfig { noise: NoiseMode::Off, allow_noise_off: true, ..WpoConfig::default() };
        let rel = wpo_release(&data, &FeatureSpec::wind(), &cfg).unwrap();
        let system = RidgeSystem::new(rbf_features(&data.speeds, &FeatureSpec::wind()).unwrap(), cfg.lambda).unwrap();
        let real = system.fit(&data.power).unwrap().loss;
        assert!((rel.diagnostics.synthetic_loss - real).abs() < 1e-6);
        assert!(rel.diagnostics.objective.abs() < 1e-6);
    }

    #[test]
    fn baseline_is_clamped() {
        let mut noise = NoiseSource::live(2);
        let mut ledger = PrivacyLedger::new();
        let alpha = AdjacencyParam::new(0.5).unwrap();
        let out = laplace_baseline(&[0.0, 1.0, 0.5], alpha, 0.1, &mut noise, &mut ledger).unwrap();
        assert!(out.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(ledger.total(), 0.1);
    }
}
