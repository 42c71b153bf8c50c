//! Laplace sampling, the two primitive mechanisms and the privacy ledger.
//!
//! Every mechanism call appends its ε to a [`PrivacyLedger`]. The ledger total
//! is the correctly rounded sum of its entries, so splits such as
//! `ε/2 + 2T·ε/(4T)` audit back to exactly `ε`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

/// The generator behind every random draw in this crate.
pub type DpRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> DpRng {
    DpRng::seed_from_u64(seed)
}

/// Seed for replication `run` of an experiment seeded with `base`.
pub fn derive_seed(base: u64, run: u64) -> u64 {
    base ^ run
}

/// One Laplace(0, scale) draw by inverse CDF. `scale = 0` returns exactly 0.
pub fn laplace_sample<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::Parameter(format!("Laplace scale must be finite and >= 0, got {scale}")));
    }
    // u in (-1/2, 1/2); the open interval keeps ln finite.
    let mut u: f64 = rng.random::<f64>() - 0.5;
    while u == -0.5 {
        u = rng.random::<f64>() - 0.5;
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(-scale * u.signum() * (1.0 - 2.0 * u.abs()).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    #[default]
    Live,
    /// Every Laplace scale is forced to 0. For tests only; production entry
    /// points refuse it unless the caller opts in explicitly.
    Off,
}

/// Seeded Laplace noise with an optional test-only off switch.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    rng: DpRng,
    mode: NoiseMode,
}

impl NoiseSource {
    pub fn new(seed: u64, mode: NoiseMode) -> Self {
        Self { rng: rng_from_seed(seed), mode }
    }

    pub fn live(seed: u64) -> Self {
        Self::new(seed, NoiseMode::Live)
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    /// Fails with [`Error::NoiseOffRefused`] for noise-off sources unless
    /// `allow_noise_off` is set.
    pub fn guard(&self, allow_noise_off: bool) -> Result<()> {
        match (self.mode, allow_noise_off) {
            (NoiseMode::Off, false) => Err(Error::NoiseOffRefused),
            _ => Ok(()),
        }
    }

    /// A Laplace draw. The generator advances in both modes so that turning
    /// noise off does not shift later draws.
    pub fn laplace(&mut self, scale: f64) -> Result<f64> {
        let effective = match self.mode {
            NoiseMode::Live => scale,
            NoiseMode::Off => {
                laplace_sample(scale, &mut self.rng)?;
                0.0
            }
        };
        laplace_sample(effective, &mut self.rng)
    }

    pub fn rng(&mut self) -> &mut DpRng {
        &mut self.rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub epsilon: f64,
}

/// Append-only record of every ε spent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrivacyLedger {
    entries: Vec<LedgerEntry>,
}

impl PrivacyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, label: &str, epsilon: f64) -> Result<()> {
        positive("epsilon", epsilon)?;
        self.entries.push(LedgerEntry { label: label.to_string(), epsilon });
        Ok(())
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        compose(&self.entries)
    }

    pub fn to_record(&self) -> LedgerRecord {
        LedgerRecord { entries: self.entries.clone(), total: self.total() }
    }
}

impl Serialize for PrivacyLedger {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

/// The serialized ledger, `{"entries": [{"label", "epsilon"}], "total"}`.
/// Parsed records are untrusted until [`LedgerRecord::audit`] accepts them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub entries: Vec<LedgerEntry>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerAudit {
    pub recomputed_total: f64,
    pub recorded_total: f64,
    pub expected_epsilon: f64,
    pub entries_valid: bool,
    pub passed: bool,
}

impl LedgerRecord {
    /// Recomputes the total from the entries and compares it bitwise with both
    /// the recorded total and the budget the release claims.
    pub fn audit(&self, expected_epsilon: f64) -> LedgerAudit {
        let recomputed = compose(&self.entries);
        let entries_valid =
            self.entries.iter().all(|e| e.epsilon.is_finite() && e.epsilon > 0.0);
        LedgerAudit {
            recomputed_total: recomputed,
            recorded_total: self.total,
            expected_epsilon,
            entries_valid,
            passed: entries_valid && recomputed == self.total && recomputed == expected_epsilon,
        }
    }
}

/// Sequential composition: the exact sum of the logged ε values, rounded once.
pub fn compose(entries: &[LedgerEntry]) -> f64 {
    exact_sum(entries.iter().map(|e| e.epsilon))
}

/// Correctly rounded sum (Shewchuk's expansion arithmetic). Inputs must be
/// finite.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for k in 0..partials.len() {
            let mut y = partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    let Some(mut hi) = partials.pop() else {
        return 0.0;
    };
    let mut lo = 0.0;
    while let Some(y) = partials.pop() {
        let x = hi;
        hi = x + y;
        lo = y - (hi - x);
        if lo != 0.0 {
            break;
        }
    }
    // Half-way cases: round using the sign of the next partial.
    if let Some(&next) = partials.last() {
        if (lo < 0.0 && next < 0.0) || (lo > 0.0 && next > 0.0) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
    }
    hi
}

/// Adds Laplace(sensitivity/ε) noise to each value and charges ε once: the
/// sensitivity covers the whole vector.
pub fn laplace_mechanism(
    values: &[f64],
    sensitivity: f64,
    epsilon: f64,
    noise: &mut NoiseSource,
    ledger: &mut PrivacyLedger,
    label: &str,
) -> Result<Vec<f64>> {
    positive("epsilon", epsilon)?;
    if !(sensitivity.is_finite() && sensitivity >= 0.0) {
        return Err(Error::Parameter(format!("sensitivity must be finite and >= 0, got {sensitivity}")));
    }
    let scale = sensitivity / epsilon;
    let out = values
        .iter()
        .map(|&v| noise.laplace(scale).map(|n| v + n))
        .collect::<Result<Vec<_>>>()?;
    ledger.charge(label, epsilon)?;
    Ok(out)
}

/// Index of the largest noisy score (lowest index on ties). Charges ε once.
pub fn report_noisy_max(
    scores: &[f64],
    sensitivity: f64,
    epsilon: f64,
    noise: &mut NoiseSource,
    ledger: &mut PrivacyLedger,
    label: &str,
) -> Result<usize> {
    if scores.is_empty() {
        return Err(Error::Dimension("report-noisy-max needs at least one score".into()));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::Parameter(format!("scores must be finite, got {bad}")));
    }
    let noisy = laplace_mechanism(scores, sensitivity, epsilon, noise, ledger, label)?;
    let mut best = 0;
    for (i, &s) in noisy.iter().enumerate() {
        if s > noisy[best] {
            best = i;
        }
    }
    Ok(best)
}

/// An ε budget divided into the first-step share and the per-query share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetSplit {
    pub epsilon_1: f64,
    pub epsilon_2: f64,
}

/// `(ε/2, ε/4)`: half for the dataset, a quarter each for loss and weights.
pub fn split_budget_wpo(epsilon: f64) -> Result<BudgetSplit> {
    positive("epsilon", epsilon)?;
    Ok(BudgetSplit { epsilon_1: epsilon / 2.0, epsilon_2: epsilon / 4.0 })
}

/// `(ε/2, ε/(4T))`: half for the capacities, the rest over `2T` queries.
pub fn split_budget_tco(epsilon: f64, iterations: usize) -> Result<BudgetSplit> {
    positive("epsilon", epsilon)?;
    if iterations == 0 {
        return Err(Error::Parameter("iteration count T must be at least 1".into()));
    }
    Ok(BudgetSplit {
        epsilon_1: epsilon / 2.0,
        epsilon_2: epsilon / (4.0 * iterations as f64),
    })
}

/// Adjacency radius α: neighbouring datasets differ by at most α in one
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct AdjacencyParam(f64);

impl AdjacencyParam {
    pub fn new(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(Self(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}
