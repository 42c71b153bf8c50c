//! Transmission-capacity obfuscation: private line capacities that keep a
//! population of public OPF instances close to their real-capacity costs.
//!
//! Step 1 perturbs the capacities directly. Each later iteration spends two
//! queries: report-noisy-max picks the instance whose relaxed cost is furthest
//! from its real cost, and a Laplace query releases that instance's real cost.
//! [`tco_postprocess`] then moves the capacities so the selected instances'
//! OPF costs match the released costs. It reads the released values and the
//! public instances only, never the real capacities.
//!
//! The inner OPFs enter the post-processing MILP through their KKT
//! conditions, with each complementarity pair split by a binary.

use dpgrid_solver::{LinearProgram, MipLimits, MixedIntegerProgram, Sense, Status};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dp::{
    laplace_mechanism, report_noisy_max, split_budget_tco, NoiseMode, NoiseSource, PrivacyLedger,
};
use crate::error::{positive, Error, Result};
use crate::opf::{opf_program, solve_opf, solve_relaxed_opf, OpfModel, OpfPopulation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcoConfig {
    pub epsilon: f64,
    /// Adjacency radius in MW.
    pub alpha: f64,
    pub iterations: usize,
    /// Price per MW of capacity violation in the relaxed OPF.
    pub psi: f64,
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseMode,
    #[serde(default)]
    pub allow_noise_off: bool,
    #[serde(default)]
    pub postprocess: PostprocessOptions,
}

impl Default for TcoConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            alpha: 5.0,
            iterations: 5,
            psi: 3000.0,
            seed: 0,
            noise: NoiseMode::Live,
            allow_noise_off: false,
            postprocess: PostprocessOptions::default(),
        }
    }
}

impl TcoConfig {
    pub fn validate(&self) -> Result<()> {
        positive("epsilon", self.epsilon)?;
        positive("alpha", self.alpha)?;
        positive("psi", self.psi)?;
        if self.iterations == 0 {
            return Err(Error::Parameter("iteration count T must be at least 1".into()));
        }
        self.postprocess.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostprocessOptions {
    /// Initial bound on every OPF dual. `None` uses ψ.
    pub dual_bound: Option<f64>,
    /// How many times the dual bound may double after a dual ends at it.
    pub max_escalations: usize,
    pub max_nodes: usize,
    pub relative_gap: f64,
    /// Objective weight on every embedded dual. Degenerate OPFs have a
    /// continuum of duals; the weight picks the smallest so that a dual at
    /// the bound signals a bound that really restricts.
    pub dual_weight: f64,
}

impl Default for PostprocessOptions {
    fn default() -> Self {
        Self { dual_bound: None, max_escalations: 3, max_nodes: 50_000, relative_gap: 1e-6, dual_weight: 1e-7 }
    }
}

impl PostprocessOptions {
    fn validate(&self) -> Result<()> {
        if let Some(m) = self.dual_bound {
            positive("dual bound", m)?;
        }
        if self.max_nodes == 0 {
            return Err(Error::Parameter("max_nodes must be positive".into()));
        }
        for (name, v) in [("relative_gap", self.relative_gap), ("dual_weight", self.dual_weight)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Parameter(format!("{name} must be finite and >= 0")));
            }
        }
        Ok(())
    }
}

/// An iteration's released pair: the selected instance and its noisy cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReleasedQuery {
    pub model: usize,
    pub cost_bar: f64,
}

/// Per-instance check of the embedded KKT point against an independent solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockAudit {
    pub model: usize,
    pub embedded_cost: f64,
    /// `C_k(φ)` from a fresh LP solve at the returned capacities.
    pub independent_cost: f64,
    /// `|embedded - independent| / max(1, |independent|)`.
    pub cost_error: f64,
    pub stationarity: f64,
    /// Largest `min(slack, dual)` over all complementarity pairs.
    pub complementarity: f64,
    pub primal_violation: f64,
    pub dual_bound: f64,
    /// Some dual ended at the bound.
    pub bound_binding: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostprocessResult {
    pub phi: Vec<f64>,
    pub objective: f64,
    /// The MILP closed its gap (not stopped by the node limit).
    pub proven_optimal: bool,
    pub escalations: usize,
    pub nodes: usize,
    pub blocks: Vec<BlockAudit>,
}

impl PostprocessResult {
    /// Largest audit failure measure over all blocks.
    pub fn worst_cost_error(&self) -> f64 {
        self.blocks.iter().map(|b| b.cost_error).fold(0.0, f64::max)
    }

    pub fn worst_complementarity(&self) -> f64 {
        self.blocks.iter().map(|b| b.complementarity).fold(0.0, f64::max)
    }

    pub fn any_bound_binding(&self) -> bool {
        self.blocks.iter().any(|b| b.bound_binding)
    }
}

/// An OPF KKT point: dispatch with multipliers in the sign convention of the
/// MILP blocks (`μ, ν ≥ 0`).
#[derive(Debug, Clone, PartialEq)]
struct KktPoint {
    dispatch: Vec<f64>,
    lambda: f64,
    mu_up: Vec<f64>,
    mu_lo: Vec<f64>,
    nu_up: Vec<f64>,
    nu_lo: Vec<f64>,
}

/// Zero out sub-noise multipliers so the complementarity binaries can be
/// read off their sign.
const DUAL_FLOOR: f64 = 1e-9;

fn kkt_point(ptdf: &DMatrix<f64>, phi: &[f64], model: &OpfModel) -> Result<Option<KktPoint>> {
    let lp = opf_program(ptdf, phi, model, None);
    let out = dpgrid_solver::solve_lp(&lp)?;
    if out.status != Status::Optimal {
        return Ok(None);
    }
    let Some(y) = out.duals.as_ref() else {
        return Ok(None);
    };
    let (n, e) = (ptdf.ncols(), ptdf.nrows());
    let clean = |v: f64| if v > DUAL_FLOOR { v } else { 0.0 };
    let lambda = y[0];
    let mut mu_up = Vec::with_capacity(e);
    let mut mu_lo = Vec::with_capacity(e);
    for l in 0..e {
        let (mut up, mut lo) = (clean(-y[1 + 2 * l]), clean(y[2 + 2 * l]));
        let both = up.min(lo);
        up -= both;
        lo -= both;
        mu_up.push(up);
        mu_lo.push(lo);
    }
    let mut nu_up = vec![0.0; n];
    let mut nu_lo = vec![0.0; n];
    for j in 0..n {
        if model.p_min[j] >= model.p_max[j] {
            continue;
        }
        let flow_term: f64 = (0..e).map(|l| ptdf[(l, j)] * (mu_up[l] - mu_lo[l])).sum();
        let d = model.cost[j] - lambda + flow_term;
        nu_up[j] = clean(-d);
        nu_lo[j] = clean(d);
    }
    Ok(Some(KktPoint { dispatch: out.x[..n].to_vec(), lambda, mu_up, mu_lo, nu_up, nu_lo }))
}

/// Variable indices and constants of one embedded OPF.
struct Block {
    model: usize,
    free: Vec<usize>,
    p: Vec<usize>,
    lambda: usize,
    mu_up: Vec<usize>,
    mu_lo: Vec<usize>,
    z_up: Vec<usize>,
    z_lo: Vec<usize>,
    nu_up: Vec<usize>,
    nu_lo: Vec<usize>,
    w_up: Vec<usize>,
    w_lo: Vec<usize>,
    /// `(F d)_l` minus the flow of fixed generators.
    r: Vec<f64>,
    fixed_cost: f64,
}

/// Largest `|F_l (p - d)|` over the generator box: above it line `l` never
/// binds for this instance.
fn flow_reach(ptdf: &DMatrix<f64>, model: &OpfModel, l: usize) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for j in 0..ptdf.ncols() {
        let f = ptdf[(l, j)];
        let a = f * (model.p_min[j] - model.load[j]);
        let b = f * (model.p_max[j] - model.load[j]);
        lo += a.min(b);
        hi += a.max(b);
    }
    (lo, hi)
}

struct Milp {
    mip: MixedIntegerProgram,
    phi: Vec<usize>,
    d_up: Vec<usize>,
    d_lo: Vec<usize>,
    a_up: Vec<usize>,
    a_lo: Vec<usize>,
    blocks: Vec<Block>,
    upper: Vec<f64>,
}

fn build_milp(
    history: &[ReleasedQuery],
    phi_prev: &[f64],
    ptdf: &DMatrix<f64>,
    models: &[OpfModel],
    dual_bound: f64,
    options: &PostprocessOptions,
) -> Milp {
    let e = ptdf.nrows();
    let mut distinct: Vec<usize> = history.iter().map(|q| q.model).collect();
    distinct.sort_unstable();
    distinct.dedup();

    let upper: Vec<f64> = (0..e)
        .map(|l| {
            distinct
                .iter()
                .map(|&k| {
                    let (lo, hi) = flow_reach(ptdf, &models[k], l);
                    hi.max(-lo)
                })
                .fold(phi_prev[l], f64::max)
        })
        .collect();

    let mut lp = LinearProgram::new();
    let phi: Vec<usize> = (0..e).map(|l| lp.add_var(0.0, 0.0, upper[l])).collect();
    let d_up: Vec<usize> = (0..e).map(|_| lp.add_var(1.0, 0.0, f64::INFINITY)).collect();
    let d_lo: Vec<usize> = (0..e).map(|_| lp.add_var(1.0, 0.0, f64::INFINITY)).collect();
    for l in 0..e {
        lp.add_row(vec![(phi[l], 1.0), (d_up[l], -1.0), (d_lo[l], 1.0)], Sense::Eq, phi_prev[l]);
    }
    let a_up: Vec<usize> = history.iter().map(|_| lp.add_var(1.0, 0.0, f64::INFINITY)).collect();
    let a_lo: Vec<usize> = history.iter().map(|_| lp.add_var(1.0, 0.0, f64::INFINITY)).collect();
    let mut mip = MixedIntegerProgram::new(lp);

    let mut blocks = Vec::new();
    for &k in &distinct {
        let model = &models[k];
        let n = model.num_buses();
        let free: Vec<usize> = (0..n).filter(|&j| model.p_min[j] < model.p_max[j]).collect();
        let fixed_flow = |l: usize| -> f64 {
            (0..n)
                .filter(|j| !free.contains(j))
                .map(|j| ptdf[(l, j)] * model.p_min[j])
                .sum()
        };
        let fd = |l: usize| -> f64 { (0..n).map(|j| ptdf[(l, j)] * model.load[j]).sum() };
        let r: Vec<f64> = (0..e).map(|l| fd(l) - fixed_flow(l)).collect();
        let fixed_cost: f64 = (0..n)
            .filter(|j| !free.contains(j))
            .map(|j| model.cost[j] * model.p_min[j])
            .sum();
        let fixed_gen: f64 = (0..n).filter(|j| !free.contains(j)).map(|j| model.p_min[j]).sum();

        let lp = &mut mip.lp;
        let p: Vec<usize> = free.iter().map(|&j| lp.add_var(0.0, model.p_min[j], model.p_max[j])).collect();
        let lambda = lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY);
        let wd = options.dual_weight;
        let mu_up: Vec<usize> = (0..e).map(|_| lp.add_var(wd, 0.0, dual_bound)).collect();
        let mu_lo: Vec<usize> = (0..e).map(|_| lp.add_var(wd, 0.0, dual_bound)).collect();
        let nu_up: Vec<usize> = free.iter().map(|_| lp.add_var(wd, 0.0, dual_bound)).collect();
        let nu_lo: Vec<usize> = free.iter().map(|_| lp.add_var(wd, 0.0, dual_bound)).collect();
        let z_up: Vec<usize> = (0..e).map(|_| mip.add_binary(0.0)).collect();
        let z_lo: Vec<usize> = (0..e).map(|_| mip.add_binary(0.0)).collect();
        let w_up: Vec<usize> = free.iter().map(|_| mip.add_binary(0.0)).collect();
        let w_lo: Vec<usize> = free.iter().map(|_| mip.add_binary(0.0)).collect();
        let lp = &mut mip.lp;

        lp.add_row(p.iter().map(|&v| (v, 1.0)).collect(), Sense::Eq, model.total_load() - fixed_gen);

        for l in 0..e {
            let fp: Vec<(usize, f64)> = free.iter().zip(&p).map(|(&j, &v)| (v, ptdf[(l, j)])).collect();
            // Range of F_l p over the free generators.
            let (mut lo, mut hi) = (0.0, 0.0);
            for &j in &free {
                let f = ptdf[(l, j)];
                lo += (f * model.p_min[j]).min(f * model.p_max[j]);
                hi += (f * model.p_min[j]).max(f * model.p_max[j]);
            }
            // Exact maxima of the slacks s⁺ = φ + r - F p and s⁻ = φ - r + F p.
            let mu = (upper[l] + r[l] - lo).max(0.0);
            let ml = (upper[l] - r[l] + hi).max(0.0);

            let mut row = fp.clone();
            row.push((phi[l], -1.0));
            lp.add_row(row, Sense::Le, r[l]);
            let mut row = fp.clone();
            row.push((phi[l], 1.0));
            lp.add_row(row, Sense::Ge, r[l]);

            // s⁺ ≤ M(1 - z⁺), μ⁺ ≤ M_d z⁺, and the mirror pair.
            let mut row: Vec<(usize, f64)> = fp.iter().map(|&(v, a)| (v, -a)).collect();
            row.push((phi[l], 1.0));
            row.push((z_up[l], mu));
            lp.add_row(row, Sense::Le, mu - r[l]);
            lp.add_row(vec![(mu_up[l], 1.0), (z_up[l], -dual_bound)], Sense::Le, 0.0);
            let mut row = fp;
            row.push((phi[l], 1.0));
            row.push((z_lo[l], ml));
            lp.add_row(row, Sense::Le, ml + r[l]);
            lp.add_row(vec![(mu_lo[l], 1.0), (z_lo[l], -dual_bound)], Sense::Le, 0.0);
            lp.add_row(vec![(z_up[l], 1.0), (z_lo[l], 1.0)], Sense::Le, 1.0);
        }
        for (g, &j) in free.iter().enumerate() {
            let range = model.p_max[j] - model.p_min[j];
            lp.add_row(vec![(p[g], -1.0), (w_up[g], range)], Sense::Le, -model.p_min[j]);
            lp.add_row(vec![(nu_up[g], 1.0), (w_up[g], -dual_bound)], Sense::Le, 0.0);
            lp.add_row(vec![(p[g], 1.0), (w_lo[g], range)], Sense::Le, model.p_max[j]);
            lp.add_row(vec![(nu_lo[g], 1.0), (w_lo[g], -dual_bound)], Sense::Le, 0.0);
            lp.add_row(vec![(w_up[g], 1.0), (w_lo[g], 1.0)], Sense::Le, 1.0);

            // c_g - λ + Σ_l F_lg (μ⁺_l - μ⁻_l) + ν⁺_g - ν⁻_g = 0
            let mut row = vec![(lambda, -1.0), (nu_up[g], 1.0), (nu_lo[g], -1.0)];
            for l in 0..e {
                row.push((mu_up[l], ptdf[(l, j)]));
                row.push((mu_lo[l], -ptdf[(l, j)]));
            }
            lp.add_row(row, Sense::Eq, -model.cost[j]);
        }
        for (tau, q) in history.iter().enumerate() {
            if q.model != k {
                continue;
            }
            // a⁺ - a⁻ = C̄_τ - C_k, with C_k = cᵀp + fixed cost.
            let mut row = vec![(a_up[tau], 1.0), (a_lo[tau], -1.0)];
            row.extend(free.iter().zip(&p).map(|(&j, &v)| (v, model.cost[j])));
            lp.add_row(row, Sense::Eq, q.cost_bar - fixed_cost);
        }
        blocks.push(Block {
            model: k,
            free,
            p,
            lambda,
            mu_up,
            mu_lo,
            z_up,
            z_lo,
            nu_up,
            nu_lo,
            w_up,
            w_lo,
            r,
            fixed_cost,
        });
    }
    mip.limits = MipLimits {
        relative_gap: options.relative_gap,
        absolute_gap: 1e-9,
        max_nodes: options.max_nodes,
    };
    Milp { mip, phi, d_up, d_lo, a_up, a_lo, blocks, upper }
}

impl Milp {
    /// A complete MILP point at fixed capacities `phi`, if every block's OPF
    /// is feasible there with duals inside the bound.
    fn point_at(
        &self,
        phi: &[f64],
        phi_prev: &[f64],
        history: &[ReleasedQuery],
        ptdf: &DMatrix<f64>,
        models: &[OpfModel],
        dual_bound: f64,
    ) -> Result<Option<Vec<f64>>> {
        let mut x = vec![0.0; self.mip.lp.num_vars()];
        for l in 0..phi.len() {
            x[self.phi[l]] = phi[l];
            let d = phi[l] - phi_prev[l];
            x[self.d_up[l]] = d.max(0.0);
            x[self.d_lo[l]] = (-d).max(0.0);
        }
        for b in &self.blocks {
            let model = &models[b.model];
            let Some(kkt) = kkt_point(ptdf, phi, model)? else {
                return Ok(None);
            };
            let all_duals = kkt.mu_up.iter().chain(&kkt.mu_lo).chain(&kkt.nu_up).chain(&kkt.nu_lo);
            if all_duals.into_iter().any(|&v| v > dual_bound) {
                return Ok(None);
            }
            x[b.lambda] = kkt.lambda;
            for l in 0..phi.len() {
                x[b.mu_up[l]] = kkt.mu_up[l];
                x[b.mu_lo[l]] = kkt.mu_lo[l];
                x[b.z_up[l]] = if kkt.mu_up[l] > 0.0 { 1.0 } else { 0.0 };
                x[b.z_lo[l]] = if kkt.mu_lo[l] > 0.0 { 1.0 } else { 0.0 };
            }
            let mut cost = b.fixed_cost;
            for (g, &j) in b.free.iter().enumerate() {
                x[b.p[g]] = kkt.dispatch[j];
                x[b.nu_up[g]] = kkt.nu_up[j];
                x[b.nu_lo[g]] = kkt.nu_lo[j];
                x[b.w_up[g]] = if kkt.nu_up[j] > 0.0 { 1.0 } else { 0.0 };
                x[b.w_lo[g]] = if kkt.nu_lo[j] > 0.0 { 1.0 } else { 0.0 };
                cost += model.cost[j] * kkt.dispatch[j];
            }
            for (tau, q) in history.iter().enumerate() {
                if q.model == b.model {
                    let gap = q.cost_bar - cost;
                    x[self.a_up[tau]] = gap.max(0.0);
                    x[self.a_lo[tau]] = (-gap).max(0.0);
                }
            }
        }
        Ok(Some(x))
    }

    fn audit(&self, x: &[f64], ptdf: &DMatrix<f64>, models: &[OpfModel], dual_bound: f64) -> Result<Vec<BlockAudit>> {
        let e = ptdf.nrows();
        let phi: Vec<f64> = self.phi.iter().map(|&j| x[j].max(0.0)).collect();
        let mut audits = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let model = &models[b.model];
            let mut embedded = b.fixed_cost;
            for (g, &j) in b.free.iter().enumerate() {
                embedded += model.cost[j] * x[b.p[g]];
            }
            let independent = solve_opf(ptdf, &phi, model)?;
            let independent_cost = if independent.is_feasible() { independent.objective } else { f64::INFINITY };
            let cost_error = (embedded - independent_cost).abs() / independent_cost.abs().max(1.0);

            let mut stationarity: f64 = 0.0;
            let mut comp: f64 = 0.0;
            let mut primal: f64 = 0.0;
            let mut binding = false;
            let at_bound = |v: f64| v >= dual_bound * (1.0 - 1e-9);
            for l in 0..e {
                let fp: f64 = b.free.iter().zip(&b.p).map(|(&j, &v)| ptdf[(l, j)] * x[v]).sum();
                let s_up = phi[l] + b.r[l] - fp;
                let s_lo = phi[l] - b.r[l] + fp;
                primal = primal.max(-s_up).max(-s_lo);
                comp = comp.max(s_up.max(0.0).min(x[b.mu_up[l]].max(0.0)));
                comp = comp.max(s_lo.max(0.0).min(x[b.mu_lo[l]].max(0.0)));
                binding |= at_bound(x[b.mu_up[l]]) || at_bound(x[b.mu_lo[l]]);
            }
            for (g, &j) in b.free.iter().enumerate() {
                let p = x[b.p[g]];
                let (nu_up, nu_lo) = (x[b.nu_up[g]], x[b.nu_lo[g]]);
                comp = comp.max((model.p_max[j] - p).max(0.0).min(nu_up.max(0.0)));
                comp = comp.max((p - model.p_min[j]).max(0.0).min(nu_lo.max(0.0)));
                binding |= at_bound(nu_up) || at_bound(nu_lo);
                let flow_term: f64 = (0..e).map(|l| ptdf[(l, j)] * (x[b.mu_up[l]] - x[b.mu_lo[l]])).sum();
                let st = model.cost[j] - x[b.lambda] + flow_term + nu_up - nu_lo;
                stationarity = stationarity.max(st.abs());
            }
            audits.push(BlockAudit {
                model: b.model,
                embedded_cost: embedded,
                independent_cost,
                cost_error,
                stationarity,
                complementarity: comp,
                primal_violation: primal.max(0.0),
                dual_bound,
                bound_binding: binding,
            });
        }
        Ok(audits)
    }
}

/// Post-processing for one TCO iteration: the capacities closest to
/// `phi_prev` (L1) that make each selected instance's OPF cost match its
/// released cost.
///
/// Takes only released values and public instance data. The dual bound
/// starts at `dual_bound` and doubles while some dual ends at it, up to
/// `options.max_escalations` times.
pub fn tco_postprocess(
    history: &[ReleasedQuery],
    phi_prev: &[f64],
    ptdf: &DMatrix<f64>,
    models: &[OpfModel],
    dual_bound: f64,
    options: &PostprocessOptions,
) -> Result<PostprocessResult> {
    positive("dual bound", dual_bound)?;
    if history.is_empty() {
        return Err(Error::Parameter("post-processing needs at least one released query".into()));
    }
    if phi_prev.len() != ptdf.nrows() {
        return Err(Error::Dimension("previous capacities do not match the line count".into()));
    }
    if let Some(q) = history.iter().find(|q| q.model >= models.len() || !q.cost_bar.is_finite()) {
        return Err(Error::Parameter(format!("invalid released query {q:?}")));
    }
    for m in models {
        m.validate(ptdf.ncols())?;
    }

    let mut bound = dual_bound;
    let mut escalations = 0;
    loop {
        let mut milp = build_milp(history, phi_prev, ptdf, models, bound, options);
        let clipped: Vec<f64> = phi_prev.iter().zip(&milp.upper).map(|(p, u)| p.min(*u)).collect();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for cand in [clipped, milp.upper.clone()] {
            if let Some(x) = milp.point_at(&cand, phi_prev, history, ptdf, models, bound)? {
                let obj = milp.mip.lp.objective_value(&x);
                if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                    best = Some((obj, x));
                }
            }
        }
        milp.mip.start = best.map(|(_, x)| x);
        let out = dpgrid_solver::solve_milp(&milp.mip)?;
        let nodes = out.mip.as_ref().map_or(0, |r| r.nodes);
        let solved = matches!(out.status, Status::Optimal | Status::Limit) && out.x.iter().all(|v| v.is_finite());
        if out.status == Status::Limit {
            let gap = out.mip.as_ref().map_or(f64::INFINITY, |r| r.gap);
            if gap > options.relative_gap {
                let incumbent = if solved { milp.phi.iter().map(|&j| out.x[j].max(0.0)).collect() } else { Vec::new() };
                return Err(Error::MipLimit { objective: out.objective, gap, incumbent });
            }
        }
        if solved {
            let blocks = milp.audit(&out.x, ptdf, models, bound)?;
            let binding = blocks.iter().any(|b| b.bound_binding);
            if !binding || escalations >= options.max_escalations {
                return Ok(PostprocessResult {
                    phi: milp.phi.iter().map(|&j| out.x[j].max(0.0)).collect(),
                    objective: out.objective,
                    proven_optimal: out.status == Status::Optimal,
                    escalations,
                    nodes,
                    blocks,
                });
            }
        } else if escalations >= options.max_escalations {
            return Err(Error::Optimization(format!(
                "TCO post-processing ended with {:?} after {escalations} dual-bound escalations",
                out.status
            )));
        }
        bound *= 2.0;
        escalations += 1;
    }
}

/// `|C_i(f̄) - C^R_i(φ)|` for every instance.
pub fn worst_case_scores(
    population: &OpfPopulation,
    real_costs: &[f64],
    phi: &[f64],
    psi: f64,
) -> Result<Vec<f64>> {
    let ptdf = population.network.ptdf();
    population
        .models
        .iter()
        .zip(real_costs)
        .map(|(m, &c)| {
            let rel = solve_relaxed_opf(ptdf, phi, m, psi)?;
            if !rel.is_feasible() {
                return Err(Error::Optimization("relaxed OPF infeasible: generation cannot meet load".into()));
            }
            Ok((c - rel.objective).abs())
        })
        .collect()
}

/// `C_i(f̄)` for every instance. Fails if any is infeasible at `capacities`.
pub fn real_costs(population: &OpfPopulation, capacities: &[f64]) -> Result<Vec<f64>> {
    let ptdf = population.network.ptdf();
    population
        .models
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let sol = solve_opf(ptdf, capacities, m)?;
            if !sol.is_feasible() {
                return Err(Error::Optimization(format!("instance {i} is infeasible at the real capacities")));
            }
            Ok(sol.objective)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TcoMetrics {
    pub infeasible_pct: f64,
    pub suboptimality_pct: f64,
}

/// Percentage of instances whose OPF is infeasible at `phi`.
pub fn infeasible_fraction(population: &OpfPopulation, phi: &[f64]) -> Result<f64> {
    let ptdf = population.network.ptdf();
    let mut bad = 0usize;
    for m in &population.models {
        if !solve_opf(ptdf, phi, m)?.is_feasible() {
            bad += 1;
        }
    }
    Ok(100.0 * bad as f64 / population.len() as f64)
}

/// Mean of `|C_i(f̄) - C^R_i(φ)| / C_i(f̄)` in percent. Real costs must be
/// positive.
pub fn suboptimality(population: &OpfPopulation, real_costs: &[f64], phi: &[f64], psi: f64) -> Result<f64> {
    if let Some(c) = real_costs.iter().find(|c| !(**c > 0.0)) {
        return Err(Error::Parameter(format!("suboptimality needs positive real costs, got {c}")));
    }
    let scores = worst_case_scores(population, real_costs, phi, psi)?;
    let total: f64 = scores.iter().zip(real_costs).map(|(s, c)| s / c).sum();
    Ok(100.0 * total / population.len() as f64)
}

pub fn evaluate(population: &OpfPopulation, real_costs: &[f64], phi: &[f64], psi: f64) -> Result<TcoMetrics> {
    Ok(TcoMetrics {
        infeasible_pct: infeasible_fraction(population, phi)?,
        suboptimality_pct: suboptimality(population, real_costs, phi, psi)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcoIteration {
    pub t: usize,
    pub k: usize,
    pub cost_bar: f64,
    /// Capacities after this iteration's post-processing.
    pub phi: Vec<f64>,
    /// Set when post-processing failed and the previous capacities were kept.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub postprocess: Option<PostprocessResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcoTrace {
    pub phi_initial: Vec<f64>,
    pub iterations: Vec<TcoIteration>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityRelease {
    pub phi_bar: Vec<f64>,
    pub trace: TcoTrace,
    pub ledger: PrivacyLedger,
    pub metrics: TcoMetrics,
    pub config: TcoConfig,
    pub seed: u64,
    /// Some iteration's post-processing failed and kept its previous capacities.
    pub flagged: bool,
}

/// Runs the full algorithm on the real capacities `capacities` against the
/// public `population`.
pub fn tco_release(population: &OpfPopulation, capacities: &[f64], config: &TcoConfig) -> Result<CapacityRelease> {
    config.validate()?;
    let mut noise = NoiseSource::new(config.seed, config.noise);
    noise.guard(config.allow_noise_off)?;
    if !(config.psi > population.cost_bound) {
        return Err(Error::Parameter(format!(
            "psi = {} must exceed the population cost bound {}",
            config.psi, population.cost_bound
        )));
    }
    let e = population.network.num_lines();
    if capacities.len() != e {
        return Err(Error::Dimension(format!("expected {e} capacities, got {}", capacities.len())));
    }
    let split = split_budget_tco(config.epsilon, config.iterations)?;
    let ptdf = population.network.ptdf();
    let costs = real_costs(population, capacities)?;
    let sensitivity = population.cost_bound * config.alpha;
    let dual_bound = config.postprocess.dual_bound.unwrap_or(config.psi);

    let mut ledger = PrivacyLedger::new();
    let phi0: Vec<f64> = laplace_mechanism(capacities, config.alpha, split.epsilon_1, &mut noise, &mut ledger, "tco/capacities")?
        .into_iter()
        .map(|v| v.max(0.0))
        .collect();

    let mut phi = phi0.clone();
    let mut history = Vec::with_capacity(config.iterations);
    let mut iterations = Vec::with_capacity(config.iterations);
    for t in 1..=config.iterations {
        let scores = worst_case_scores(population, &costs, &phi, config.psi)?;
        let k = report_noisy_max(&scores, sensitivity, split.epsilon_2, &mut noise, &mut ledger, "tco/select")?;
        let cost_bar = laplace_mechanism(&[costs[k]], sensitivity, split.epsilon_2, &mut noise, &mut ledger, "tco/cost")?[0];
        history.push(ReleasedQuery { model: k, cost_bar });
        let (failure, post) =
            match tco_postprocess(&history, &phi, ptdf, &population.models, dual_bound, &config.postprocess) {
                Ok(res) => {
                    phi = res.phi.clone();
                    (None, Some(res))
                }
                Err(err) => (Some(err.to_string()), None),
            };
        iterations.push(TcoIteration { t, k, cost_bar, phi: phi.clone(), failure, postprocess: post });
    }
    let metrics = evaluate(population, &costs, &phi, config.psi)?;
    let flagged = iterations.iter().any(|it| it.failure.is_some());
    Ok(CapacityRelease {
        phi_bar: phi,
        trace: TcoTrace { phi_initial: phi0, iterations },
        ledger,
        metrics,
        config: config.clone(),
        seed: config.seed,
        flagged,
    })
}
