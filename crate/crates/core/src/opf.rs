//! DC optimal power flow on a PTDF network model.
//!
//! Flows are `F(p - d)` with `F` the power transfer distribution factors, so
//! bus angles never appear. [`solve_opf`] enforces `|F(p - d)| ≤ φ`;
//! [`solve_relaxed_opf`] lets each line exceed `φ` by `v ≥ 0` at price ψ per MW.

use std::collections::HashMap;

use dpgrid_solver::{LinearProgram, Sense, SolveOutcome, Status};
use nalgebra::DMatrix;
use petgraph::graph::UnGraph;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: u32,
    pub load_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: u32,
    pub to: u32,
    pub susceptance_pu: f64,
    pub capacity_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub bus: u32,
    pub cost: f64,
    pub p_min: f64,
    pub p_max: f64,
}

/// A network case as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkCase {
    #[serde(rename = "baseMVA")]
    pub base_mva: f64,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    /// Bus id of the angle reference.
    pub slack: u32,
}

impl NetworkCase {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One OPF instance in bus order. Buses without a generator carry zero cost
/// and `p_min = p_max = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpfModel {
    pub cost: Vec<f64>,
    pub load: Vec<f64>,
    pub p_min: Vec<f64>,
    pub p_max: Vec<f64>,
}

impl OpfModel {
    pub fn num_buses(&self) -> usize {
        self.load.len()
    }

    pub fn validate(&self, buses: usize) -> Result<()> {
        let lens = [self.cost.len(), self.load.len(), self.p_min.len(), self.p_max.len()];
        if lens.iter().any(|&l| l != buses) {
            return Err(Error::Dimension(format!("OPF model vectors must have {buses} entries")));
        }
        for i in 0..buses {
            let vals = [self.cost[i], self.load[i], self.p_min[i], self.p_max[i]];
            if vals.iter().any(|v| !v.is_finite()) || self.p_min[i] > self.p_max[i] {
                return Err(Error::Parameter(format!("bus {i}: non-finite data or p_min > p_max")));
            }
        }
        Ok(())
    }

    pub fn total_load(&self) -> f64 {
        self.load.iter().sum()
    }
}

/// A validated network with its PTDF matrix.
#[derive(Debug, Clone)]
pub struct Network {
    case: NetworkCase,
    bus_index: HashMap<u32, usize>,
    slack: usize,
    has_generator: Vec<bool>,
    ptdf: DMatrix<f64>,
}

impl Network {
    pub fn from_case(case: NetworkCase) -> Result<Self> {
        positive("baseMVA", case.base_mva)?;
        let n = case.buses.len();
        if n == 0 || case.lines.is_empty() {
            return Err(Error::Network("a case needs at least one bus and one line".into()));
        }
        let mut bus_index = HashMap::new();
        for (i, b) in case.buses.iter().enumerate() {
            if bus_index.insert(b.id, i).is_some() {
                return Err(Error::Network(format!("duplicate bus id {}", b.id)));
            }
            if !b.load_mw.is_finite() {
                return Err(Error::Network(format!("bus {}: non-finite load", b.id)));
            }
        }
        let idx = |id: u32| {
            bus_index
                .get(&id)
                .copied()
                .ok_or_else(|| Error::Network(format!("unknown bus id {id}")))
        };
        let slack = idx(case.slack)?;
        let mut graph = UnGraph::<(), ()>::new_undirected();
        let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
        for l in &case.lines {
            let (f, t) = (idx(l.from)?, idx(l.to)?);
            if f == t {
                return Err(Error::Network(format!("line {}-{} is a self-loop", l.from, l.to)));
            }
            positive("line susceptance", l.susceptance_pu)?;
            positive("line capacity", l.capacity_mw)?;
            graph.add_edge(nodes[f], nodes[t], ());
        }
        if petgraph::algo::connected_components(&graph) != 1 {
            return Err(Error::Network("the network is not connected".into()));
        }
        let mut has_generator = vec![false; n];
        for g in &case.generators {
            let b = idx(g.bus)?;
            if has_generator[b] {
                return Err(Error::Network(format!("bus {} has more than one generator", g.bus)));
            }
            if ![g.cost, g.p_min, g.p_max].iter().all(|v| v.is_finite()) || g.p_min > g.p_max {
                return Err(Error::Network(format!("generator at bus {}: invalid limits", g.bus)));
            }
            has_generator[b] = true;
        }
        let ptdf = build_ptdf(&case, &bus_index, slack)?;
        Ok(Self { case, bus_index, slack, has_generator, ptdf })
    }

    pub fn case(&self) -> &NetworkCase {
        &self.case
    }

    pub fn num_buses(&self) -> usize {
        self.case.buses.len()
    }

    pub fn num_lines(&self) -> usize {
        self.case.lines.len()
    }

    pub fn slack(&self) -> usize {
        self.slack
    }

    pub fn bus_position(&self, id: u32) -> Option<usize> {
        self.bus_index.get(&id).copied()
    }

    pub fn has_generator(&self, bus: usize) -> bool {
        self.has_generator[bus]
    }

    /// `F`, shape `lines × buses`, with a zero slack column.
    pub fn ptdf(&self) -> &DMatrix<f64> {
        &self.ptdf
    }

    pub fn capacities(&self) -> Vec<f64> {
        self.case.lines.iter().map(|l| l.capacity_mw).collect()
    }

    /// The case with every line capacity multiplied by `factor`.
    pub fn with_scaled_capacities(&self, factor: f64) -> Result<Self> {
        positive("capacity factor", factor)?;
        let mut case = self.case.clone();
        for l in &mut case.lines {
            l.capacity_mw *= factor;
        }
        Self::from_case(case)
    }

    pub fn nominal_model(&self) -> OpfModel {
        let n = self.num_buses();
        let mut m = OpfModel {
            cost: vec![0.0; n],
            load: self.case.buses.iter().map(|b| b.load_mw).collect(),
            p_min: vec![0.0; n],
            p_max: vec![0.0; n],
        };
        for g in &self.case.generators {
            let b = self.bus_index[&g.bus];
            m.cost[b] = g.cost;
            m.p_min[b] = g.p_min;
            m.p_max[b] = g.p_max;
        }
        m
    }
}

fn build_ptdf(case: &NetworkCase, index: &HashMap<u32, usize>, slack: usize) -> Result<DMatrix<f64>> {
    let n = case.buses.len();
    let e = case.lines.len();
    let mut bbus = DMatrix::<f64>::zeros(n, n);
    let mut bf = DMatrix::<f64>::zeros(e, n);
    for (l, line) in case.lines.iter().enumerate() {
        let (f, t, b) = (index[&line.from], index[&line.to], line.susceptance_pu);
        bf[(l, f)] += b;
        bf[(l, t)] -= b;
        bbus[(f, f)] += b;
        bbus[(t, t)] += b;
        bbus[(f, t)] -= b;
        bbus[(t, f)] -= b;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| i != slack).collect();
    let mut ptdf = DMatrix::<f64>::zeros(e, n);
    if keep.is_empty() {
        return Ok(ptdf);
    }
    let bred = bbus.select_rows(&keep).select_columns(&keep);
    let bf_red = bf.select_columns(&keep);
    // F_red = Bf_red · Bred⁻¹, i.e. Bred · F_redᵀ = Bf_redᵀ (Bred is symmetric).
    let lu = bred.lu();
    let sol = lu
        .solve(&bf_red.transpose())
        .ok_or_else(|| Error::Network("reduced susceptance matrix is singular".into()))?;
    for (c, &bus) in keep.iter().enumerate() {
        for l in 0..e {
            ptdf[(l, bus)] = sol[(c, l)];
        }
    }
    Ok(ptdf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpfStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpfSolution {
    pub status: OpfStatus,
    pub dispatch: Vec<f64>,
    /// `F(p - d)`, recomputed from the dispatch.
    pub flows: Vec<f64>,
    /// Generation cost `cᵀp`, excluding any violation penalty.
    pub generation_cost: f64,
    /// Per-line capacity violation (all zero for the nominal problem).
    pub violation: Vec<f64>,
    /// The optimal value: generation cost plus ψ times total violation.
    pub objective: f64,
}

impl OpfSolution {
    fn infeasible(buses: usize, lines: usize) -> Self {
        Self {
            status: OpfStatus::Infeasible,
            dispatch: vec![f64::NAN; buses],
            flows: vec![f64::NAN; lines],
            generation_cost: f64::NAN,
            violation: vec![f64::NAN; lines],
            objective: f64::INFINITY,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == OpfStatus::Optimal
    }
}

/// Constant part of the line-flow constraints: `F d`.
fn load_flows(ptdf: &DMatrix<f64>, model: &OpfModel) -> Vec<f64> {
    (0..ptdf.nrows())
        .map(|l| (0..ptdf.ncols()).map(|j| ptdf[(l, j)] * model.load[j]).sum())
        .collect()
}

fn check_inputs(ptdf: &DMatrix<f64>, phi: &[f64], model: &OpfModel) -> Result<()> {
    model.validate(ptdf.ncols())?;
    if phi.len() != ptdf.nrows() {
        return Err(Error::Dimension(format!("expected {} capacities, got {}", ptdf.nrows(), phi.len())));
    }
    if let Some(bad) = phi.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Parameter(format!("capacities must be finite and >= 0, got {bad}")));
    }
    Ok(())
}

/// The OPF as an LP: one variable per bus, then one violation variable per
/// line when `psi` is given. Rows: balance, then an upper and a lower flow
/// row per line.
pub(crate) fn opf_program(ptdf: &DMatrix<f64>, phi: &[f64], model: &OpfModel, psi: Option<f64>) -> LinearProgram {
    let n = ptdf.ncols();
    let e = ptdf.nrows();
    let mut lp = LinearProgram::new();
    for j in 0..n {
        lp.add_var(model.cost[j], model.p_min[j], model.p_max[j]);
    }
    let v: Option<Vec<usize>> = psi.map(|psi| (0..e).map(|_| lp.add_var(psi, 0.0, f64::INFINITY)).collect());
    lp.add_row((0..n).map(|j| (j, 1.0)).collect(), Sense::Eq, model.total_load());
    let fd = load_flows(ptdf, model);
    for l in 0..e {
        let coeffs: Vec<(usize, f64)> = (0..n).map(|j| (j, ptdf[(l, j)])).collect();
        let mut upper = coeffs.clone();
        let mut lower = coeffs;
        if let Some(v) = &v {
            upper.push((v[l], -1.0));
            lower.push((v[l], 1.0));
        }
        lp.add_row(upper, Sense::Le, phi[l] + fd[l]);
        lp.add_row(lower, Sense::Ge, -phi[l] + fd[l]);
    }
    lp
}

fn finish(ptdf: &DMatrix<f64>, model: &OpfModel, out: &SolveOutcome, psi: Option<f64>) -> Result<OpfSolution> {
    let n = ptdf.ncols();
    let e = ptdf.nrows();
    match out.status {
        Status::Optimal => {}
        Status::Infeasible => return Ok(OpfSolution::infeasible(n, e)),
        s => return Err(Error::Optimization(format!("OPF solve ended with {s:?}"))),
    }
    let dispatch = out.x[..n].to_vec();
    let flows = (0..e)
        .map(|l| (0..n).map(|j| ptdf[(l, j)] * (dispatch[j] - model.load[j])).sum())
        .collect();
    let violation: Vec<f64> = match psi {
        Some(_) => out.x[n..n + e].iter().map(|v| v.max(0.0)).collect(),
        None => vec![0.0; e],
    };
    let generation_cost = dispatch.iter().zip(&model.cost).map(|(p, c)| p * c).sum();
    Ok(OpfSolution {
        status: OpfStatus::Optimal,
        dispatch,
        flows,
        generation_cost,
        violation,
        objective: out.objective,
    })
}

/// `C(φ)`: minimum-cost dispatch with every line flow within `±φ`.
pub fn solve_opf(ptdf: &DMatrix<f64>, phi: &[f64], model: &OpfModel) -> Result<OpfSolution> {
    check_inputs(ptdf, phi, model)?;
    let lp = opf_program(ptdf, phi, model, None);
    finish(ptdf, model, &dpgrid_solver::solve_lp(&lp)?, None)
}

/// `C^R(φ)`: like [`solve_opf`] but a line may exceed `φ` by `v` at cost ψ·v.
/// Infeasible only when the generator limits cannot meet the load.
pub fn solve_relaxed_opf(ptdf: &DMatrix<f64>, phi: &[f64], model: &OpfModel, psi: f64) -> Result<OpfSolution> {
    check_inputs(ptdf, phi, model)?;
    positive("psi", psi)?;
    let lp = opf_program(ptdf, phi, model, Some(psi));
    finish(ptdf, model, &dpgrid_solver::solve_lp(&lp)?, Some(psi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationOptions {
    pub size: usize,
    /// Relative half-width of the uniform perturbation of loads and limits.
    pub spread: f64,
    pub cost_range: (f64, f64),
    /// Perturb `p_min` as well as `p_max`.
    pub sample_p_min: bool,
    /// Draws allowed per model before sampling gives up.
    pub max_tries: usize,
}

impl Default for PopulationOptions {
    fn default() -> Self {
        Self { size: 100, spread: 0.125, cost_range: (80.0, 100.0), sample_p_min: false, max_tries: 1000 }
    }
}

/// Public OPF instances sharing one network.
#[derive(Debug, Clone)]
pub struct OpfPopulation {
    pub network: Network,
    pub models: Vec<OpfModel>,
    /// Upper bound `c̄` on every generator cost; the sampled maximum by default.
    pub cost_bound: f64,
}

impl OpfPopulation {
    pub fn new(network: Network, models: Vec<OpfModel>, cost_bound: f64) -> Result<Self> {
        positive("cost bound", cost_bound)?;
        if models.is_empty() {
            return Err(Error::Parameter("population is empty".into()));
        }
        for m in &models {
            m.validate(network.num_buses())?;
            if m.cost.iter().any(|&c| c > cost_bound) {
                return Err(Error::Parameter("a generator cost exceeds the population cost bound".into()));
            }
        }
        Ok(Self { network, models, cost_bound })
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

/// Draws `size` instances around the case's nominal data, keeping only those
/// feasible at `capacities`.
pub fn sample_population<R: Rng + ?Sized>(
    network: &Network,
    capacities: &[f64],
    options: &PopulationOptions,
    rng: &mut R,
) -> Result<OpfPopulation> {
    let (c_lo, c_hi) = options.cost_range;
    if !(c_lo.is_finite() && c_hi.is_finite() && 0.0 < c_lo && c_lo <= c_hi) {
        return Err(Error::Parameter(format!("invalid cost range ({c_lo}, {c_hi})")));
    }
    if !(options.spread.is_finite() && (0.0..1.0).contains(&options.spread)) {
        return Err(Error::Parameter(format!("spread must lie in [0, 1), got {}", options.spread)));
    }
    if options.size == 0 || options.max_tries == 0 {
        return Err(Error::Parameter("population size and max_tries must be positive".into()));
    }
    let nominal = network.nominal_model();
    let s = options.spread;
    let factor = |rng: &mut R| if s == 0.0 { 1.0 } else { rng.random_range(1.0 - s..=1.0 + s) };
    let mut models = Vec::with_capacity(options.size);
    for k in 0..options.size {
        let mut accepted = None;
        for _ in 0..options.max_tries {
            let mut m = nominal.clone();
            for j in 0..m.num_buses() {
                m.load[j] *= factor(rng);
                if network.has_generator(j) {
                    m.p_max[j] *= factor(rng);
                    if options.sample_p_min {
                        m.p_min[j] *= factor(rng);
                    }
                    m.p_min[j] = m.p_min[j].min(m.p_max[j]);
                    m.cost[j] = if c_lo == c_hi { c_lo } else { rng.random_range(c_lo..=c_hi) };
                }
            }
            if solve_opf(network.ptdf(), capacities, &m)?.is_feasible() {
                accepted = Some(m);
                break;
            }
        }
        match accepted {
            Some(m) => models.push(m),
            None => {
                return Err(Error::Optimization(format!(
                    "model {k}: no feasible draw in {} tries",
                    options.max_tries
                )))
            }
        }
    }
    let c_max = models.iter().flat_map(|m| m.cost.iter().copied()).fold(0.0, f64::max);
    OpfPopulation::new(network.clone(), models, c_max)
}

/// A capacity perturbation whose cost change exceeds `c̄·α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityWitness {
    pub model: usize,
    pub line: usize,
    pub delta: f64,
    pub cost_change: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// Models infeasible at the real capacities.
    pub infeasible_models: Vec<usize>,
    pub sensitivity_witnesses: Vec<SensitivityWitness>,
    pub probes: usize,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.infeasible_models.is_empty() && self.sensitivity_witnesses.is_empty()
    }
}

/// Checks that every model is feasible at `capacities`, and probes whether
/// moving one line capacity by `±α` changes any model's cost by more than
/// `c̄·α`. Probes where either side is infeasible are skipped.
pub fn check_assumptions<R: Rng + ?Sized>(
    population: &OpfPopulation,
    capacities: &[f64],
    alpha: f64,
    probes: usize,
    rng: &mut R,
) -> Result<AssumptionReport> {
    positive("alpha", alpha)?;
    let ptdf = population.network.ptdf();
    let mut infeasible_models = Vec::new();
    let mut base_cost = Vec::with_capacity(population.len());
    for (i, m) in population.models.iter().enumerate() {
        let sol = solve_opf(ptdf, capacities, m)?;
        if !sol.is_feasible() {
            infeasible_models.push(i);
        }
        base_cost.push(sol.objective);
    }
    let bound = population.cost_bound * alpha;
    let mut witnesses = Vec::new();
    for _ in 0..probes {
        let i = rng.random_range(0..population.len());
        let l = rng.random_range(0..capacities.len());
        let delta = if rng.random::<bool>() { alpha } else { -alpha };
        if !base_cost[i].is_finite() || capacities[l] + delta < 0.0 {
            continue;
        }
        let mut phi = capacities.to_vec();
        phi[l] += delta;
        let sol = solve_opf(ptdf, &phi, &population.models[i])?;
        if !sol.is_feasible() {
            continue;
        }
        let change = (sol.objective - base_cost[i]).abs();
        if change > bound * (1.0 + 1e-9) + 1e-9 {
            witnesses.push(SensitivityWitness { model: i, line: l, delta, cost_change: change, bound });
        }
    }
    Ok(AssumptionReport { infeasible_models, sensitivity_witnesses: witnesses, probes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_bus(cap: f64, second_gen: bool) -> Network {
        let mut generators = vec![Generator { bus: 1, cost: 10.0, p_min: 0.0, p_max: 100.0 }];
        if second_gen {
            generators.push(Generator { bus: 2, cost: 20.0, p_min: 0.0, p_max: 100.0 });
        }
        Network::from_case(NetworkCase {
            base_mva: 100.0,
            buses: vec![Bus { id: 1, load_mw: 0.0 }, Bus { id: 2, load_mw: 50.0 }],
            lines: vec![Line { from: 1, to: 2, susceptance_pu: 10.0, capacity_mw: cap }],
            generators,
            slack: 1,
        })
        .unwrap()
    }

    #[test]
    fn two_bus_ptdf() {
        let net = two_bus(100.0, false);
        assert_eq!(net.ptdf().as_slice(), &[0.0, -1.0]);
    }

    #[test]
    fn two_bus_costs() {
        let net = two_bus(100.0, false);
        let sol = solve_opf(net.ptdf(), &[100.0], &net.nominal_model()).unwrap();
        assert!((sol.objective - 500.0).abs() < 1e-9);
        assert!((sol.flows[0] - 50.0).abs() < 1e-9);

        let net = two_bus(40.0, true);
        let sol = solve_opf(net.ptdf(), &[40.0], &net.nominal_model()).unwrap();
        assert!((sol.objective - 600.0).abs() < 1e-9);
        assert!((sol.dispatch[0] - 40.0).abs() < 1e-9 && (sol.dispatch[1] - 10.0).abs() < 1e-9);

        let net = two_bus(40.0, false);
        let sol = solve_opf(net.ptdf(), &[40.0], &net.nominal_model()).unwrap();
        assert_eq!(sol.status, OpfStatus::Infeasible);
        let rel = solve_relaxed_opf(net.ptdf(), &[40.0], &net.nominal_model(), 3000.0).unwrap();
        assert!((rel.objective - 30500.0).abs() < 1e-9);
        assert!((rel.violation[0] - 10.0).abs() < 1e-9);
    }

    /// Duality gap and complementary slackness recomputed from the raw LP
    /// and its multipliers.
    #[test]
    fn lp_optimality_certificates() {
        let case = NetworkCase::from_json(include_str!("../../../data/case6ww.json")).unwrap();
        let net = Network::from_case(case).unwrap();
        let caps = net.capacities();
        let mut rng = crate::dp::rng_from_seed(3);
        let opts = PopulationOptions { size: 20, ..PopulationOptions::default() };
        let pop = sample_population(&net, &caps, &opts, &mut rng).unwrap();
        let tight: Vec<f64> = caps.iter().map(|c| 0.7 * c).collect();
        for m in &pop.models {
            for (phi, psi) in [(&caps, None), (&tight, Some(3000.0))] {
                let lp = opf_program(net.ptdf(), phi, m, psi);
                let out = dpgrid_solver::solve_lp(&lp).unwrap();
                assert_eq!(out.status, Status::Optimal);
                let y = out.duals.as_ref().unwrap();
                let mut reduced = lp.objective.clone();
                let mut dual_obj = 0.0;
                for (row, &yi) in lp.rows.iter().zip(y) {
                    for &(j, a) in &row.coeffs {
                        reduced[j] -= a * yi;
                    }
                    dual_obj += row.rhs * yi;
                    let slack = row.activity(&out.x) - row.rhs;
                    assert!((yi * slack).abs() <= 1e-6, "row complementarity {}", yi * slack);
                }
                for j in 0..lp.num_vars() {
                    let r = reduced[j];
                    let at = if r > 0.0 { lp.lower[j] } else { lp.upper[j] };
                    if r.abs() > 1e-9 {
                        assert!(at.is_finite(), "reduced cost {r} on an unbounded side");
                        dual_obj += r * at;
                        assert!((r * (out.x[j] - at)).abs() <= 1e-6);
                    }
                }
                let cost = lp.objective_value(&out.x);
                assert!((cost - dual_obj).abs() <= 1e-6 * (1.0 + cost.abs()), "gap {cost} vs {dual_obj}");
            }
        }
    }

    #[test]
    fn rejects_bad_cases() {
        let mut case = two_bus(10.0, false).case().clone();
        case.buses.push(Bus { id: 3, load_mw: 0.0 });
        assert!(matches!(Network::from_case(case.clone()), Err(Error::Network(_))));
        case.buses.pop();
        case.generators.push(case.generators[0].clone());
        assert!(Network::from_case(case).is_err());
    }
}
