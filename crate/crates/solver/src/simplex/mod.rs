//! Bounded-variable revised simplex.
//!
//! Every row `i` gets a logical variable `w_i = a_i x` whose bounds encode the
//! row sense, so the working system is `A x - w = 0` with all restrictions
//! expressed as simple bounds. A composite phase 1 (minimize the sum of bound
//! violations of the basic variables) starts from any basis, which is what
//! lets branch-and-bound reoptimize a child node from its parent's basis.
//! Pricing is Dantzig's rule with a Harris two-pass ratio test; after a run of
//! degenerate pivots the engine falls back to Bland's rule until progress
//! resumes.

mod lu;

use crate::error::{Result, SolverError};
use crate::outcome::{lp_residuals, SolveOutcome, Status};
use crate::problem::{LinearProgram, Sense};
use lu::Factor;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptions {
    pub primal_tol: f64,
    pub dual_tol: f64,
    pub pivot_tol: f64,
    pub max_iterations: usize,
    /// Product-form updates kept before the basis is refactored.
    pub refactor_interval: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_limit: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            primal_tol: 1e-9,
            dual_tol: 1e-9,
            pivot_tol: 1e-9,
            max_iterations: 50_000,
            refactor_interval: 64,
            degenerate_limit: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarState {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic variable resting at zero.
    Zero,
}

/// Basis snapshot that can be reloaded into an engine with the same shape.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Basis {
    head: Vec<usize>,
    state: Vec<VarState>,
}

/// A terminal basis is refactored and rechecked when at least this many
/// product-form updates have accumulated since the last factorization.
const VERIFY_AFTER_UPDATES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

pub(crate) struct Engine {
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    head: Vec<usize>,
    state: Vec<VarState>,
    factor: Factor,
    opts: SimplexOptions,
    pub iterations: usize,
}

enum Step {
    Flip,
    Pivot { pos: usize, to: VarState },
}

impl Engine {
    pub fn new(lp: &LinearProgram, opts: SimplexOptions) -> Result<Self> {
        lp.validate()?;
        let n = lp.num_vars();
        let m = lp.num_rows();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                cols[j].push((i, a));
            }
        }
        let mut col_start = Vec::with_capacity(n + 1);
        let mut col_row = Vec::new();
        let mut col_val = Vec::new();
        col_start.push(0);
        for c in &cols {
            for &(i, a) in c {
                col_row.push(i);
                col_val.push(a);
            }
            col_start.push(col_row.len());
        }
        let mut lo = lp.lower.clone();
        let mut hi = lp.upper.clone();
        for row in &lp.rows {
            let (l, h) = match row.sense {
                Sense::Le => (f64::NEG_INFINITY, row.rhs),
                Sense::Ge => (row.rhs, f64::INFINITY),
                Sense::Eq => (row.rhs, row.rhs),
            };
            lo.push(l);
            hi.push(h);
        }
        let mut cost = lp.objective.clone();
        cost.resize(n + m, 0.0);

        let mut state = vec![VarState::Basic; n + m];
        let mut x = vec![0.0; n + m];
        for j in 0..n {
            let (s, v) = nonbasic_rest(lo[j], hi[j], cost[j]);
            state[j] = s;
            x[j] = v;
        }
        let head = (n..n + m).collect();
        let mut e = Engine {
            m,
            n,
            col_start,
            col_row,
            col_val,
            cost,
            lo,
            hi,
            x,
            head,
            state,
            factor: Factor::default(),
            opts,
            iterations: 0,
        };
        e.refactor()?;
        e.recompute_basics();
        Ok(e)
    }

    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|k| (self.col_row[k], self.col_val[k]))
                .collect()
        } else {
            vec![(j - self.n, -1.0)]
        }
    }

    fn dense_column(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.m];
        for (i, a) in self.column(j) {
            v[i] = a;
        }
        v
    }

    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|k| self.col_val[k] * y[self.col_row[k]])
                .sum()
        } else {
            -y[j - self.n]
        }
    }

    fn refactor(&mut self) -> Result<()> {
        for _ in 0..=self.m {
            let cols: Vec<_> = self.head.iter().map(|&j| self.column(j)).collect();
            match Factor::new(self.m, &cols) {
                Ok(f) => {
                    self.factor = f;
                    return Ok(());
                }
                Err(sing) => {
                    for (&pos, &row) in sing.positions.iter().zip(&sing.rows) {
                        let out = self.head[pos];
                        let (s, v) = nonbasic_rest_at(self.lo[out], self.hi[out], self.x[out]);
                        self.state[out] = s;
                        self.x[out] = v;
                        let logical = self.n + row;
                        self.head[pos] = logical;
                        self.state[logical] = VarState::Basic;
                    }
                }
            }
        }
        Err(SolverError::Numerical("basis repair did not converge".into()))
    }

    pub fn recompute_basics(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.n + self.m {
            if self.state[j] != VarState::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                for (i, a) in self.column(j) {
                    rhs[i] -= a * xj;
                }
            }
        }
        let xb = self.factor.ftran(&rhs);
        for (pos, &j) in self.head.iter().enumerate() {
            self.x[j] = xb[pos];
        }
    }

    fn feas_tol(&self, v: f64) -> f64 {
        self.opts.primal_tol * (1.0 + v.abs())
    }

    /// Phase-1 cost of each basic variable: -1 below its lower bound, +1 above
    /// its upper bound.
    fn infeasibility_costs(&self) -> (Vec<f64>, f64) {
        let mut c = vec![0.0; self.m];
        let mut total = 0.0;
        for (pos, &j) in self.head.iter().enumerate() {
            let v = self.x[j];
            if v < self.lo[j] - self.feas_tol(self.lo[j]) {
                c[pos] = -1.0;
                total += self.lo[j] - v;
            } else if v > self.hi[j] + self.feas_tol(self.hi[j]) {
                c[pos] = 1.0;
                total += v - self.hi[j];
            }
        }
        (c, total)
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lo[j] = lo;
        self.hi[j] = hi;
        if self.state[j] != VarState::Basic {
            let (s, v) = nonbasic_rest_at(lo, hi, self.x[j]);
            let s = match (self.state[j], s) {
                (VarState::Upper, _) if hi.is_finite() => VarState::Upper,
                (VarState::Lower, _) if lo.is_finite() => VarState::Lower,
                _ => s,
            };
            self.state[j] = s;
            self.x[j] = match s {
                VarState::Lower => lo,
                VarState::Upper => hi,
                _ => v,
            };
        }
    }

    pub fn basis(&self) -> Basis {
        Basis {
            head: self.head.clone(),
            state: self.state.clone(),
        }
    }

    pub fn load_basis(&mut self, basis: &Basis) -> Result<()> {
        self.head.clone_from(&basis.head);
        self.state.clone_from(&basis.state);
        for j in 0..self.n + self.m {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let v = match self.state[j] {
                VarState::Lower if self.lo[j].is_finite() => self.lo[j],
                VarState::Upper if self.hi[j].is_finite() => self.hi[j],
                _ => {
                    let (s, v) = nonbasic_rest(self.lo[j], self.hi[j], self.cost[j]);
                    self.state[j] = s;
                    v
                }
            };
            self.x[j] = v;
        }
        self.refactor()?;
        self.recompute_basics();
        Ok(())
    }

    /// Runs the simplex method from the current basis: the dual method while
    /// the basis stays dual feasible, then the primal method to finish.
    pub fn optimize(&mut self) -> Result<LpStatus> {
        if let Some(status) = self.dual_simplex()? {
            if status != LpStatus::Optimal {
                return Ok(status);
            }
        }
        self.primal_simplex()
    }

    /// Reduced costs `c_j - a_jᵀy` for the phase-2 costs (zero for basics).
    fn reduced_costs(&self) -> Vec<f64> {
        let cb: Vec<f64> = self.head.iter().map(|&j| self.cost[j]).collect();
        let y = self.factor.btran(&cb);
        (0..self.n + self.m)
            .map(|j| if self.state[j] == VarState::Basic { 0.0 } else { self.cost[j] - self.col_dot(j, &y) })
            .collect()
    }

    fn dual_infeasibility(&self, j: usize, d: f64) -> f64 {
        if self.state[j] == VarState::Basic || self.lo[j] == self.hi[j] {
            return 0.0;
        }
        match self.state[j] {
            VarState::Lower => (-d).max(0.0),
            VarState::Upper => d.max(0.0),
            _ => d.abs(),
        }
    }

    /// Dual simplex from a dual-feasible basis. `None` means the method does
    /// not apply (the basis is primal feasible or not dual feasible) or lost
    /// dual feasibility; the caller continues with the primal method.
    fn dual_simplex(&mut self) -> Result<Option<LpStatus>> {
        let budget = self.iterations + self.opts.max_iterations;
        let mut first = true;
        let mut retried = false;
        // Reduced costs, updated through the pivot row between refactors.
        let mut d: Vec<f64> = Vec::new();
        loop {
            if self.iterations >= budget {
                return Ok(Some(LpStatus::IterationLimit));
            }
            if self.factor.num_updates() >= self.opts.refactor_interval {
                self.refactor()?;
                self.recompute_basics();
                d.clear();
            }
            if d.is_empty() {
                d = self.reduced_costs();
                let dual_ok = (0..self.n + self.m)
                    .all(|j| self.dual_infeasibility(j, d[j]) <= self.opts.dual_tol * (1.0 + self.cost[j].abs()));
                if !dual_ok {
                    return Ok(None);
                }
            }

            // Leaving row: the most infeasible basic variable.
            let mut leave: Option<(usize, f64, VarState)> = None;
            let mut worst = 0.0;
            for (pos, &j) in self.head.iter().enumerate() {
                let v = self.x[j];
                let (lo, hi) = (self.lo[j], self.hi[j]);
                if v < lo - self.feas_tol(lo) && lo - v > worst {
                    worst = lo - v;
                    leave = Some((pos, lo, VarState::Lower));
                } else if v > hi + self.feas_tol(hi) && v - hi > worst {
                    worst = v - hi;
                    leave = Some((pos, hi, VarState::Upper));
                }
            }
            let Some((r, target, to)) = leave else {
                return Ok(if first { None } else { Some(LpStatus::Optimal) });
            };
            first = false;

            let mut unit = vec![0.0; self.m];
            unit[r] = 1.0;
            let rho = self.factor.btran(&unit);
            // x_r moves by -α_j per unit of x_j; it must rise to a lower
            // target and fall to an upper one.
            let rise = to == VarState::Lower;
            let ptol = self.opts.pivot_tol;
            let mut row: Vec<(usize, f64)> = Vec::new();
            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            let mut bound = f64::INFINITY;
            for j in 0..self.n + self.m {
                let st = self.state[j];
                if st == VarState::Basic || self.lo[j] == self.hi[j] {
                    continue;
                }
                let a = self.col_dot(j, &rho);
                if a == 0.0 {
                    continue;
                }
                row.push((j, a));
                if a.abs() <= ptol {
                    continue;
                }
                let helps = match st {
                    VarState::Lower => (a < 0.0) == rise,
                    VarState::Upper => (a > 0.0) == rise,
                    _ => true,
                };
                if !helps {
                    continue;
                }
                let slack = match st {
                    VarState::Lower => d[j].max(0.0),
                    VarState::Upper => (-d[j]).max(0.0),
                    _ => 0.0,
                };
                let tol = self.opts.dual_tol * (1.0 + self.cost[j].abs());
                bound = bound.min((slack + tol) / a.abs());
                cands.push((j, slack / a.abs(), a));
            }
            let Some(&(q, _, a_q)) = cands
                .iter()
                .filter(|c| c.1 <= bound)
                .max_by(|x, y| x.2.abs().total_cmp(&y.2.abs()))
            else {
                if !retried && self.factor.num_updates() > 0 {
                    retried = true;
                    self.refactor()?;
                    self.recompute_basics();
                    d.clear();
                    continue;
                }
                return Ok(Some(LpStatus::Infeasible));
            };
            retried = false;

            let alpha = self.factor.ftran(&self.dense_column(q));
            if (alpha[r] - a_q).abs() > 1e-7 * (1.0 + a_q.abs()) {
                // Row and column disagree: the factorization has drifted.
                self.refactor()?;
                self.recompute_basics();
                d.clear();
                continue;
            }
            self.iterations += 1;
            let leaving = self.head[r];
            let theta = d[q] / a_q;
            for &(j, a) in &row {
                d[j] -= theta * a;
            }
            d[q] = 0.0;
            d[leaving] = -theta;

            let delta = (self.x[leaving] - target) / alpha[r];
            self.x[q] += delta;
            for (pos, &j) in self.head.iter().enumerate() {
                if alpha[pos] != 0.0 {
                    self.x[j] -= delta * alpha[pos];
                }
            }
            self.state[leaving] = to;
            self.x[leaving] = target;
            self.head[r] = q;
            self.state[q] = VarState::Basic;
            self.factor.update(r, &alpha);
        }
    }

    fn primal_simplex(&mut self) -> Result<LpStatus> {
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut verified = 0usize;
        let budget = self.iterations + self.opts.max_iterations;
        loop {
            if self.iterations >= budget {
                return Ok(LpStatus::IterationLimit);
            }
            if self.factor.num_updates() >= self.opts.refactor_interval {
                self.refactor()?;
                self.recompute_basics();
            }
            let (phase1_costs, infeas) = self.infeasibility_costs();
            let phase1 = infeas > 0.0;
            let cb: Vec<f64> = if phase1 {
                phase1_costs
            } else {
                self.head.iter().map(|&j| self.cost[j]).collect()
            };
            let y = self.factor.btran(&cb);

            let entering = self.price(&y, phase1, bland);
            let Some((q, dir)) = entering else {
                // Re-verify from a fresh factorization before declaring a result.
                if verified < 3 && self.factor.num_updates() >= VERIFY_AFTER_UPDATES {
                    verified += 1;
                    self.refactor()?;
                    self.recompute_basics();
                    continue;
                }
                return Ok(if phase1 {
                    LpStatus::Infeasible
                } else {
                    LpStatus::Optimal
                });
            };

            let alpha = self.factor.ftran(&self.dense_column(q));
            let (theta, step) = self.ratio_test(q, dir, &alpha, phase1, bland);
            let Some(step) = step else {
                if phase1 {
                    // Numerical trouble: a phase-1 direction must be bounded.
                    self.refactor()?;
                    self.recompute_basics();
                    if verified > 5 {
                        return Err(SolverError::Numerical("unbounded phase-1 ray".into()));
                    }
                    verified += 1;
                    continue;
                }
                return Ok(LpStatus::Unbounded);
            };
            self.iterations += 1;

            if theta <= 1e-12 {
                degenerate += 1;
                if degenerate > self.opts.degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }

            let delta = dir * theta;
            if delta != 0.0 {
                self.x[q] += delta;
                for (pos, &j) in self.head.iter().enumerate() {
                    if alpha[pos] != 0.0 {
                        self.x[j] -= delta * alpha[pos];
                    }
                }
            }
            match step {
                Step::Flip => {
                    if dir > 0.0 {
                        self.state[q] = VarState::Upper;
                        self.x[q] = self.hi[q];
                    } else {
                        self.state[q] = VarState::Lower;
                        self.x[q] = self.lo[q];
                    }
                }
                Step::Pivot { pos, to } => {
                    let out = self.head[pos];
                    self.state[out] = to;
                    self.x[out] = match to {
                        VarState::Lower => self.lo[out],
                        VarState::Upper => self.hi[out],
                        _ => self.x[out],
                    };
                    self.head[pos] = q;
                    self.state[q] = VarState::Basic;
                    self.factor.update(pos, &alpha);
                }
            }
        }
    }

    fn price(&self, y: &[f64], phase1: bool, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.n + self.m {
            let st = self.state[j];
            if st == VarState::Basic || self.lo[j] == self.hi[j] {
                continue;
            }
            let c = if phase1 { 0.0 } else { self.cost[j] };
            let d = c - self.col_dot(j, y);
            let tol = self.opts.dual_tol * (1.0 + c.abs());
            let dir = match st {
                VarState::Lower if d < -tol => 1.0,
                VarState::Upper if d > tol => -1.0,
                VarState::Zero if d.abs() > tol => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if d.abs() > best_score {
                best_score = d.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn ratio_test(
        &self,
        q: usize,
        dir: f64,
        alpha: &[f64],
        phase1: bool,
        bland: bool,
    ) -> (f64, Option<Step>) {
        let ptol = self.opts.pivot_tol;
        // (position, exact ratio, leaving state, |alpha|)
        let mut cands: Vec<(usize, f64, VarState, f64)> = Vec::new();
        let mut relaxed_min = f64::INFINITY;
        for (pos, &j) in self.head.iter().enumerate() {
            let g = -dir * alpha[pos];
            if g.abs() <= ptol {
                continue;
            }
            let v = self.x[j];
            let (lo, hi) = (self.lo[j], self.hi[j]);
            let below = v < lo - self.feas_tol(lo);
            let above = v > hi + self.feas_tol(hi);
            if phase1 && (below || above) {
                // Infeasible basics only stop the step when they reach the
                // violated bound; moving further away is priced into phase 1.
                if below && g > 0.0 {
                    let r = (lo - v) / g;
                    relaxed_min = relaxed_min.min(r);
                    cands.push((pos, r, VarState::Lower, g.abs()));
                } else if above && g < 0.0 {
                    let r = (v - hi) / -g;
                    relaxed_min = relaxed_min.min(r);
                    cands.push((pos, r, VarState::Upper, g.abs()));
                }
                continue;
            }
            if g < 0.0 && lo.is_finite() {
                let r = ((v - lo) / -g).max(0.0);
                relaxed_min = relaxed_min.min((v - lo + self.feas_tol(lo)) / -g);
                cands.push((pos, r, VarState::Lower, g.abs()));
            } else if g > 0.0 && hi.is_finite() {
                let r = ((hi - v) / g).max(0.0);
                relaxed_min = relaxed_min.min((hi - v + self.feas_tol(hi)) / g);
                cands.push((pos, r, VarState::Upper, g.abs()));
            }
        }
        let range = self.hi[q] - self.lo[q];

        let choice = if bland {
            let min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            cands
                .iter()
                .filter(|c| c.1 <= min + 1e-12)
                .min_by_key(|c| self.head[c.0])
                .copied()
        } else {
            cands
                .iter()
                .filter(|c| c.1 <= relaxed_min)
                .max_by(|a, b| a.3.total_cmp(&b.3))
                .copied()
        };

        match choice {
            Some((pos, r, to, _)) if r < range => (r, Some(Step::Pivot { pos, to })),
            _ if range.is_finite() => (range, Some(Step::Flip)),
            Some((pos, r, to, _)) => (r, Some(Step::Pivot { pos, to })),
            None => (f64::INFINITY, None),
        }
    }

    pub fn primal(&self) -> &[f64] {
        &self.x[..self.n]
    }

    /// Row duals for the true (phase 2) costs of the current basis.
    pub fn duals(&self) -> Vec<f64> {
        let cb: Vec<f64> = self.head.iter().map(|&j| self.cost[j]).collect();
        self.factor.btran(&cb)
    }

    pub fn objective(&self) -> f64 {
        (0..self.n).map(|j| self.cost[j] * self.x[j]).sum()
    }

    pub fn num_structural(&self) -> usize {
        self.n
    }
}

fn nonbasic_rest(lo: f64, hi: f64, cost: f64) -> (VarState, f64) {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            if cost < 0.0 {
                (VarState::Upper, hi)
            } else {
                (VarState::Lower, lo)
            }
        }
        (true, false) => (VarState::Lower, lo),
        (false, true) => (VarState::Upper, hi),
        (false, false) => (VarState::Zero, 0.0),
    }
}

fn nonbasic_rest_at(lo: f64, hi: f64, v: f64) -> (VarState, f64) {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            if (v - lo).abs() <= (hi - v).abs() {
                (VarState::Lower, lo)
            } else {
                (VarState::Upper, hi)
            }
        }
        (true, false) => (VarState::Lower, lo),
        (false, true) => (VarState::Upper, hi),
        (false, false) => (VarState::Zero, 0.0),
    }
}

/// Solves an LP with the reference revised simplex.
pub fn solve(lp: &LinearProgram, opts: &SimplexOptions) -> Result<SolveOutcome> {
    let mut engine = Engine::new(lp, opts.clone())?;
    let status = engine.optimize()?;
    Ok(outcome_from_engine(lp, &engine, status))
}

pub(crate) fn outcome_from_engine(lp: &LinearProgram, engine: &Engine, status: LpStatus) -> SolveOutcome {
    let n = engine.num_structural();
    match status {
        LpStatus::Optimal => {
            let x = engine.primal().to_vec();
            let duals = engine.duals();
            let (residuals, reduced) = lp_residuals(lp, &x, &duals);
            SolveOutcome {
                status: Status::Optimal,
                objective: lp.objective_value(&x),
                x,
                duals: Some(duals),
                reduced_costs: Some(reduced),
                residuals,
                iterations: engine.iterations,
                mip: None,
            }
        }
        LpStatus::Infeasible => SolveOutcome::without_solution(Status::Infeasible, n, engine.iterations),
        LpStatus::Unbounded => SolveOutcome::without_solution(Status::Unbounded, n, engine.iterations),
        LpStatus::IterationLimit => {
            let mut out = SolveOutcome::without_solution(Status::Limit, n, engine.iterations);
            out.x = engine.primal().to_vec();
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve_default(lp: &LinearProgram) -> SolveOutcome {
        solve(lp, &SimplexOptions::default()).unwrap()
    }

    #[test]
    fn single_lower_bound_row() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], Sense::Ge, 3.0);
        let out = solve_default(&lp);
        assert_eq!(out.status, Status::Optimal);
        assert!((out.x[0] - 3.0).abs() < 1e-12);
        assert!((out.objective - 3.0).abs() < 1e-12);
        assert!((out.duals.as_ref().unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], Sense::Ge, 3.0);
        lp.add_row(vec![(x, 1.0)], Sense::Le, 2.0);
        assert_eq!(solve_default(&lp).status, Status::Infeasible);
    }

    #[test]
    fn unbounded_ray_detected() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, f64::INFINITY);
        let y = lp.add_var(0.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve_default(&lp).status, Status::Unbounded);
    }

    #[test]
    fn textbook_production_lp() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-3.0, 0.0, f64::INFINITY);
        let y = lp.add_var(-5.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], Sense::Le, 4.0);
        lp.add_row(vec![(y, 2.0)], Sense::Le, 12.0);
        lp.add_row(vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
        let out = solve_default(&lp);
        assert_eq!(out.status, Status::Optimal);
        assert!((out.x[0] - 2.0).abs() < 1e-10 && (out.x[1] - 6.0).abs() < 1e-10);
        assert!((out.objective + 36.0).abs() < 1e-10);
        assert!(out.residuals.dual < 1e-9 && out.residuals.gap < 1e-8);
    }

    #[test]
    fn warm_start_after_bound_change() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, 10.0);
        let y = lp.add_var(-1.0, 0.0, 10.0);
        lp.add_row(vec![(x, 1.0), (y, 2.0)], Sense::Le, 8.0);
        let mut e = Engine::new(&lp, SimplexOptions::default()).unwrap();
        assert_eq!(e.optimize().unwrap(), LpStatus::Optimal);
        assert!((e.objective() + 8.0).abs() < 1e-12);
        e.set_bounds(x, 0.0, 2.0);
        e.recompute_basics();
        assert_eq!(e.optimize().unwrap(), LpStatus::Optimal);
        assert!((e.objective() + 5.0).abs() < 1e-12);
        let b = e.basis();
        e.set_bounds(x, 0.0, 10.0);
        e.load_basis(&b).unwrap();
        assert_eq!(e.optimize().unwrap(), LpStatus::Optimal);
        assert!((e.objective() + 8.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling LP.
        let mut lp = LinearProgram::new();
        let x: Vec<usize> = [-0.75, 150.0, -0.02, 6.0]
            .iter()
            .map(|&c| lp.add_var(c, 0.0, f64::INFINITY))
            .collect();
        lp.add_row(vec![(x[0], 0.25), (x[1], -60.0), (x[2], -0.04), (x[3], 9.0)], Sense::Le, 0.0);
        lp.add_row(vec![(x[0], 0.5), (x[1], -90.0), (x[2], -0.02), (x[3], 3.0)], Sense::Le, 0.0);
        lp.add_row(vec![(x[2], 1.0)], Sense::Le, 1.0);
        let out = solve_default(&lp);
        assert_eq!(out.status, Status::Optimal);
        assert!((out.objective + 0.05).abs() < 1e-10);
    }
}

