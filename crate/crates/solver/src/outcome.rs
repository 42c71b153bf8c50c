use crate::problem::{LinearProgram, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration or node budget exhausted; `x` holds the best point found, if any.
    Limit,
}

/// Optimality residuals reported with every solution.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Residuals {
    /// Largest row, bound or cone violation.
    pub primal: f64,
    /// Largest dual sign or stationarity violation (zero when duals are absent).
    pub dual: f64,
    /// Complementarity / duality-gap residual.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MipReport {
    pub best_bound: f64,
    /// `(incumbent - best_bound) / max(1, |incumbent|)`.
    pub gap: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: Status,
    pub x: Vec<f64>,
    /// Row multipliers. For a minimization, `<=` rows have `y <= 0`, `>=` rows `y >= 0`.
    pub duals: Option<Vec<f64>>,
    /// `c - A'y` per variable.
    pub reduced_costs: Option<Vec<f64>>,
    pub objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub mip: Option<MipReport>,
}

impl SolveOutcome {
    pub fn without_solution(status: Status, n: usize, iterations: usize) -> Self {
        Self {
            status,
            x: vec![f64::NAN; n],
            duals: None,
            reduced_costs: None,
            objective: f64::NAN,
            residuals: Residuals::default(),
            iterations,
            mip: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// Recomputes LP residuals from scratch for a primal point and row duals.
///
/// The dual residual combines row-dual sign errors and reduced-cost sign
/// errors against the bound each variable sits at; the gap is the summed
/// complementarity `|y_i (a_i x - b_i)| + |d_j| * dist(x_j, bound)`.
pub fn lp_residuals(lp: &LinearProgram, x: &[f64], duals: &[f64]) -> (Residuals, Vec<f64>) {
    let n = lp.num_vars();
    let mut reduced = lp.objective.clone();
    let mut dual_err: f64 = 0.0;
    let mut gap = 0.0;
    for (row, &y) in lp.rows.iter().zip(duals) {
        for &(j, a) in &row.coeffs {
            reduced[j] -= a * y;
        }
        dual_err = match row.sense {
            Sense::Le => dual_err.max(y.max(0.0)),
            Sense::Ge => dual_err.max((-y).max(0.0)),
            Sense::Eq => dual_err,
        };
        gap += (y * (row.activity(x) - row.rhs)).abs();
    }
    for j in 0..n {
        let (lo, hi, d) = (lp.lower[j], lp.upper[j], reduced[j]);
        let span = (hi - lo).abs();
        let to_lo = (x[j] - lo).abs();
        let to_hi = (hi - x[j]).abs();
        let scale = 1e-9 * (1.0 + x[j].abs());
        let at_lo = to_lo <= scale.max(1e-9 * span.min(1.0));
        let at_hi = to_hi <= scale.max(1e-9 * span.min(1.0));
        let err = match (at_lo, at_hi) {
            (true, true) => 0.0,
            (true, false) => (-d).max(0.0),
            (false, true) => d.max(0.0),
            (false, false) => d.abs(),
        };
        dual_err = dual_err.max(err);
        let dist = if d >= 0.0 { to_lo } else { to_hi };
        if dist.is_finite() {
            gap += d.abs() * dist;
        }
    }
    (
        Residuals {
            primal: lp.max_violation(x),
            dual: dual_err,
            gap,
        },
        reduced,
    )
}
