//! Canonical problem forms shared by every backend.
//!
//! All problems are minimizations. Variables carry simple bounds (possibly
//! infinite), rows are sparse linear forms compared against a right-hand side.

use crate::error::{Result, SolverError};

/// Comparison of a row activity against its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }
}

/// `min c'x + offset  s.t.  rows,  lower <= x <= upper`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    /// Adds a row and returns its index. Zero coefficients are dropped and
    /// repeated indices merged.
    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        self.rows.push(Row {
            coeffs: merge_terms(coeffs),
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset + dot(&self.objective, x)
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .rows
            .iter()
            .map(|r| r.violation(x))
            .fold(0.0, f64::max);
        let bounds = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| (lo - v).max(v - hi).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(SolverError::Malformed(format!(
                "{} objective coefficients but {} lower / {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        if !self.objective_offset.is_finite() {
            return Err(SolverError::Malformed("non-finite objective offset".into()));
        }
        for (j, ((&c, &lo), &hi)) in self
            .objective
            .iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .enumerate()
        {
            if !c.is_finite() {
                return Err(SolverError::Malformed(format!("objective coefficient of x{j} is {c}")));
            }
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(SolverError::Malformed(format!("invalid bounds [{lo}, {hi}] on x{j}")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(SolverError::Malformed(format!("row {i} has rhs {}", row.rhs)));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(SolverError::Malformed(format!(
                        "row {i} references x{j} but only {n} variables exist"
                    )));
                }
                if !a.is_finite() {
                    return Err(SolverError::Malformed(format!("row {i} coefficient on x{j} is {a}")));
                }
            }
        }
        Ok(())
    }
}

/// A linear form plus constant.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffineExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl AffineExpr {
    pub fn new(terms: Vec<(usize, f64)>, constant: f64) -> Self {
        Self {
            terms: merge_terms(terms),
            constant,
        }
    }

    pub fn var(j: usize) -> Self {
        Self::new(vec![(j, 1.0)], 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Vec::new(), c)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(j, a)| a * x[j]).sum::<f64>()
    }
}

/// `head >= || tail ||_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderCone {
    pub head: AffineExpr,
    pub tail: Vec<AffineExpr>,
}

impl SecondOrderCone {
    /// Positive when the cone constraint is violated at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let norm = self
            .tail
            .iter()
            .map(|e| e.eval(x).powi(2))
            .sum::<f64>()
            .sqrt();
        (norm - self.head.eval(x)).max(0.0)
    }

    pub fn dim(&self) -> usize {
        1 + self.tail.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConicProgram {
    pub lp: LinearProgram,
    pub cones: Vec<SecondOrderCone>,
}

impl ConicProgram {
    pub fn new(lp: LinearProgram) -> Self {
        Self {
            lp,
            cones: Vec::new(),
        }
    }

    pub fn add_cone(&mut self, head: AffineExpr, tail: Vec<AffineExpr>) -> usize {
        self.cones.push(SecondOrderCone { head, tail });
        self.cones.len() - 1
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.cones
            .iter()
            .map(|c| c.violation(x))
            .fold(self.lp.max_violation(x), f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        self.lp.validate()?;
        let n = self.lp.num_vars();
        for (k, cone) in self.cones.iter().enumerate() {
            for e in std::iter::once(&cone.head).chain(&cone.tail) {
                if !e.constant.is_finite() {
                    return Err(SolverError::Malformed(format!("cone {k} has a non-finite constant")));
                }
                for &(j, a) in &e.terms {
                    if j >= n || !a.is_finite() {
                        return Err(SolverError::Malformed(format!(
                            "cone {k} has invalid term ({j}, {a})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Limits and tolerances for branch-and-bound.
#[derive(Debug, Clone, PartialEq)]
pub struct MipLimits {
    pub relative_gap: f64,
    pub absolute_gap: f64,
    pub max_nodes: usize,
}

impl Default for MipLimits {
    fn default() -> Self {
        Self {
            relative_gap: 1e-6,
            absolute_gap: 1e-9,
            max_nodes: 200_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MixedIntegerProgram {
    pub lp: LinearProgram,
    /// Indices of variables restricted to {0, 1}.
    pub binaries: Vec<usize>,
    pub limits: MipLimits,
    /// Optional starting point; used as the first incumbent when feasible.
    pub start: Option<Vec<f64>>,
}

impl MixedIntegerProgram {
    pub fn new(lp: LinearProgram) -> Self {
        Self {
            lp,
            ..Default::default()
        }
    }

    /// Adds a {0,1} variable.
    pub fn add_binary(&mut self, cost: f64) -> usize {
        let j = self.lp.add_var(cost, 0.0, 1.0);
        self.binaries.push(j);
        j
    }

    pub fn validate(&self) -> Result<()> {
        self.lp.validate()?;
        for &j in &self.binaries {
            if j >= self.lp.num_vars() {
                return Err(SolverError::Malformed(format!("binary index {j} out of range")));
            }
            if self.lp.lower[j] != 0.0 || self.lp.upper[j] != 1.0 {
                return Err(SolverError::Malformed(format!(
                    "binary x{j} must have bounds [0, 1], found [{}, {}]",
                    self.lp.lower[j], self.lp.upper[j]
                )));
            }
        }
        if let Some(start) = &self.start {
            if start.len() != self.lp.num_vars() {
                return Err(SolverError::Malformed("start vector has the wrong length".into()));
            }
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn merge_terms(mut terms: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    terms.sort_by_key(|t| t.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
    for (j, a) in terms {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += a,
            _ => out.push((j, a)),
        }
    }
    out.retain(|t| t.1 != 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_merge_duplicate_terms() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 0.0, 1.0);
        let y = lp.add_var(1.0, 0.0, 1.0);
        lp.add_row(vec![(y, 1.0), (x, 2.0), (y, -1.0), (x, 0.5)], Sense::Le, 1.0);
        assert_eq!(lp.rows[0].coeffs, vec![(x, 2.5)]);
    }

    #[test]
    fn validate_rejects_bad_index_and_bounds() {
        let mut lp = LinearProgram::new();
        lp.add_var(1.0, 0.0, 1.0);
        lp.add_row(vec![(3, 1.0)], Sense::Le, 1.0);
        assert!(lp.validate().is_err());

        let mut lp = LinearProgram::new();
        lp.add_var(1.0, f64::INFINITY, 1.0);
        assert!(lp.validate().is_err());

        let mut mip = MixedIntegerProgram::new(LinearProgram::new());
        mip.lp.add_var(0.0, 0.0, 2.0);
        mip.binaries.push(0);
        assert!(mip.validate().is_err());
    }

    #[test]
    fn cone_violation() {
        let cone = SecondOrderCone {
            head: AffineExpr::var(0),
            tail: vec![AffineExpr::constant(3.0), AffineExpr::constant(4.0)],
        };
        assert_eq!(cone.violation(&[5.0]), 0.0);
        assert!((cone.violation(&[4.0]) - 1.0).abs() < 1e-15);
    }
}
