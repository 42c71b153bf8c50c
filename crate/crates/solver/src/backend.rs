//! Backend plug-in contract: a problem goes in, a [`SolveOutcome`] comes out.
//!
//! Backends advertise which problem classes they accept. Calls for an
//! unsupported class fail with [`SolverError::Unsupported`] instead of
//! silently falling back, so a harness always knows which solver produced a
//! result.

use crate::error::{Result, SolverError};
use crate::ipm::{self, IpmOptions};
use crate::milp;
use crate::outcome::SolveOutcome;
use crate::problem::{ConicProgram, LinearProgram, MixedIntegerProgram};
use crate::simplex::{self, SimplexOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Capabilities {
    pub lp: bool,
    pub socp: bool,
    pub milp: bool,
}

pub trait Backend: Send + Sync {
    fn name(&self) -> &str;

    fn capabilities(&self) -> Capabilities;

    fn solve_lp(&self, problem: &LinearProgram) -> Result<SolveOutcome> {
        let _ = problem;
        Err(self.unsupported("LP"))
    }

    fn solve_socp(&self, problem: &ConicProgram) -> Result<SolveOutcome> {
        let _ = problem;
        Err(self.unsupported("SOCP"))
    }

    fn solve_milp(&self, problem: &MixedIntegerProgram) -> Result<SolveOutcome> {
        let _ = problem;
        Err(self.unsupported("MILP"))
    }

    fn unsupported(&self, class: &'static str) -> SolverError {
        SolverError::Unsupported {
            backend: self.name().to_string(),
            class,
        }
    }
}

/// The built-in solvers: simplex for LPs, branch-and-bound over simplex for
/// MILPs, and the interior-point method for SOCPs.
#[derive(Debug, Clone, Default)]
pub struct ReferenceBackend {
    pub simplex: SimplexOptions,
    pub ipm: IpmOptions,
}

impl Backend for ReferenceBackend {
    fn name(&self) -> &str {
        "reference"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            lp: true,
            socp: true,
            milp: true,
        }
    }

    fn solve_lp(&self, problem: &LinearProgram) -> Result<SolveOutcome> {
        simplex::solve(problem, &self.simplex)
    }

    fn solve_socp(&self, problem: &ConicProgram) -> Result<SolveOutcome> {
        ipm::solve(problem, &self.ipm)
    }

    fn solve_milp(&self, problem: &MixedIntegerProgram) -> Result<SolveOutcome> {
        milp::solve(problem, &self.simplex)
    }
}

/// Solves LPs (and SOCPs) with the interior-point method only. Useful as an
/// independent second opinion on simplex results.
#[derive(Debug, Clone, Default)]
pub struct InteriorPointBackend {
    pub options: IpmOptions,
}

impl Backend for InteriorPointBackend {
    fn name(&self) -> &str {
        "interior-point"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            lp: true,
            socp: true,
            milp: false,
        }
    }

    fn solve_lp(&self, problem: &LinearProgram) -> Result<SolveOutcome> {
        let mut out = ipm::solve(&ConicProgram::new(problem.clone()), &self.options)?;
        if let (Some(duals), true) = (&out.duals, out.is_optimal()) {
            let (res, reduced) = crate::outcome::lp_residuals(problem, &out.x, duals);
            out.residuals.dual = res.dual;
            out.reduced_costs = Some(reduced);
        }
        Ok(out)
    }

    fn solve_socp(&self, problem: &ConicProgram) -> Result<SolveOutcome> {
        ipm::solve(problem, &self.options)
    }
}

pub fn solve_lp(problem: &LinearProgram) -> Result<SolveOutcome> {
    ReferenceBackend::default().solve_lp(problem)
}

pub fn solve_socp(problem: &ConicProgram) -> Result<SolveOutcome> {
    ReferenceBackend::default().solve_socp(problem)
}

pub fn solve_milp(problem: &MixedIntegerProgram) -> Result<SolveOutcome> {
    ReferenceBackend::default().solve_milp(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsupported_class_is_an_error() {
        let b = InteriorPointBackend::default();
        assert!(!b.capabilities().milp);
        let err = b.solve_milp(&MixedIntegerProgram::default()).unwrap_err();
        assert!(matches!(err, SolverError::Unsupported { class: "MILP", .. }));
    }
}
