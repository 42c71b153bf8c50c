//! LP, SOCP and MILP problem forms with self-contained reference solvers.
//!
//! The reference solvers are sized for desk-scale instances. Anything heavier
//! can be plugged in through [`Backend`], which takes a problem and returns a
//! [`SolveOutcome`] with no callbacks in between.

pub mod backend;
pub mod error;
pub mod format;
pub mod ipm;
pub mod milp;
pub mod outcome;
pub mod problem;
pub mod simplex;

pub use backend::{
    solve_lp, solve_milp, solve_socp, Backend, Capabilities, InteriorPointBackend,
    ReferenceBackend,
};
pub use error::{Result, SolverError};
pub use format::Problem;
pub use ipm::IpmOptions;
pub use outcome::{MipReport, Residuals, SolveOutcome, Status};
pub use problem::{
    AffineExpr, ConicProgram, LinearProgram, MipLimits, MixedIntegerProgram, Row,
    SecondOrderCone, Sense,
};
pub use simplex::SimplexOptions;
