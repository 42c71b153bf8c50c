use dpgrid_solver::SolverError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter outside its admissible range (ε ≤ 0, α ≤ 0, λ ≤ 0, T = 0, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid network case: {0}")]
    Network(String),
    /// Noise-off mode reached a production entry point without the unsafe opt-in.
    #[error("noise-off mode requires the explicit unsafe opt-in")]
    NoiseOffRefused,
    #[error("optimization failed: {0}")]
    Optimization(String),
    /// Branch-and-bound stopped on its node budget before closing the gap.
    #[error("MIP budget exhausted with incumbent {objective} and relative gap {gap}")]
    MipLimit { objective: f64, gap: f64, incumbent: Vec<f64> },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {value}")))
    }
}
