//! Ridge regression on radial features and the sensitivities of its outputs.
//!
//! With `A = (XᵀX + λI)⁻¹Xᵀ` the weights are `β = Ay`. Changing one entry of
//! `y` by at most α moves `β` by α times one column of `A`, and moves the
//! residual `(XA − I)y` by α times one column of `XA − I`. The bounds below are
//! the worst case over columns.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dp::AdjacencyParam;
use crate::error::{positive, Error, Result};

/// Radial-basis centers for `X_ij = exp(-(width·|x_i - μ_j|)²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub centers: Vec<f64>,
    pub width: f64,
}

impl FeatureSpec {
    pub fn new(centers: Vec<f64>, width: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::Parameter("at least one feature center is required".into()));
        }
        if centers.iter().any(|c| !c.is_finite()) || centers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("feature centers must be finite and strictly increasing".into()));
        }
        positive("feature width", width)?;
        Ok(Self { centers, width })
    }

    /// Five centers over the 2.5 to 12.5 m/s operating range.
    pub fn wind() -> Self {
        Self { centers: vec![2.5, 5.0, 7.5, 10.0, 12.5], width: 0.5 }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self::wind()
    }
}

/// Ridge strength used throughout unless configured otherwise.
pub const DEFAULT_LAMBDA: f64 = 1e-3;

pub fn rbf_features(inputs: &[f64], spec: &FeatureSpec) -> Result<DMatrix<f64>> {
    if inputs.is_empty() {
        return Err(Error::Dimension("feature matrix needs at least one input".into()));
    }
    if let Some(bad) = inputs.iter().find(|x| !x.is_finite()) {
        return Err(Error::Parameter(format!("inputs must be finite, got {bad}")));
    }
    Ok(DMatrix::from_fn(inputs.len(), spec.len(), |i, j| {
        let r = spec.width * (inputs[i] - spec.centers[j]).abs();
        (-r * r).exp()
    }))
}

/// Ridge fit of `y` on `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub beta: DVector<f64>,
    /// Unsquared residual norm `‖Xβ - y‖₂`.
    pub loss: f64,
}

/// The design matrix with its ridge operator `A = (XᵀX + λI)⁻¹Xᵀ` factored
/// once, so repeated fits and the sensitivity bounds share the work.
#[derive(Debug, Clone)]
pub struct RidgeSystem {
    x: DMatrix<f64>,
    lambda: f64,
    operator: DMatrix<f64>,
}

impl RidgeSystem {
    pub fn new(x: DMatrix<f64>, lambda: f64) -> Result<Self> {
        positive("ridge lambda", lambda)?;
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::Dimension("design matrix must be non-empty".into()));
        }
        let mut gram = x.transpose() * &x;
        for j in 0..gram.ncols() {
            gram[(j, j)] += lambda;
        }
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::Optimization("regularized Gram matrix is not positive definite".into()))?;
        let operator = chol.solve(&x.transpose());
        Ok(Self { x, lambda, operator })
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `A = (XᵀX + λI)⁻¹Xᵀ`, shape `p × m`.
    pub fn operator(&self) -> &DMatrix<f64> {
        &self.operator
    }

    pub fn num_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn num_features(&self) -> usize {
        self.x.ncols()
    }

    fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.num_samples() {
            return Err(Error::Dimension(format!(
                "expected {} targets, got {}",
                self.num_samples(),
                y.len()
            )));
        }
        Ok(())
    }

    pub fn weights(&self, y: &[f64]) -> Result<DVector<f64>> {
        self.check_len(y)?;
        Ok(&self.operator * DVector::from_column_slice(y))
    }

    /// `‖Xβ - y‖₂` for the given weights.
    pub fn residual_norm(&self, beta: &DVector<f64>, y: &[f64]) -> Result<f64> {
        self.check_len(y)?;
        if beta.len() != self.num_features() {
            return Err(Error::Dimension("weight vector length does not match features".into()));
        }
        Ok((&self.x * beta - DVector::from_column_slice(y)).norm())
    }

    pub fn fit(&self, y: &[f64]) -> Result<RegressionResult> {
        let beta = self.weights(y)?;
        let loss = self.residual_norm(&beta, y)?;
        Ok(RegressionResult { beta, loss })
    }

    /// L1 sensitivity of `β`: α times the largest column abs-sum of `A`.
    pub fn weight_sensitivity(&self, alpha: AdjacencyParam) -> f64 {
        let worst = self
            .operator
            .column_iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        alpha.get() * worst
    }

    /// Sensitivity of the loss: α times the largest column norm of `XA - I`.
    ///
    /// Column `i` is `X a_i - e_i` with `a_i = A e_i`; its squared norm is
    /// `a_iᵀ(XᵀX)a_i - 2 x_iᵀa_i + 1`, which avoids forming the `m × m` hat
    /// matrix.
    pub fn loss_sensitivity(&self, alpha: AdjacencyParam) -> f64 {
        let gram = self.x.transpose() * &self.x;
        let worst = (0..self.num_samples())
            .map(|i| {
                let a = self.operator.column(i);
                let quad = (a.transpose() * &gram * a)[(0, 0)];
                let cross = self.x.row(i).dot(&a.transpose());
                (quad - 2.0 * cross + 1.0).max(0.0).sqrt()
            })
            .fold(0.0, f64::max);
        alpha.get() * worst
    }
}

pub fn ridge_fit(x: &DMatrix<f64>, y: &[f64], lambda: f64) -> Result<RegressionResult> {
    RidgeSystem::new(x.clone(), lambda)?.fit(y)
}

pub fn weight_sensitivity(x: &DMatrix<f64>, lambda: f64, alpha: AdjacencyParam) -> Result<f64> {
    Ok(RidgeSystem::new(x.clone(), lambda)?.weight_sensitivity(alpha))
}

pub fn loss_sensitivity(x: &DMatrix<f64>, lambda: f64, alpha: AdjacencyParam) -> Result<f64> {
    Ok(RidgeSystem::new(x.clone(), lambda)?.loss_sensitivity(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_identical_rows() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let fit = ridge_fit(&x, &[1.0, 1.0], 2.0).unwrap();
        assert!((fit.beta[0] - 0.5).abs() < 1e-15);
        assert!((fit.loss - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lambda_must_be_positive() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        assert!(ridge_fit(&x, &[1.0, 1.0], 0.0).is_err());
        assert!(ridge_fit(&x, &[1.0], 1.0).is_err());
    }

    #[test]
    fn features_match_the_formula() {
        let x = rbf_features(&[2.5, 7.0], &FeatureSpec::wind()).unwrap();
        assert_eq!(x[(0, 0)], 1.0);
        let expected = (-(0.5f64 * 0.5).powi(2)).exp();
        assert!((x[(1, 2)] - expected).abs() < 1e-15);
        assert!(FeatureSpec::new(vec![1.0, 1.0], 0.5).is_err());
    }

    #[test]
    fn sensitivities_against_dense_reference() {
        let speeds: Vec<f64> = (0..30).map(|i| 2.5 + i as f64 / 3.0).collect();
        let x = rbf_features(&speeds, &FeatureSpec::wind()).unwrap();
        let sys = RidgeSystem::new(x.clone(), 1e-3).unwrap();
        let alpha = AdjacencyParam::new(0.2).unwrap();
        let a = sys.operator();
        let h = &x * a;
        let hm = h - DMatrix::<f64>::identity(30, 30);
        let dense_loss = (0..30).map(|i| hm.column(i).norm()).fold(0.0, f64::max) * 0.2;
        let dense_beta = (0..30).map(|i| a.column(i).lp_norm(1)).fold(0.0, f64::max) * 0.2;
        assert!((sys.loss_sensitivity(alpha) - dense_loss).abs() < 1e-10);
        assert!((sys.weight_sensitivity(alpha) - dense_beta).abs() < 1e-12);
    }
}
