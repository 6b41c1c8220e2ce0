//! Kernel ridge regression and its prediction-error bounds.

use crate::gram::KernelMatrix;
use qml_core::{Error, Result, RVec};
use serde::{Deserialize, Serialize};

/// A fitted dual-form ridge model: coefficients `a = (K + lambda I)^-1 y`
/// over the training set, predicting `sum_i a_i k(x_i, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub targets: Vec<f64>,
}

impl RidgeModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ridge models serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("ridge model JSON: {e}")))
    }
}

fn solve_regularized(k: &KernelMatrix, y: &[f64], lambda: f64) -> Result<RVec> {
    let n = k.len();
    let mut system = k.entries().clone();
    for i in 0..n {
        system[(i, i)] += lambda;
    }
    let rhs = RVec::from_column_slice(y);
    let solution = system
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .or_else(|| system.clone().lu().solve(&rhs))
        .ok_or_else(|| {
            Error::Singular("kernel system (K + lambda I) is singular; increase lambda".into())
        })?;
    let residual = (&system * &solution - &rhs).amax();
    let scale = rhs.amax().max(1.0);
    if residual > 1e-8 * scale {
        return Err(Error::Singular(format!(
            "kernel system solve left residual {residual:.3e}; the system is numerically singular"
        )));
    }
    Ok(solution)
}

/// Fit dual coefficients `a = (K + lambda I)^-1 y`.
pub fn ridge_fit(k: &KernelMatrix, y: &[f64], lambda: f64) -> Result<RidgeModel> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ridge lambda must be finite and >= 0, got {lambda}"
        )));
    }
    if y.len() != k.len() {
        return Err(Error::InvalidArgument(format!(
            "target count {} does not match kernel size {}",
            y.len(),
            k.len()
        )));
    }
    let solution = solve_regularized(k, y, lambda)?;
    Ok(RidgeModel {
        coefficients: solution.iter().copied().collect(),
        lambda,
        targets: y.to_vec(),
    })
}

/// Predict at a new point from its kernel vector against the training set.
pub fn ridge_predict(model: &RidgeModel, kernel_values: &[f64]) -> Result<f64> {
    if kernel_values.len() != model.coefficients.len() {
        return Err(Error::InvalidArgument(format!(
            "kernel vector length {} does not match model size {}",
            kernel_values.len(),
            model.coefficients.len()
        )));
    }
    Ok(model
        .coefficients
        .iter()
        .zip(kernel_values)
        .map(|(a, k)| a * k)
        .sum())
}

/// Upper bounds on ridge regression error, both per-sample RMS scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskBounds {
    /// Training error: `sqrt(lambda^2 y^T (K + lambda I)^-2 y / n)`.
    pub train_bound: f64,
    /// Held-out error: `sqrt(y^T (K + lambda I)^-1 K (K + lambda I)^-1 y / n)
    /// + sqrt(ln(1/delta) / n)`.
    pub gen_bound: f64,
}

/// Bound the training and generalization error of a ridge fit at the given
/// regularization strength and confidence level.
pub fn kernel_risk_bounds(
    k: &KernelMatrix,
    y: &[f64],
    lambda: f64,
    delta: f64,
) -> Result<RiskBounds> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence parameter delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ridge lambda must be finite and >= 0, got {lambda}"
        )));
    }
    if y.len() != k.len() {
        return Err(Error::InvalidArgument(format!(
            "target count {} does not match kernel size {}",
            y.len(),
            k.len()
        )));
    }
    let n = k.len() as f64;
    let u = solve_regularized(k, y, lambda)?;
    let train_bound = lambda * (u.dot(&u) / n).sqrt();
    let ku: RVec = k.entries() * &u;
    let quad = u.dot(&ku).max(0.0);
    let gen_bound = (quad / n).sqrt() + ((1.0 / delta).ln() / n).sqrt();
    Ok(RiskBounds { train_bound, gen_bound })
}
