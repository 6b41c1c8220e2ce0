//! Closed-form capacity diagnostics for variational models: the log
//! covering number of the hypothesis class and the resulting
//! generalization-error bound. Pure formula evaluation; neither bound is
//! claimed tight.

use qml_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Resolution at which the covering number is reported.
pub const COVERING_EPSILON: f64 = 0.05;

/// Evaluated bounds for one architecture/sample-size combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityBounds {
    /// `2^(2k) N_gt ln(7 N_gt ||O|| / 0.05)` — natural log of the covering
    /// number bound `(7 N_gt ||O|| / eps)^(2^(2k) N_gt)` at eps = 0.05.
    pub covering_log_bound: f64,
    /// `(8 L + 24 L sqrt(N_gt) 2^k + 3 C sqrt(ln(2/delta)/2)) / sqrt(n)`:
    /// the Rademacher-complexity term plus the explicit confidence term
    /// whose constant the asymptotic statement absorbs.
    pub gen_bound: f64,
}

/// Evaluate both bounds for a circuit with `n_gt` trainable gates acting on
/// at most `k` qubits each, observable norm `norm_o`, training-set size `n`,
/// confidence `1 - delta`, loss Lipschitz constant `l_lip`, and loss upper
/// bound `c_bound`.
pub fn capacity_bound_diagnostics(
    n_gt: usize,
    k: usize,
    norm_o: f64,
    n: usize,
    delta: f64,
    l_lip: f64,
    c_bound: f64,
) -> Result<CapacityBounds> {
    if n_gt == 0 || k == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "gate count, gate width, and sample count must be positive".into(),
        ));
    }
    if !(norm_o > 0.0 && norm_o.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "observable norm must be finite and positive, got {norm_o}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence parameter must lie in (0, 1), got {delta}"
        )));
    }
    if !(l_lip > 0.0 && l_lip.is_finite()) || !(c_bound > 0.0 && c_bound.is_finite()) {
        return Err(Error::InvalidArgument(
            "Lipschitz constant and loss bound must be finite and positive".into(),
        ));
    }

    let gates = n_gt as f64;
    let width_factor = 2f64.powi(2 * k as i32);
    let covering_log_bound = width_factor * gates * (7.0 * gates * norm_o / COVERING_EPSILON).ln();

    let complexity = 8.0 * l_lip + 24.0 * l_lip * gates.sqrt() * 2f64.powi(k as i32);
    let confidence = 3.0 * c_bound * ((2.0 / delta).ln() / 2.0).sqrt();
    let gen_bound = (complexity + confidence) / (n as f64).sqrt();

    Ok(CapacityBounds {
        covering_log_bound,
        gen_bound,
    })
}
