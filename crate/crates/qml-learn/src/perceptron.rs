//! Online perceptron training with the mistake-bound guarantee for
//! margin-separable data.

use crate::data::LabeledSet;
use qml_core::{Error, Result};

/// Full passes over the data before training is declared non-convergent.
pub const MAX_PASSES: usize = 1_000_000;

/// Result of a perceptron run. `converged` is false when the pass cap was
/// reached with mistakes still occurring, as happens on non-separable data.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronOutcome {
    pub weights: Vec<f64>,
    pub mistakes: usize,
    pub passes: usize,
    pub converged: bool,
}

fn sign(z: f64) -> f64 {
    if z >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Train a perceptron from zero weights: predict `sign(w . x)` and on each
/// mistake update `w <- w + (y - sign(w . x)) x`.
///
/// Inputs must be unit-norm; on data separable with margin `gamma` by a unit
/// separator, the total number of mistakes is at most `ceil(1/gamma^2)`.
pub fn perceptron_train(data: &LabeledSet) -> Result<PerceptronOutcome> {
    for (i, x) in data.points().iter().enumerate() {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "input {i} has norm {norm:.6}; perceptron inputs must be unit vectors"
            )));
        }
    }

    let mut weights = vec![0.0; data.dim()];
    let mut mistakes = 0usize;
    for pass in 1..=MAX_PASSES {
        let mut clean = true;
        for (x, &y) in data.points().iter().zip(data.labels()) {
            let z: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum();
            let predicted = sign(z);
            if predicted != y {
                let step = y - predicted;
                for (w, v) in weights.iter_mut().zip(x) {
                    *w += step * v;
                }
                mistakes += 1;
                clean = false;
            }
        }
        if clean {
            return Ok(PerceptronOutcome {
                weights,
                mistakes,
                passes: pass,
                converged: true,
            });
        }
    }
    Ok(PerceptronOutcome {
        weights,
        mistakes,
        passes: MAX_PASSES,
        converged: false,
    })
}
