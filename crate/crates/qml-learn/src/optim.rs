//! First-order optimizers over flat parameter vectors.

use qml_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Optimizer selector used in training configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

/// Stateful optimizer. Adam uses beta = (0.9, 0.999) and epsilon = 1e-8 with
/// bias-corrected moment estimates.
#[derive(Debug, Clone)]
pub enum Optimizer {
    Sgd {
        learning_rate: f64,
    },
    Adam {
        learning_rate: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
        first_moment: Vec<f64>,
        second_moment: Vec<f64>,
        step_count: u64,
    },
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64, dim: usize) -> Result<Self> {
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be finite and positive, got {learning_rate}"
            )));
        }
        Ok(match kind {
            OptimizerKind::Sgd => Optimizer::Sgd { learning_rate },
            OptimizerKind::Adam => Optimizer::Adam {
                learning_rate,
                beta1: 0.9,
                beta2: 0.999,
                epsilon: 1e-8,
                first_moment: vec![0.0; dim],
                second_moment: vec![0.0; dim],
                step_count: 0,
            },
        })
    }

    /// Descend `parameters` along `gradient` in place.
    pub fn step(&mut self, parameters: &mut [f64], gradient: &[f64]) {
        assert_eq!(parameters.len(), gradient.len(), "gradient dimension mismatch");
        match self {
            Optimizer::Sgd { learning_rate } => {
                for (p, g) in parameters.iter_mut().zip(gradient) {
                    *p -= *learning_rate * g;
                }
            }
            Optimizer::Adam {
                learning_rate,
                beta1,
                beta2,
                epsilon,
                first_moment,
                second_moment,
                step_count,
            } => {
                *step_count += 1;
                let t = *step_count as i32;
                let correction1 = 1.0 - beta1.powi(t);
                let correction2 = 1.0 - beta2.powi(t);
                for ((p, g), (m, v)) in parameters
                    .iter_mut()
                    .zip(gradient)
                    .zip(first_moment.iter_mut().zip(second_moment.iter_mut()))
                {
                    *m = *beta1 * *m + (1.0 - *beta1) * g;
                    *v = *beta2 * *v + (1.0 - *beta2) * g * g;
                    let m_hat = *m / correction1;
                    let v_hat = *v / correction2;
                    *p -= *learning_rate * m_hat / (v_hat.sqrt() + *epsilon);
                }
            }
        }
    }
}
