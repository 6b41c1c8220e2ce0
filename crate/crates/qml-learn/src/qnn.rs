//! Quantum neural network evaluation and training: observable expectations
//! of parameterized circuits, exact parameter-shift gradients, and a
//! sign-readout classifier over angle-encoded features.

use crate::circuit::{build_hec, EntanglerKind, ParamCircuit};
use crate::data::LabeledSet;
use crate::optim::{Optimizer, OptimizerKind};
use crate::record::{parameter_hash, EpochStat, TrainRecord};
use qml_core::linalg::{dagger, is_hermitian};
use qml_core::pauli::pauli_string_matrix;
use qml_core::rng::stream;
use qml_core::state::{DensityMatrix, StateVector};
use qml_core::{CMat, Error, Result};
use qml_encode::{encode_angle, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

fn check_observable(circuit: &ParamCircuit, observable: &CMat) -> Result<()> {
    let dim = 1usize << circuit.num_qubits();
    if observable.nrows() != dim || observable.ncols() != dim {
        return Err(Error::InvalidArgument(format!(
            "observable is {}x{}, circuit acts on dimension {dim}",
            observable.nrows(),
            observable.ncols()
        )));
    }
    if !is_hermitian(observable, 1e-10) {
        return Err(Error::InvalidArgument("observable must be Hermitian".into()));
    }
    Ok(())
}

fn expectation_state(
    circuit: &ParamCircuit,
    theta: &[f64],
    state: &StateVector,
    observable: &CMat,
) -> Result<f64> {
    let evolved = circuit.apply(theta, state)?;
    let amps = evolved.amplitudes();
    Ok(amps.dotc(&(observable * amps)).re)
}

/// Expectation `Tr[O V(theta) rho V(theta)^dag]` via the dense circuit
/// unitary.
pub fn qnn_forward(
    circuit: &ParamCircuit,
    theta: &[f64],
    rho_in: &DensityMatrix,
    observable: &CMat,
) -> Result<f64> {
    check_observable(circuit, observable)?;
    if rho_in.num_qubits() != circuit.num_qubits() {
        return Err(Error::InvalidArgument(format!(
            "input state has {} qubits, circuit has {}",
            rho_in.num_qubits(),
            circuit.num_qubits()
        )));
    }
    let v = circuit.unitary(theta)?;
    let conjugated = &v * rho_in.matrix() * dagger(&v);
    Ok((observable * conjugated).trace().re)
}

/// Expectation of `observable` after running the circuit on a pure state,
/// evaluated gate by gate on the statevector.
pub fn qnn_forward_state(
    circuit: &ParamCircuit,
    theta: &[f64],
    state: &StateVector,
    observable: &CMat,
) -> Result<f64> {
    check_observable(circuit, observable)?;
    expectation_state(circuit, theta, state, observable)
}

fn check_shift_rule(circuit: &ParamCircuit) -> Result<()> {
    if !circuit.shift_rule_applies() {
        return Err(Error::Unsupported(
            "parameter-shift gradients need involutory generators; this circuit contains a phase-shift gate".into(),
        ));
    }
    Ok(())
}

fn shift_component(theta: &[f64], slot: usize, by: f64) -> Vec<f64> {
    let mut shifted = theta.to_vec();
    shifted[slot] += by;
    shifted
}

/// Exact gradient of [`qnn_forward`] by the two-point rule
/// `g_j = (f(theta + pi/2 e_j) - f(theta - pi/2 e_j)) / 2`.
pub fn parameter_shift_grad(
    circuit: &ParamCircuit,
    theta: &[f64],
    rho_in: &DensityMatrix,
    observable: &CMat,
) -> Result<Vec<f64>> {
    check_shift_rule(circuit)?;
    qnn_forward(circuit, theta, rho_in, observable)?;
    (0..circuit.num_params())
        .into_par_iter()
        .map(|j| {
            let plus = qnn_forward(circuit, &shift_component(theta, j, FRAC_PI_2), rho_in, observable)?;
            let minus = qnn_forward(circuit, &shift_component(theta, j, -FRAC_PI_2), rho_in, observable)?;
            Ok(0.5 * (plus - minus))
        })
        .collect()
}

/// Statevector counterpart of [`parameter_shift_grad`] for pure inputs.
pub fn parameter_shift_grad_state(
    circuit: &ParamCircuit,
    theta: &[f64],
    state: &StateVector,
    observable: &CMat,
) -> Result<Vec<f64>> {
    check_shift_rule(circuit)?;
    check_observable(circuit, observable)?;
    (0..circuit.num_params())
        .into_par_iter()
        .map(|j| {
            let plus = expectation_state(circuit, &shift_component(theta, j, FRAC_PI_2), state, observable)?;
            let minus = expectation_state(circuit, &shift_component(theta, j, -FRAC_PI_2), state, observable)?;
            Ok(0.5 * (plus - minus))
        })
        .collect()
}

/// Feature read-in for the classifier: one qubit per feature, rotated by the
/// feature value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    AngleX,
    AngleY,
}

impl Encoding {
    fn axis(self) -> Axis {
        match self {
            Encoding::AngleX => Axis::X,
            Encoding::AngleY => Axis::Y,
        }
    }
}

/// Encode a feature vector as the classifier's input state.
pub fn encode_features(encoding: Encoding, x: &[f64]) -> Result<StateVector> {
    Ok(encode_angle(x, encoding.axis())?.state)
}

/// Measurement used for the sign read-out: Z on the first wire.
pub fn readout_observable(num_qubits: usize) -> Result<CMat> {
    let label: String = std::iter::once('Z')
        .chain(std::iter::repeat('I').take(num_qubits - 1))
        .collect();
    pauli_string_matrix(&label)
}

/// Training configuration for the variational classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QnnConfig {
    pub encoding: Encoding,
    pub num_qubits: usize,
    pub layers: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub optimizer: OptimizerKind,
    pub seed: u64,
}

/// Decision values `f(x) = Tr[O V(theta) |phi(x)><phi(x)| V(theta)^dag]` for
/// a list of feature vectors; the predicted label is the sign (0 counts as
/// positive).
pub fn qnn_decision_values(
    circuit: &ParamCircuit,
    theta: &[f64],
    encoding: Encoding,
    points: &[Vec<f64>],
    observable: &CMat,
) -> Result<Vec<f64>> {
    check_observable(circuit, observable)?;
    points
        .par_iter()
        .map(|x| {
            let state = encode_features(encoding, x)?;
            expectation_state(circuit, theta, &state, observable)
        })
        .collect()
}

fn sign(value: f64) -> f64 {
    if value >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn metrics(decisions: &[f64], labels: &[f64]) -> (f64, f64) {
    let loss = 0.5
        * decisions
            .iter()
            .zip(labels)
            .map(|(f, y)| (f - y) * (f - y))
            .sum::<f64>();
    let correct = decisions
        .iter()
        .zip(labels)
        .filter(|(f, y)| sign(**f) == **y)
        .count();
    (loss, correct as f64 / labels.len() as f64)
}

/// Train the angle-encoded classifier: a hardware-efficient circuit with CZ
/// entanglers, squared-error loss `L = (1/2) sum_i (f(x_i) - y_i)^2`, and
/// parameter-shift gradients `sum_i (f(x_i) - y_i) grad f(x_i)` accumulated
/// over mini-batches.
///
/// The run is deterministic in `config.seed`: the initial parameters are
/// uniform in `[0, 2pi)` and the epoch shuffles come from a dedicated
/// stream. Zero epochs returns the initial parameters with empty history.
pub fn qnn_train_classifier(
    train: &LabeledSet,
    test: Option<&LabeledSet>,
    config: &QnnConfig,
) -> Result<(Vec<f64>, TrainRecord)> {
    if config.num_qubits == 0 {
        return Err(Error::InvalidArgument("classifier needs at least one qubit".into()));
    }
    if train.dim() != config.num_qubits {
        return Err(Error::InvalidArgument(format!(
            "{} features per row but {} qubits; the angle read-in uses one qubit per feature",
            train.dim(),
            config.num_qubits
        )));
    }
    if let Some(t) = test {
        if t.dim() != train.dim() {
            return Err(Error::InvalidArgument(format!(
                "test rows have {} features, train rows {}",
                t.dim(),
                train.dim()
            )));
        }
    }
    if config.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be at least 1".into()));
    }

    let started = Instant::now();
    let circuit = build_hec(config.num_qubits, config.layers, EntanglerKind::Cz)?;
    let observable = readout_observable(config.num_qubits)?;

    let train_states: Vec<StateVector> = train
        .points()
        .iter()
        .map(|x| encode_features(config.encoding, x))
        .collect::<Result<_>>()?;

    let mut init_rng = stream(config.seed, "qnn-init");
    let mut theta: Vec<f64> = (0..circuit.num_params())
        .map(|_| init_rng.gen_range(0.0..TAU))
        .collect();
    let mut order_rng = stream(config.seed, "qnn-order");
    let mut optimizer = Optimizer::new(config.optimizer, config.learning_rate, theta.len())?;

    let mut epochs = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        let mut indices: Vec<usize> = (0..train.len()).collect();
        indices.shuffle(&mut order_rng);
        for batch in indices.chunks(config.batch_size) {
            let per_sample: Vec<(f64, Vec<f64>)> = batch
                .par_iter()
                .map(|&i| {
                    let value = expectation_state(&circuit, &theta, &train_states[i], &observable)?;
                    let grad = parameter_shift_grad_state(&circuit, &theta, &train_states[i], &observable)?;
                    Ok((value, grad))
                })
                .collect::<Result<_>>()?;
            let mut gradient = vec![0.0; theta.len()];
            for (&i, (value, grad)) in batch.iter().zip(&per_sample) {
                let residual = value - train.labels()[i];
                for (g, component) in gradient.iter_mut().zip(grad) {
                    *g += residual * component;
                }
            }
            optimizer.step(&mut theta, &gradient);
        }

        let train_decisions = qnn_decision_values(&circuit, &theta, config.encoding, train.points(), &observable)?;
        let (train_loss, train_accuracy) = metrics(&train_decisions, train.labels());
        let (test_loss, test_accuracy) = match test {
            Some(t) => {
                let decisions = qnn_decision_values(&circuit, &theta, config.encoding, t.points(), &observable)?;
                let (loss, acc) = metrics(&decisions, t.labels());
                (Some(loss), Some(acc))
            }
            None => (None, None),
        };
        epochs.push(EpochStat {
            epoch,
            train_loss,
            test_loss,
            train_accuracy,
            test_accuracy,
            param_hash: parameter_hash(&theta),
        });
    }

    let record = TrainRecord {
        seed: config.seed,
        epochs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    record.validate()?;
    Ok((theta, record))
}
