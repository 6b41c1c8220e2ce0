//! Quantum feature maps and kernel evaluation.
//!
//! A feature map sends a classical point to a quantum state; the induced
//! kernel is the squared state overlap `|<phi(x)|phi(x')>|^2`. Evaluation is
//! exact statevector overlap by default; shot-based estimators for the
//! adjoint-circuit and SWAP-test protocols are provided alongside.

use qml_core::gates::{self, apply_gate};
use qml_core::measure::sample_counts;
use qml_core::rng::Prng;
use qml_core::state::StateVector;
use qml_core::{Error, Result};
use qml_encode::encode::{encode_amplitude_real, encode_angle, encode_basis, Axis};
use serde::{Deserialize, Serialize};

const BIT_TOL: f64 = 1e-9;

/// Encoding families available as feature maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Basis,
    Amplitude,
    AngleX,
    AngleY,
    SingleQubitRx,
}

/// A feature map specification: which encoding to use, how many qubits it
/// occupies, and how inputs should be scaled before encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub kind: MapKind,
    pub qubits: usize,
    pub scaling_note: String,
}

impl FeatureMapSpec {
    /// Bit features, one qubit per feature.
    pub fn basis(features: usize) -> Result<Self> {
        if features == 0 {
            return Err(Error::InvalidArgument("a feature map needs at least one feature".into()));
        }
        Ok(Self {
            kind: MapKind::Basis,
            qubits: features,
            scaling_note: "features must be exact bits (0 or 1)".into(),
        })
    }

    /// Real features stored as amplitudes, `ceil(log2 d)` qubits.
    pub fn amplitude(features: usize) -> Result<Self> {
        if features < 2 {
            return Err(Error::InvalidArgument(
                "amplitude maps need at least two features".into(),
            ));
        }
        let dim = features.next_power_of_two();
        Ok(Self {
            kind: MapKind::Amplitude,
            qubits: dim.trailing_zeros() as usize,
            scaling_note: "features are L2-normalized before encoding".into(),
        })
    }

    /// One X rotation per feature.
    pub fn angle_x(features: usize) -> Result<Self> {
        if features == 0 {
            return Err(Error::InvalidArgument("a feature map needs at least one feature".into()));
        }
        Ok(Self {
            kind: MapKind::AngleX,
            qubits: features,
            scaling_note: "scale features into [0, pi) so distinct values stay distinguishable".into(),
        })
    }

    /// One Y rotation per feature.
    pub fn angle_y(features: usize) -> Result<Self> {
        if features == 0 {
            return Err(Error::InvalidArgument("a feature map needs at least one feature".into()));
        }
        Ok(Self {
            kind: MapKind::AngleY,
            qubits: features,
            scaling_note: "scale features into [0, pi) so distinct values stay distinguishable".into(),
        })
    }

    /// A single scalar feature on one qubit via RX.
    pub fn single_qubit_rx() -> Self {
        Self {
            kind: MapKind::SingleQubitRx,
            qubits: 1,
            scaling_note: "scalar input, 2*pi periodic".into(),
        }
    }

    /// Number of classical features one input point must carry.
    pub fn features(&self) -> usize {
        match self.kind {
            MapKind::Amplitude => 1 << self.qubits,
            MapKind::SingleQubitRx => 1,
            _ => self.qubits,
        }
    }
}

/// Encode one input point as a statevector under the given map.
pub fn encode_point(map: &FeatureMapSpec, x: &[f64]) -> Result<StateVector> {
    match map.kind {
        MapKind::Basis => {
            if x.len() != map.qubits {
                return Err(Error::InvalidArgument(format!(
                    "basis map expects {} features, got {}",
                    map.qubits,
                    x.len()
                )));
            }
            let bits = x
                .iter()
                .map(|&v| {
                    if (v - 0.0).abs() < BIT_TOL {
                        Ok(0u8)
                    } else if (v - 1.0).abs() < BIT_TOL {
                        Ok(1u8)
                    } else {
                        Err(Error::InvalidArgument(format!(
                            "basis map needs bit features, got {v}"
                        )))
                    }
                })
                .collect::<Result<Vec<u8>>>()?;
            Ok(encode_basis(&bits)?.state)
        }
        MapKind::Amplitude => {
            if x.is_empty() || x.len() > (1 << map.qubits) {
                return Err(Error::InvalidArgument(format!(
                    "amplitude map holds up to {} features, got {}",
                    1 << map.qubits,
                    x.len()
                )));
            }
            let mut padded = x.to_vec();
            padded.resize(1 << map.qubits, 0.0);
            Ok(encode_amplitude_real(&padded)?.state)
        }
        MapKind::AngleX | MapKind::SingleQubitRx => {
            if x.len() != map.features() {
                return Err(Error::InvalidArgument(format!(
                    "map expects {} features, got {}",
                    map.features(),
                    x.len()
                )));
            }
            Ok(encode_angle(x, Axis::X)?.state)
        }
        MapKind::AngleY => {
            if x.len() != map.qubits {
                return Err(Error::InvalidArgument(format!(
                    "map expects {} features, got {}",
                    map.qubits,
                    x.len()
                )));
            }
            Ok(encode_angle(x, Axis::Y)?.state)
        }
    }
}

/// Exact quantum kernel value `|<phi(x)|phi(x')>|^2`.
pub fn quantum_kernel(map: &FeatureMapSpec, x: &[f64], x_prime: &[f64]) -> Result<f64> {
    let a = encode_point(map, x)?;
    let b = encode_point(map, x_prime)?;
    Ok(a.fidelity(&b).clamp(0.0, 1.0))
}

/// Shot-based kernel estimate from the adjoint circuit `U(x')^H U(x)`:
/// the kernel is the probability of the all-zeros outcome, so each shot is a
/// hit-or-miss draw against that projector.
pub fn quantum_kernel_adjoint_sampled(
    map: &FeatureMapSpec,
    x: &[f64],
    x_prime: &[f64],
    shots: u64,
    rng: &mut Prng,
) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".into()));
    }
    let k = quantum_kernel(map, x, x_prime)?;
    let counts = sample_counts(&[k, 1.0 - k], shots, rng)
        .ok_or_else(|| Error::Numeric("projector probabilities failed to normalize".into()))?;
    Ok(counts[0] as f64 / shots as f64)
}

/// Shot-based kernel estimate from the SWAP test: ancilla qubit, Hadamard,
/// controlled swap of the two registers, Hadamard, then `2 p(0) - 1` for the
/// ancilla's zero-outcome frequency. Shot noise can push the estimate
/// slightly outside `[0, 1]`.
pub fn quantum_kernel_swap_test_sampled(
    map: &FeatureMapSpec,
    x: &[f64],
    x_prime: &[f64],
    shots: u64,
    rng: &mut Prng,
) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".into()));
    }
    let a = encode_point(map, x)?;
    let b = encode_point(map, x_prime)?;
    let n = a.num_qubits();
    let mut state = StateVector::zero(1)?.tensor(&a)?.tensor(&b)?;
    let h = gates::h();
    let cswap = gates::controlled(&gates::swap());
    state = apply_gate(&state, &h, &[0])?;
    for q in 0..n {
        state = apply_gate(&state, &cswap, &[0, 1 + q, 1 + n + q])?;
    }
    state = apply_gate(&state, &h, &[0])?;
    let probs = state.probabilities();
    let half = probs.len() / 2;
    let p_zero: f64 = probs[..half].iter().sum();
    let counts = sample_counts(&[p_zero, 1.0 - p_zero], shots, rng)
        .ok_or_else(|| Error::Numeric("ancilla probabilities failed to normalize".into()))?;
    Ok(2.0 * (counts[0] as f64 / shots as f64) - 1.0)
}
