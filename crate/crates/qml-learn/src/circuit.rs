//! Layered parameterized circuits: a layout type whose slots map one-to-one
//! onto a flat parameter vector, plus the standard hardware-efficient,
//! chained, and convolution-pooling layouts.

use qml_core::gates::{self, apply_gate, embed_unitary, Gate};
use qml_core::state::StateVector;
use qml_core::{c64, CMat, Error, Result};
use serde::{Deserialize, Serialize};

/// Axis of a parameterized rotation `exp(-i theta sigma / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationAxis {
    X,
    Y,
    Z,
}

/// Fixed two-qubit entangling gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglerKind {
    Cnot,
    Cz,
}

/// One gate in a circuit layout, applied in sequence order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitElement {
    /// `exp(-i theta sigma/2)` on `wire`, reading theta from `slot`.
    Rotation {
        axis: RotationAxis,
        wire: usize,
        slot: usize,
    },
    /// `diag(1, e^{i theta})` on `wire`. Its generator `|1><1|` is not
    /// involutory, so this gate is outside the parameter-shift rule.
    PhaseShift { wire: usize, slot: usize },
    /// Fixed entangler; for CZ the wire order is immaterial.
    Entangler {
        kind: EntanglerKind,
        control: usize,
        target: usize,
    },
}

/// A circuit layout over `num_qubits` wires whose parameter slots
/// `0..num_params` are each read by exactly one gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCircuit {
    num_qubits: usize,
    layers: usize,
    elements: Vec<CircuitElement>,
    num_params: usize,
}

fn phase_shift_gate(theta: f64) -> Gate {
    let mut m = CMat::identity(2, 2);
    m[(1, 1)] = c64(theta.cos(), theta.sin());
    Gate::new("PhaseShift", m, Some(theta)).expect("2x2 unitary")
}

impl ParamCircuit {
    /// Validate a layout: wires in range, entangler wires distinct, and the
    /// used slots exactly `0..num_params` with no slot read twice.
    pub fn new(num_qubits: usize, layers: usize, elements: Vec<CircuitElement>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
        }
        let mut slots = Vec::new();
        for (i, element) in elements.iter().enumerate() {
            match *element {
                CircuitElement::Rotation { wire, slot, .. }
                | CircuitElement::PhaseShift { wire, slot } => {
                    if wire >= num_qubits {
                        return Err(Error::InvalidArgument(format!(
                            "element {i} targets wire {wire} of {num_qubits}"
                        )));
                    }
                    slots.push(slot);
                }
                CircuitElement::Entangler { control, target, .. } => {
                    if control >= num_qubits || target >= num_qubits {
                        return Err(Error::InvalidArgument(format!(
                            "element {i} targets wires ({control}, {target}) of {num_qubits}"
                        )));
                    }
                    if control == target {
                        return Err(Error::InvalidArgument(format!(
                            "element {i} entangles wire {control} with itself"
                        )));
                    }
                }
            }
        }
        let num_params = slots.len();
        let mut seen = vec![false; num_params];
        for &slot in &slots {
            if slot >= num_params {
                return Err(Error::Validation(format!(
                    "parameter slot {slot} out of range for {num_params} slots"
                )));
            }
            if seen[slot] {
                return Err(Error::Validation(format!("parameter slot {slot} read twice")));
            }
            seen[slot] = true;
        }
        Ok(Self {
            num_qubits,
            layers,
            elements,
            num_params,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn elements(&self) -> &[CircuitElement] {
        &self.elements
    }

    /// True when every parameterized gate has an involutory generator and
    /// therefore admits the two-point parameter-shift rule.
    pub fn shift_rule_applies(&self) -> bool {
        self.elements
            .iter()
            .all(|e| !matches!(e, CircuitElement::PhaseShift { .. }))
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.num_params {
            return Err(Error::InvalidArgument(format!(
                "{} parameters supplied, circuit has {} slots",
                theta.len(),
                self.num_params
            )));
        }
        Ok(())
    }

    fn instantiate(&self, element: &CircuitElement, theta: &[f64]) -> (Gate, Vec<usize>) {
        match *element {
            CircuitElement::Rotation { axis, wire, slot } => {
                let gate = match axis {
                    RotationAxis::X => gates::rx(theta[slot]),
                    RotationAxis::Y => gates::ry(theta[slot]),
                    RotationAxis::Z => gates::rz(theta[slot]),
                };
                (gate, vec![wire])
            }
            CircuitElement::PhaseShift { wire, slot } => (phase_shift_gate(theta[slot]), vec![wire]),
            CircuitElement::Entangler { kind, control, target } => {
                let gate = match kind {
                    EntanglerKind::Cnot => gates::cnot(),
                    EntanglerKind::Cz => gates::cz(),
                };
                (gate, vec![control, target])
            }
        }
    }

    /// Dense unitary of the whole circuit at `theta`.
    pub fn unitary(&self, theta: &[f64]) -> Result<CMat> {
        self.check_theta(theta)?;
        let dim = 1usize << self.num_qubits;
        let mut u = CMat::identity(dim, dim);
        for element in &self.elements {
            let (gate, targets) = self.instantiate(element, theta);
            u = embed_unitary(self.num_qubits, gate.matrix(), &targets)? * u;
        }
        Ok(u)
    }

    /// Apply the circuit at `theta` to a statevector gate by gate.
    pub fn apply(&self, theta: &[f64], state: &StateVector) -> Result<StateVector> {
        self.check_theta(theta)?;
        if state.num_qubits() != self.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "state has {} qubits, circuit has {}",
                state.num_qubits(),
                self.num_qubits
            )));
        }
        let mut current = state.clone();
        for element in &self.elements {
            let (gate, targets) = self.instantiate(element, theta);
            current = apply_gate(&current, &gate, &targets)?;
        }
        Ok(current)
    }
}

fn push_rot(elements: &mut Vec<CircuitElement>, wire: usize, slot: &mut usize) {
    // Euler decomposition RZ(omega) RY(theta) RZ(phi); the first RZ consumes
    // the first of the three consecutive slots.
    for axis in [RotationAxis::Z, RotationAxis::Y, RotationAxis::Z] {
        elements.push(CircuitElement::Rotation {
            axis,
            wire,
            slot: *slot,
        });
        *slot += 1;
    }
}

/// Hardware-efficient circuit: `layers` blocks, each a full-qubit row of
/// three-parameter rotations followed by a brick of entanglers pairing
/// wires `(2n-1+k%2, 2n+k%2)` (1-indexed, layer k), pairs beyond the edge
/// dropped. Parameter count is `3 * num_qubits * layers`.
pub fn build_hec(num_qubits: usize, layers: usize, entangler: EntanglerKind) -> Result<ParamCircuit> {
    if num_qubits == 0 || layers == 0 {
        return Err(Error::InvalidArgument(
            "hardware-efficient circuit needs at least one qubit and one layer".into(),
        ));
    }
    let mut elements = Vec::new();
    let mut slot = 0usize;
    for layer in 1..=layers {
        for wire in 0..num_qubits {
            push_rot(&mut elements, wire, &mut slot);
        }
        let offset = layer % 2;
        for n in 1..=num_qubits.div_ceil(2) {
            let control = 2 * n - 2 + offset;
            let target = 2 * n - 1 + offset;
            if target < num_qubits {
                elements.push(CircuitElement::Entangler {
                    kind: entangler,
                    control,
                    target,
                });
            }
        }
    }
    ParamCircuit::new(num_qubits, layers, elements)
}

/// Chained layout: per layer, a row of three-parameter rotations followed by
/// a CZ chain over wires `(q, q+1)`. This is the sub-generator circuit of the
/// patch GAN.
pub fn build_rot_chain(num_qubits: usize, layers: usize) -> Result<ParamCircuit> {
    if num_qubits == 0 || layers == 0 {
        return Err(Error::InvalidArgument(
            "chained circuit needs at least one qubit and one layer".into(),
        ));
    }
    let mut elements = Vec::new();
    let mut slot = 0usize;
    for _ in 0..layers {
        for wire in 0..num_qubits {
            push_rot(&mut elements, wire, &mut slot);
        }
        for wire in 0..num_qubits.saturating_sub(1) {
            elements.push(CircuitElement::Entangler {
                kind: EntanglerKind::Cz,
                control: wire,
                target: wire + 1,
            });
        }
    }
    ParamCircuit::new(num_qubits, layers, elements)
}

/// Convolution-pooling layout: each stage rotates the active wires,
/// entangles neighbouring active pairs with CX, then folds every second
/// wire into its left neighbour with a fixed CX and retires it, halving the
/// active set until one wire remains; that wire gets a final rotation.
pub fn build_qcnn(num_qubits: usize) -> Result<ParamCircuit> {
    if num_qubits == 0 {
        return Err(Error::InvalidArgument("circuit needs at least one qubit".into()));
    }
    let mut elements = Vec::new();
    let mut slot = 0usize;
    let mut active: Vec<usize> = (0..num_qubits).collect();
    let mut stages = 0usize;
    while active.len() > 1 {
        stages += 1;
        for &wire in &active {
            push_rot(&mut elements, wire, &mut slot);
        }
        for pair in active.windows(2) {
            elements.push(CircuitElement::Entangler {
                kind: EntanglerKind::Cnot,
                control: pair[0],
                target: pair[1],
            });
        }
        let mut kept = Vec::with_capacity(active.len().div_ceil(2));
        for chunk in active.chunks(2) {
            if let [keep, drop] = *chunk {
                elements.push(CircuitElement::Entangler {
                    kind: EntanglerKind::Cnot,
                    control: drop,
                    target: keep,
                });
                kept.push(keep);
            } else {
                kept.push(chunk[0]);
            }
        }
        active = kept;
    }
    push_rot(&mut elements, active[0], &mut slot);
    ParamCircuit::new(num_qubits, stages.max(1), elements)
}
