//! Quantum gates and their application to states.
//!
//! Rotations follow `R_sigma(theta) = exp(-i theta sigma / 2)` and the
//! three-parameter rotation is `rot(phi, theta, omega) = RZ(omega) RY(theta)
//! RZ(phi)` (rightmost factor acts first).

use crate::error::{Error, Result};
use crate::linalg::is_unitary;
use crate::state::{DensityMatrix, StateVector};
use crate::{c64, C64, CMat, CVec};

const UNITARY_TOL: f64 = 1e-10;

/// A `k`-qubit gate: unitary matrix plus bookkeeping.
#[derive(Debug, Clone)]
pub struct Gate {
    matrix: CMat,
    arity: usize,
    label: String,
    parameter: Option<f64>,
}

impl Gate {
    /// Wrap an explicit unitary; validates `U U^H = I` within 1e-10.
    pub fn new(label: &str, matrix: CMat, parameter: Option<f64>) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_power_of_two() || matrix.nrows() < 2 {
            return Err(Error::InvalidArgument(format!(
                "gate matrix must be square with power-of-two dimension >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !is_unitary(&matrix, UNITARY_TOL) {
            return Err(Error::Validation(format!(
                "gate '{label}' is not unitary within {UNITARY_TOL}"
            )));
        }
        let arity = matrix.nrows().trailing_zeros() as usize;
        Ok(Self {
            matrix,
            arity,
            label: label.to_string(),
            parameter,
        })
    }

    fn from_checked(label: &str, matrix: CMat, parameter: Option<f64>) -> Self {
        let arity = matrix.nrows().trailing_zeros() as usize;
        Self {
            matrix,
            arity,
            label: label.to_string(),
            parameter,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn parameter(&self) -> Option<f64> {
        self.parameter
    }

    /// The inverse gate.
    pub fn dagger(&self) -> Gate {
        Gate::from_checked(
            &format!("{}^dag", self.label),
            self.matrix.adjoint(),
            self.parameter.map(|p| -p),
        )
    }
}

pub fn identity() -> Gate {
    Gate::from_checked("I", CMat::identity(2, 2), None)
}

pub fn x() -> Gate {
    Gate::from_checked(
        "X",
        CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]),
        None,
    )
}

pub fn y() -> Gate {
    Gate::from_checked(
        "Y",
        CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)]),
        None,
    )
}

pub fn z() -> Gate {
    Gate::from_checked(
        "Z",
        CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)]),
        None,
    )
}

pub fn h() -> Gate {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Gate::from_checked(
        "H",
        CMat::from_row_slice(2, 2, &[c64(s, 0.0), c64(s, 0.0), c64(s, 0.0), c64(-s, 0.0)]),
        None,
    )
}

pub fn s() -> Gate {
    Gate::from_checked(
        "S",
        CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0)]),
        None,
    )
}

/// `S^dag`, used when rotating Y measurements into the computational basis.
pub fn s_dagger() -> Gate {
    Gate::from_checked(
        "S^dag",
        CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, -1.0)]),
        None,
    )
}

pub fn t() -> Gate {
    let p = c64(std::f64::consts::FRAC_PI_4.cos(), std::f64::consts::FRAC_PI_4.sin());
    Gate::from_checked(
        "T",
        CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), p]),
        None,
    )
}

pub fn rx(theta: f64) -> Gate {
    let (cth, sth) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    Gate::from_checked(
        "RX",
        CMat::from_row_slice(
            2,
            2,
            &[c64(cth, 0.0), c64(0.0, -sth), c64(0.0, -sth), c64(cth, 0.0)],
        ),
        Some(theta),
    )
}

pub fn ry(theta: f64) -> Gate {
    let (cth, sth) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    Gate::from_checked(
        "RY",
        CMat::from_row_slice(
            2,
            2,
            &[c64(cth, 0.0), c64(-sth, 0.0), c64(sth, 0.0), c64(cth, 0.0)],
        ),
        Some(theta),
    )
}

pub fn rz(theta: f64) -> Gate {
    let half = theta / 2.0;
    Gate::from_checked(
        "RZ",
        CMat::from_row_slice(
            2,
            2,
            &[
                c64(half.cos(), -half.sin()),
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(half.cos(), half.sin()),
            ],
        ),
        Some(theta),
    )
}

/// General single-qubit rotation `RZ(omega) RY(theta) RZ(phi)`.
pub fn rot(phi: f64, theta: f64, omega: f64) -> Gate {
    let m = rz(omega).matrix() * ry(theta).matrix() * rz(phi).matrix();
    Gate::from_checked("Rot", m, None)
}

pub fn cnot() -> Gate {
    Gate::from_checked(
        "CNOT",
        CMat::from_fn(4, 4, |i, j| {
            let target = match i {
                0 => 0,
                1 => 1,
                2 => 3,
                _ => 2,
            };
            if j == target {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        }),
        None,
    )
}

pub fn cz() -> Gate {
    let mut m = CMat::identity(4, 4);
    m[(3, 3)] = c64(-1.0, 0.0);
    Gate::from_checked("CZ", m, None)
}

pub fn swap() -> Gate {
    Gate::from_checked(
        "SWAP",
        CMat::from_fn(4, 4, |i, j| {
            let target = match i {
                0 => 0,
                1 => 2,
                2 => 1,
                _ => 3,
            };
            if j == target {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        }),
        None,
    )
}

/// Controlled version of a gate, control qubit first.
pub fn controlled(gate: &Gate) -> Gate {
    let d = gate.matrix().nrows();
    let mut m = CMat::identity(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            m[(d + i, d + j)] = gate.matrix()[(i, j)];
        }
    }
    Gate::from_checked(&format!("C-{}", gate.label()), m, gate.parameter())
}

fn validate_targets(n: usize, arity: usize, targets: &[usize]) -> Result<()> {
    if targets.len() != arity {
        return Err(Error::InvalidArgument(format!(
            "gate arity {arity} does not match {} targets",
            targets.len()
        )));
    }
    let mut seen = vec![false; n];
    for &q in targets {
        if q >= n {
            return Err(Error::InvalidArgument(format!(
                "target qubit {q} out of range for {n} qubits"
            )));
        }
        if seen[q] {
            return Err(Error::InvalidArgument(format!("duplicate target qubit {q}")));
        }
        seen[q] = true;
    }
    Ok(())
}

/// Apply a gate to the given target qubits of a pure state.
///
/// `targets[0]` binds to the gate's most-significant qubit.
pub fn apply_gate(state: &StateVector, gate: &Gate, targets: &[usize]) -> Result<StateVector> {
    let n = state.num_qubits();
    let k = gate.arity();
    validate_targets(n, k, targets)?;
    let sub = 1usize << k;
    let pos: Vec<usize> = targets.iter().map(|&q| n - 1 - q).collect();
    let mut is_target = vec![false; n];
    for &p in &pos {
        is_target[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&p| !is_target[p]).collect();
    let m = gate.matrix();
    let mut out = state.amplitudes().clone();
    let mut idx = vec![0usize; sub];
    let mut old = vec![C64::default(); sub];
    for f in 0..(1usize << free.len()) {
        let mut base = 0usize;
        for (b, &p) in free.iter().enumerate() {
            base |= ((f >> b) & 1) << p;
        }
        for (l, slot) in idx.iter_mut().enumerate() {
            let mut ix = base;
            for (mq, &p) in pos.iter().enumerate() {
                ix |= ((l >> (k - 1 - mq)) & 1) << p;
            }
            *slot = ix;
        }
        for (l, &ix) in idx.iter().enumerate() {
            old[l] = state.amplitudes()[ix];
        }
        for (r, &ix) in idx.iter().enumerate() {
            let mut acc = c64(0.0, 0.0);
            for (l, &amp) in old.iter().enumerate() {
                acc += m[(r, l)] * amp;
            }
            out[ix] = acc;
        }
    }
    Ok(StateVector::from_parts(out, n))
}

/// Apply a chain of `(gate, targets)` pairs in order.
pub fn apply_circuit(state: &StateVector, ops: &[(Gate, Vec<usize>)]) -> Result<StateVector> {
    let mut s = state.clone();
    for (gate, targets) in ops {
        s = apply_gate(&s, gate, targets)?;
    }
    Ok(s)
}

/// Apply a gate to a density matrix: `rho -> U rho U^H`.
pub fn apply_gate_dm(rho: &DensityMatrix, gate: &Gate, targets: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    validate_targets(n, gate.arity(), targets)?;
    let d = rho.dim();
    // U rho = (columns transformed); U rho U^H = (U (U rho)^H)^H
    let transform_columns = |m: &CMat| -> Result<CMat> {
        let mut out = CMat::zeros(d, d);
        for j in 0..d {
            let col = StateVector::from_parts(CVec::from_iterator(d, m.column(j).iter().copied()), n);
            let new_col = apply_gate(&col, gate, targets)?;
            out.set_column(j, new_col.amplitudes());
        }
        Ok(out)
    };
    let u_rho = transform_columns(rho.matrix())?;
    let result = transform_columns(&u_rho.adjoint())?.adjoint();
    Ok(DensityMatrix::from_parts(result, n))
}

/// Embed a `k`-qubit unitary acting on `targets` into the full `n`-qubit
/// register as a dense matrix. This is the one canonical embedding routine;
/// `targets[0]` binds to the operator's most-significant qubit.
pub fn embed_unitary(n: usize, op: &CMat, targets: &[usize]) -> Result<CMat> {
    let k = op.nrows().trailing_zeros() as usize;
    if op.nrows() != (1 << k) || !op.is_square() {
        return Err(Error::InvalidArgument(
            "operator dimension must be a power of two".into(),
        ));
    }
    validate_targets(n, k, targets)?;
    let pos: Vec<usize> = targets.iter().map(|&q| n - 1 - q).collect();
    let mut is_target = vec![false; n];
    for &p in &pos {
        is_target[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&p| !is_target[p]).collect();
    let sub = 1usize << k;
    let mut full = CMat::zeros(1 << n, 1 << n);
    for f in 0..(1usize << free.len()) {
        let mut base = 0usize;
        for (b, &p) in free.iter().enumerate() {
            base |= ((f >> b) & 1) << p;
        }
        let local_index = |l: usize| -> usize {
            let mut ix = base;
            for (mq, &p) in pos.iter().enumerate() {
                ix |= ((l >> (k - 1 - mq)) & 1) << p;
            }
            ix
        };
        for r in 0..sub {
            for ccol in 0..sub {
                full[(local_index(r), local_index(ccol))] = op[(r, ccol)];
            }
        }
    }
    Ok(full)
}

/// Apply a full-register unitary to a pure state.
pub fn apply_unitary(state: &StateVector, u: &CMat) -> Result<StateVector> {
    if u.ncols() != state.dim() {
        return Err(Error::InvalidArgument(format!(
            "unitary dimension {} does not match state dimension {}",
            u.ncols(),
            state.dim()
        )));
    }
    let amps = u * state.amplitudes();
    Ok(StateVector::from_parts(amps, state.num_qubits()))
}

/// Apply a full-register unitary to a density matrix.
pub fn apply_unitary_dm(rho: &DensityMatrix, u: &CMat) -> Result<DensityMatrix> {
    if u.ncols() != rho.dim() {
        return Err(Error::InvalidArgument(format!(
            "unitary dimension {} does not match state dimension {}",
            u.ncols(),
            rho.dim()
        )));
    }
    Ok(DensityMatrix::from_parts(
        u * rho.matrix() * u.adjoint(),
        rho.num_qubits(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob_distance;

    #[test]
    fn ghz_from_hadamard_and_cnots() {
        let mut s = StateVector::zero(3).unwrap();
        s = apply_gate(&s, &h(), &[0]).unwrap();
        s = apply_gate(&s, &cnot(), &[0, 1]).unwrap();
        s = apply_gate(&s, &cnot(), &[1, 2]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - c64(r, 0.0)).norm() < 1e-12);
        assert!((s.amplitude(7) - c64(r, 0.0)).norm() < 1e-12);
        for idx in 1..7 {
            assert!(s.amplitude(idx).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let s = StateVector::basis(2, 2).unwrap();
        let after = apply_gate(&s, &identity(), &[1]).unwrap();
        assert_eq!(s, after);
    }

    #[test]
    fn single_qubit_chain_matches_dense_product() {
        let (alpha, beta, gamma) = (0.3, 1.1, -0.7);
        let s = apply_gate(
            &StateVector::from_amplitudes(vec![c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap(),
            &rz(gamma),
            &[0],
        )
        .unwrap();
        let s = apply_gate(&s, &ry(beta), &[0]).unwrap();
        let s = apply_gate(&s, &rz(alpha), &[0]).unwrap();
        let dense = rz(alpha).matrix() * ry(beta).matrix() * rz(gamma).matrix();
        let direct = dense * CVec::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        for i in 0..2 {
            assert!((s.amplitude(i) - direct[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn embed_matches_kron_for_leading_target() {
        let full = embed_unitary(2, h().matrix(), &[0]).unwrap();
        let expect = h().matrix().kronecker(&CMat::identity(2, 2));
        assert!(frob_distance(&full, &expect) < 1e-14);
    }

    #[test]
    fn embed_matches_kron_for_trailing_target() {
        let full = embed_unitary(2, h().matrix(), &[1]).unwrap();
        let expect = CMat::identity(2, 2).kronecker(h().matrix());
        assert!(frob_distance(&full, &expect) < 1e-14);
    }

    #[test]
    fn cnot_with_reversed_targets_flips_control_role() {
        // CNOT with control = qubit 1, target = qubit 0 on |01> gives |11>
        let s = StateVector::basis(2, 1).unwrap();
        let after = apply_gate(&s, &cnot(), &[1, 0]).unwrap();
        assert!((after.amplitude(3) - c64(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn density_matrix_application_matches_embedding() {
        let rho = StateVector::basis(2, 1).unwrap().to_density();
        let via_gate = apply_gate_dm(&rho, &cnot(), &[1, 0]).unwrap();
        let u = embed_unitary(2, cnot().matrix(), &[1, 0]).unwrap();
        let direct = apply_unitary_dm(&rho, &u).unwrap();
        assert!(frob_distance(via_gate.matrix(), direct.matrix()) < 1e-12);
    }

    #[test]
    fn gate_validation_rejects_non_unitary() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
        );
        assert!(Gate::new("bad", m, None).is_err());
    }

    #[test]
    fn target_validation() {
        let s = StateVector::zero(2).unwrap();
        assert!(apply_gate(&s, &cnot(), &[0]).is_err());
        assert!(apply_gate(&s, &cnot(), &[0, 0]).is_err());
        assert!(apply_gate(&s, &cnot(), &[0, 2]).is_err());
    }

    #[test]
    fn rot_composes_rz_ry_rz() {
        let g = rot(0.2, 0.5, -0.9);
        let expect = rz(-0.9).matrix() * ry(0.5).matrix() * rz(0.2).matrix();
        assert!(frob_distance(g.matrix(), &expect) < 1e-14);
    }
}
