//! Hermitian observables and their expectation values.

use crate::error::{Error, Result};
use crate::linalg::{frob_distance, is_hermitian, max_abs};
use crate::pauli::pauli_string_matrix;
use crate::state::{DensityMatrix, StateVector};
use crate::{c64, check_qubit_count, CMat};

const HERM_TOL: f64 = 1e-10;
const RECONSTRUCT_TOL: f64 = 1e-9;
const IMAG_TOL: f64 = 1e-10;

/// A Hermitian operator, optionally carrying its Pauli-string expansion.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: CMat,
    pauli_terms: Option<Vec<(f64, String)>>,
    num_qubits: usize,
}

impl Observable {
    /// Build from a dense matrix, validating Hermiticity within 1e-10.
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_power_of_two() {
            return Err(Error::InvalidArgument(
                "observable must be square with power-of-two dimension".into(),
            ));
        }
        if !is_hermitian(&matrix, HERM_TOL) {
            let dev = max_abs(&(&matrix - matrix.adjoint()));
            return Err(Error::Validation(format!(
                "observable is not Hermitian: max |H - H^H| = {dev}"
            )));
        }
        let n = matrix.nrows().trailing_zeros() as usize;
        check_qubit_count(n)?;
        Ok(Self {
            matrix,
            pauli_terms: None,
            num_qubits: n,
        })
    }

    /// Build from real-weighted Pauli strings, e.g. `[(0.5, "XX"), (1.0, "ZI")]`.
    ///
    /// The dense matrix is reconstructed and kept alongside the terms.
    pub fn from_pauli_terms(terms: Vec<(f64, String)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("observable needs at least one Pauli term".into()));
        }
        let n = terms[0].1.len();
        check_qubit_count(n)?;
        let d = 1usize << n;
        let mut matrix = CMat::zeros(d, d);
        for (coeff, s) in &terms {
            if s.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "Pauli string {s:?} has length {}, expected {n}",
                    s.len()
                )));
            }
            matrix += pauli_string_matrix(s)? * c64(*coeff, 0.0);
        }
        let rebuilt = Self::from_matrix(matrix)?;
        // paranoia: re-expand the matrix term by term and compare
        let mut check = CMat::zeros(d, d);
        for (coeff, s) in &terms {
            check += pauli_string_matrix(s)? * c64(*coeff, 0.0);
        }
        if frob_distance(&check, &rebuilt.matrix) > RECONSTRUCT_TOL {
            return Err(Error::Numeric("Pauli-term reconstruction drifted beyond 1e-9".into()));
        }
        Ok(Self {
            pauli_terms: Some(terms),
            ..rebuilt
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn pauli_terms(&self) -> Option<&[(f64, String)]> {
        self.pauli_terms.as_deref()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Largest singular value (= largest |eigenvalue| for Hermitian input).
    pub fn operator_norm(&self) -> f64 {
        crate::linalg::spectral_norm(&self.matrix)
    }

    /// `<psi| H |psi>`, discarding an imaginary residue below 1e-10.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "{}-qubit observable against {}-qubit state",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        let h_psi = &self.matrix * state.amplitudes();
        let value = state.amplitudes().dotc(&h_psi);
        real_part(value)
    }

    /// `Tr(H rho)`, discarding an imaginary residue below 1e-10.
    pub fn expectation_dm(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.num_qubits() != self.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "{}-qubit observable against {}-qubit density matrix",
                self.num_qubits,
                rho.num_qubits()
            )));
        }
        let prod = &self.matrix * rho.matrix();
        let value: crate::C64 = (0..prod.nrows()).map(|i| prod[(i, i)]).sum();
        real_part(value)
    }
}

fn real_part(value: crate::C64) -> Result<f64> {
    if value.im.abs() > IMAG_TOL {
        return Err(Error::Numeric(format!(
            "expectation has imaginary residue {}; state or observable is corrupted",
            value.im
        )));
    }
    Ok(value.re)
}
