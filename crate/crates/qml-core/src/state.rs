//! Pure and mixed quantum states of small qubit registers.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, is_hermitian, kron};
use crate::{c64, check_qubit_count, C64, CMat, CVec};

const NORM_TOL: f64 = 1e-10;
const HERM_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A pure state of `num_qubits` qubits as a unit-norm complex amplitude vector.
///
/// Qubit 0 is the most-significant bit of the basis label.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVec,
    num_qubits: usize,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let mut amplitudes = CVec::zeros(1 << n);
        amplitudes[0] = c64(1.0, 0.0);
        Ok(Self {
            amplitudes,
            num_qubits: n,
        })
    }

    /// Computational basis state `|index>` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubit_count(n)?;
        if index >= (1 << n) {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amplitudes = CVec::zeros(1 << n);
        amplitudes[index] = c64(1.0, 0.0);
        Ok(Self {
            amplitudes,
            num_qubits: n,
        })
    }

    /// Build from explicit amplitudes, enforcing the unit-norm invariant.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let n = qubits_for_dim(amplitudes.len())?;
        check_qubit_count(n)?;
        let v = CVec::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "state norm {norm} deviates from 1 beyond {NORM_TOL}"
            )));
        }
        Ok(Self {
            amplitudes: v,
            num_qubits: n,
        })
    }

    /// Internal constructor for amplitudes already known to be normalized.
    pub(crate) fn from_parts(amplitudes: CVec, num_qubits: usize) -> Self {
        Self {
            amplitudes,
            num_qubits,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Squared overlap `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Born-rule probabilities over the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Tensor product `self (x) other`; `self`'s qubits come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        check_qubit_count(n)?;
        let mut amplitudes = CVec::zeros(self.dim() * other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                amplitudes[i * other.dim() + j] = self.amplitudes[i] * other.amplitudes[j];
            }
        }
        Ok(Self {
            amplitudes,
            num_qubits: n,
        })
    }

    /// Projector `|self><self|` as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix {
            matrix: m,
            num_qubits: self.num_qubits,
        }
    }
}

/// A possibly mixed state: Hermitian, trace-one, positive semi-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMat,
    num_qubits: usize,
}

impl DensityMatrix {
    /// Build from an explicit matrix, enforcing all invariants
    /// (Hermitian within 1e-10, unit trace within 1e-10, eigenvalues >= -1e-9).
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        let n = qubits_for_dim(matrix.nrows())?;
        check_qubit_count(n)?;
        if !matrix.is_square() {
            return Err(Error::InvalidArgument("density matrix must be square".into()));
        }
        if !is_hermitian(&matrix, HERM_TOL) {
            return Err(Error::Validation(
                "density matrix is not Hermitian within 1e-10".into(),
            ));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!(
                "density matrix trace {trace} deviates from 1"
            )));
        }
        let (vals, _) = hermitian_eigen(&matrix);
        if vals[0] < -PSD_TOL {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {}",
                vals[0]
            )));
        }
        Ok(Self {
            matrix,
            num_qubits: n,
        })
    }

    pub(crate) fn from_parts(matrix: CMat, num_qubits: usize) -> Self {
        Self { matrix, num_qubits }
    }

    /// `|psi><psi|` for a pure state.
    pub fn pure(state: &StateVector) -> Self {
        state.to_density()
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let d = 1usize << n;
        let matrix = CMat::identity(d, d) * c64(1.0 / d as f64, 0.0);
        Ok(Self {
            matrix,
            num_qubits: n,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let sq = &self.matrix * &self.matrix;
        sq.trace().re
    }

    /// Smallest eigenvalue; negative values flag PSD violations.
    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = hermitian_eigen(&self.matrix);
        vals[0]
    }

    /// A zero-qubit register is the degenerate scalar left by tracing
    /// everything out.
    pub fn is_degenerate(&self) -> bool {
        self.num_qubits == 0
    }

    /// Tensor product; `self`'s qubits come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        check_qubit_count(n)?;
        Ok(Self {
            matrix: kron(&self.matrix, &other.matrix),
            num_qubits: n,
        })
    }

    /// Trace distance `(1/2) ||rho - sigma||_1`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = &self.matrix - &other.matrix;
        let (vals, _) = hermitian_eigen(&diff);
        0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// Diagonal of the matrix as Born-rule probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }
}

/// Reduced state on the kept qubits (ascending original order), summing the
/// rest out. An empty `keep` yields the degenerate zero-qubit scalar trace.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() {
        return Err(Error::InvalidArgument("keep indices must be distinct".into()));
    }
    if keep_sorted.iter().any(|&q| q >= n) {
        return Err(Error::InvalidArgument(format!(
            "keep index out of range for {n} qubits"
        )));
    }
    if keep_sorted.is_empty() {
        return Ok(DensityMatrix::from_parts(
            CMat::from_element(1, 1, rho.trace()),
            0,
        ));
    }
    let k = keep_sorted.len();
    let env: Vec<usize> = (0..n).filter(|q| !keep_sorted.contains(q)).collect();
    // bit position (from the LSB) of qubit q in the full register
    let pos = |q: usize| n - 1 - q;
    let mut out = CMat::zeros(1 << k, 1 << k);
    for i_keep in 0..(1usize << k) {
        for j_keep in 0..(1usize << k) {
            let mut acc = c64(0.0, 0.0);
            for e in 0..(1usize << env.len()) {
                let mut i_full = 0usize;
                let mut j_full = 0usize;
                for (b, &q) in keep_sorted.iter().enumerate() {
                    let bit_i = (i_keep >> (k - 1 - b)) & 1;
                    let bit_j = (j_keep >> (k - 1 - b)) & 1;
                    i_full |= bit_i << pos(q);
                    j_full |= bit_j << pos(q);
                }
                for (b, &q) in env.iter().enumerate() {
                    let bit = (e >> b) & 1;
                    i_full |= bit << pos(q);
                    j_full |= bit << pos(q);
                }
                acc += rho.matrix()[(i_full, j_full)];
            }
            out[(i_keep, j_keep)] = acc;
        }
    }
    Ok(DensityMatrix::from_parts(out, k))
}

/// `Tr(rho^2)` as a free function mirroring the method.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Tensor product of two bare operators (matrices of matching semantics).
pub fn tensor_ops(a: &CMat, b: &CMat) -> CMat {
    kron(a, b)
}
