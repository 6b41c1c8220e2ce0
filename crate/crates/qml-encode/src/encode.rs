//! Classical-to-quantum read-in protocols.

use qml_core::gates::{self, apply_gate};
use qml_core::state::StateVector;
use qml_core::{c64, CVec, Error, Result, C64};

const AMP_TOL: f64 = 1e-10;

/// Which encoding produced an [`EncodedInput`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingKind {
    Basis,
    Amplitude,
    Angle,
    Qram,
}

/// The classical data an encoding consumed, kept for provenance.
#[derive(Debug, Clone)]
pub enum SourceData {
    Bits(Vec<u8>),
    Vector(Vec<C64>),
    Angles(Vec<f64>),
    Dataset(Vec<Vec<u8>>),
}

/// A quantum state together with the encoding that produced it.
#[derive(Debug, Clone)]
pub struct EncodedInput {
    pub state: StateVector,
    pub encoding_kind: EncodingKind,
    pub source: SourceData,
    /// Non-fatal issues noticed while encoding (e.g. angles outside the
    /// conventional range). Empty in the common case.
    pub warnings: Vec<String>,
}

/// Rotation axis for angle encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Map a bitstring to its computational basis state,
/// `(x_0, ..., x_{N-1}) -> |x_0 x_1 ... x_{N-1}>`.
pub fn encode_basis(bits: &[u8]) -> Result<EncodedInput> {
    if bits.is_empty() {
        return Err(Error::InvalidArgument("basis encoding needs at least one bit".into()));
    }
    let mut index = 0usize;
    for &b in bits {
        if b > 1 {
            return Err(Error::InvalidArgument(format!(
                "basis encoding takes bits, got {b}"
            )));
        }
        index = (index << 1) | b as usize;
    }
    Ok(EncodedInput {
        state: StateVector::basis(bits.len(), index)?,
        encoding_kind: EncodingKind::Basis,
        source: SourceData::Bits(bits.to_vec()),
        warnings: Vec::new(),
    })
}

/// Store a vector in the amplitudes of a register: `|psi> = x / ||x||_2`,
/// zero-padded to the next power of two.
pub fn encode_amplitude(x: &[C64]) -> Result<EncodedInput> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("amplitude encoding needs a non-empty vector".into()));
    }
    let dim = x.len().next_power_of_two();
    let mut amps = CVec::zeros(dim);
    for (i, &v) in x.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::InvalidArgument("amplitude encoding needs finite entries".into()));
        }
        amps[i] = v;
    }
    let norm = amps.norm();
    if norm <= AMP_TOL {
        return Err(Error::InvalidArgument("cannot amplitude-encode the zero vector".into()));
    }
    amps /= c64(norm, 0.0);
    Ok(EncodedInput {
        state: StateVector::from_amplitudes(amps.iter().copied().collect())?,
        encoding_kind: EncodingKind::Amplitude,
        source: SourceData::Vector(x.to_vec()),
        warnings: Vec::new(),
    })
}

/// Convenience wrapper of [`encode_amplitude`] for real vectors.
pub fn encode_amplitude_real(x: &[f64]) -> Result<EncodedInput> {
    let complex: Vec<C64> = x.iter().map(|&v| c64(v, 0.0)).collect();
    encode_amplitude(&complex)
}

/// Rotate each qubit of `|0...0>` by its feature value:
/// `|phi(x)> = (x) exp(-i x_i sigma / 2) |0>^(x)N`.
///
/// Scaling features into `[0, pi)` is the caller's job; values outside
/// `[0, 2 pi)` wrap around the rotation and are reported as a warning.
pub fn encode_angle(x: &[f64], axis: Axis) -> Result<EncodedInput> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("angle encoding needs at least one feature".into()));
    }
    let mut warnings = Vec::new();
    for (i, &v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("feature {i} is not finite")));
        }
        if !(0.0..2.0 * std::f64::consts::PI).contains(&v) {
            warnings.push(format!(
                "feature {i} = {v} lies outside [0, 2*pi); rotations wrap around"
            ));
        }
    }
    let mut state = StateVector::zero(x.len())?;
    for (i, &v) in x.iter().enumerate() {
        let gate = match axis {
            Axis::X => gates::rx(v),
            Axis::Y => gates::ry(v),
            Axis::Z => gates::rz(v),
        };
        state = apply_gate(&state, &gate, &[i])?;
    }
    Ok(EncodedInput {
        state,
        encoding_kind: EncodingKind::Angle,
        source: SourceData::Angles(x.to_vec()),
        warnings,
    })
}

/// Superpose a dataset of bitstrings behind an address register:
/// `|D> = sum_j (1/sqrt(M)) |j>_a |x^(j)>_d`.
pub fn encode_qram(dataset: &[Vec<u8>]) -> Result<EncodedInput> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("QRAM encoding needs at least one item".into()));
    }
    let m = dataset.len();
    let data_bits = dataset[0].len();
    if data_bits == 0 {
        return Err(Error::InvalidArgument("QRAM items must have at least one bit".into()));
    }
    let address_bits = usize::max(1, (m as f64).log2().ceil() as usize);
    let n = address_bits + data_bits;
    let dim = 1usize << address_bits;
    let mut amps = CVec::zeros(dim << data_bits);
    let weight = c64(1.0 / (m as f64).sqrt(), 0.0);
    for (j, item) in dataset.iter().enumerate() {
        if item.len() != data_bits {
            return Err(Error::InvalidArgument(format!(
                "QRAM item {j} has {} bits, expected {data_bits}",
                item.len()
            )));
        }
        let mut data_index = 0usize;
        for &b in item {
            if b > 1 {
                return Err(Error::InvalidArgument(format!("QRAM item {j} contains non-bit {b}")));
            }
            data_index = (data_index << 1) | b as usize;
        }
        amps[(j << data_bits) | data_index] += weight;
    }
    let state = StateVector::from_amplitudes(amps.iter().copied().collect())?;
    debug_assert_eq!(state.num_qubits(), n);
    Ok(EncodedInput {
        state,
        encoding_kind: EncodingKind::Qram,
        source: SourceData::Dataset(dataset.to_vec()),
        warnings: Vec::new(),
    })
}
