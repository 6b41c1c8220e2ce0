//! Read-in and read-out for the simulator: classical-to-quantum encodings,
//! shot-based Pauli expectation estimation, and state tomography.

pub mod encode;
pub mod readout;
pub mod tomography;

pub use encode::{
    encode_amplitude, encode_angle, encode_basis, encode_qram, Axis, EncodedInput, EncodingKind,
};
pub use readout::{
    estimate_observable, estimate_pauli_expectation, pauli_decompose, MeasurementRecord,
};
pub use tomography::{qst_linear_inversion, qst_mle, TomographyMethod, TomographyResult};
