//! Dense statevector and density-matrix simulation of small qubit registers.
//!
//! Conventions used throughout the workspace:
//!
//! * Qubit `0` is the leftmost tensor factor and the most-significant bit of a
//!   computational-basis label, so `|q0 q1 ... q(N-1)>` has basis index
//!   `sum_i q_i * 2^(N-1-i)`.
//! * Rotation gates follow `R(theta) = exp(-i theta sigma / 2)`.
//! * Global phases are physical data here: nothing ever renormalizes them away.
//! * Every stochastic operation takes an explicit RNG handle; see [`rng`] for
//!   deriving labeled, reproducible streams from one master seed.
//!
//! Registers are capped at [`qubit_cap`] qubits (default 14) to keep dense
//! simulation honest about its memory footprint.

pub mod channel;
pub mod error;
pub mod gates;
pub mod haar;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod observable;
pub mod pauli;
pub mod rng;
pub mod state;

pub use channel::{depolarizing, pauli_channel, QuantumChannel};
pub use error::{Error, Result};
pub use gates::Gate;
pub use haar::haar_random_unitary;
pub use observable::Observable;
pub use state::{DensityMatrix, StateVector};

use std::sync::atomic::{AtomicUsize, Ordering};

/// Complex scalar used everywhere in the workspace.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVec = nalgebra::DVector<C64>;
/// Dense real matrix.
pub type RMat = nalgebra::DMatrix<f64>;
/// Dense real vector.
pub type RVec = nalgebra::DVector<f64>;

static QUBIT_CAP: AtomicUsize = AtomicUsize::new(14);

/// Current register-size cap for dense simulation.
pub fn qubit_cap() -> usize {
    QUBIT_CAP.load(Ordering::Relaxed)
}

/// Raise or lower the register-size cap (default 14).
pub fn set_qubit_cap(cap: usize) {
    QUBIT_CAP.store(cap, Ordering::Relaxed);
}

pub(crate) fn check_qubit_count(n: usize) -> Result<()> {
    if n > qubit_cap() {
        return Err(Error::Capacity(format!(
            "{n} qubits exceeds the configured cap of {}",
            qubit_cap()
        )));
    }
    Ok(())
}

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
