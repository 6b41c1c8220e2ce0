//! Haar-distributed random unitaries and states.

use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::rng::Prng;
use crate::state::StateVector;
use crate::{c64, CMat, CVec};

/// A matrix of i.i.d. standard complex Gaussians `(x + i y) / sqrt(2)`.
fn ginibre(dim: usize, rng: &mut Prng) -> CMat {
    CMat::from_fn(dim, dim, |_, _| {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        c64(x, y) / c64(std::f64::consts::SQRT_2, 0.0)
    })
}

/// Draw a Haar-distributed `dim x dim` unitary.
///
/// QR-decomposes a complex Ginibre matrix, then absorbs the phases of R's
/// diagonal into Q so the result is distribution-exact rather than merely
/// unitary (Mezzadri, "How to generate random matrices from the classical
/// compact groups").
pub fn haar_random_unitary(dim: usize, rng: &mut Prng) -> CMat {
    assert!(dim >= 1, "dimension must be positive");
    let qr = ginibre(dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Draw a Haar-distributed pure state on `n` qubits (a normalized vector of
/// i.i.d. complex Gaussians).
pub fn haar_random_state(n: usize, rng: &mut Prng) -> Result<StateVector> {
    let dim = 1usize << n;
    let mut v = CVec::from_fn(dim, |_, _| {
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        c64(x, y)
    });
    let norm = v.norm();
    v /= c64(norm, 0.0);
    StateVector::from_amplitudes(v.iter().copied().collect())
}
