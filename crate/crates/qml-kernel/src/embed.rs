//! Embedding classical vectors into density matrices so that Euclidean
//! inner products become state overlaps.
//!
//! A unit-1-norm vector `r` of dimension `d` maps to the `N`-qubit state
//! `rho_r = (I + sum_i r_i P_i) / 2^N`, where `N` is the smallest qubit
//! count with `4^N - 1 >= d` and `(P_i)` runs over the non-identity Pauli
//! strings in lexicographic order. Two such states recover the inner
//! product through `<r, r'> = 2^N Tr(rho_r rho_r') - 1`.

use qml_core::measure::sample_counts;
use qml_core::pauli::{pauli_string_matrix, pauli_strings_nonidentity};
use qml_core::rng::Prng;
use qml_core::state::DensityMatrix;
use qml_core::{c64, CMat, Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Qubits needed to hold a `d`-dimensional vector: smallest `N` with
/// `4^N - 1 >= d`.
fn qubits_for(d: usize) -> usize {
    let mut n = 1;
    while (1usize << (2 * n)) - 1 < d {
        n += 1;
    }
    n
}

fn validated(r: &[f64]) -> Result<()> {
    if r.is_empty() {
        return Err(Error::InvalidArgument("embedding input must be non-empty".into()));
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("embedding input must be finite".into()));
    }
    let norm: f64 = r.iter().map(|v| v.abs()).sum();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidArgument(format!(
            "embedding input must have unit 1-norm, got {norm}"
        )));
    }
    Ok(())
}

/// Deterministic closed-form embedding `rho_r = (I + sum_i r_i P_i) / 2^N`.
pub fn c2qe_embed(r: &[f64]) -> Result<DensityMatrix> {
    validated(r)?;
    let n = qubits_for(r.len());
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let mut rho = CMat::identity(dim, dim) * c64(scale, 0.0);
    for (value, label) in r.iter().zip(pauli_strings_nonidentity(n)) {
        if *value != 0.0 {
            rho += pauli_string_matrix(&label)? * c64(value * scale, 0.0);
        }
    }
    DensityMatrix::from_matrix(rho)
}

/// Stochastic embedding: draw a Pauli index with probability `|r_i|` per
/// shot, prepare `(I + sign(r_i) P_i) / 2^N`, and return the empirical
/// mixture over all draws.
pub fn c2qe_sample(r: &[f64], draws: u64, rng: &mut Prng) -> Result<DensityMatrix> {
    validated(r)?;
    if draws == 0 {
        return Err(Error::InvalidArgument("draw count must be positive".into()));
    }
    let n = qubits_for(r.len());
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let weights: Vec<f64> = r.iter().map(|v| v.abs()).collect();
    let counts = sample_counts(&weights, draws, rng)
        .ok_or_else(|| Error::Numeric("embedding weights failed to normalize".into()))?;
    let mut rho = CMat::zeros(dim, dim);
    let labels = pauli_strings_nonidentity(n);
    for (i, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let weight = count as f64 / draws as f64;
        let sign = r[i].signum();
        let term = (CMat::identity(dim, dim) + pauli_string_matrix(&labels[i])? * c64(sign, 0.0))
            * c64(weight * scale, 0.0);
        rho += term;
    }
    DensityMatrix::from_matrix(rho)
}

/// Recover the Euclidean inner product of two embedded vectors:
/// `<r, r'> = 2^N Tr(rho_r rho_r') - 1`.
pub fn euclidean_inner_from_states(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument(format!(
            "embedded states live on different dimensions: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let product = a.matrix() * b.matrix();
    let overlap: f64 = (0..product.nrows()).map(|i| product[(i, i)].re).sum();
    Ok(a.dim() as f64 * overlap - 1.0)
}
