//! Projective measurement: exact outcome distributions and shot sampling.

use rand::distributions::{Distribution, WeightedIndex};

use crate::error::{Error, Result};
use crate::rng::Prng;
use crate::state::{DensityMatrix, StateVector};
use crate::{CMat, C64};

const COMPLETENESS_TOL: f64 = 1e-9;
const PROB_TOL: f64 = 1e-9;

/// Outcome of a measurement: the exact distribution, plus per-outcome counts
/// when a finite number of shots was sampled (`shots = 0` means exact mode).
#[derive(Debug, Clone)]
pub struct Measurement {
    pub probabilities: Vec<f64>,
    pub counts: Option<Vec<u64>>,
    pub shots: u64,
}

impl Measurement {
    /// Empirical frequencies when shots were drawn, exact probabilities
    /// otherwise. Estimators can consume this without branching on mode.
    pub fn frequencies(&self) -> Vec<f64> {
        match &self.counts {
            Some(counts) => counts
                .iter()
                .map(|&c| c as f64 / self.shots as f64)
                .collect(),
            None => self.probabilities.clone(),
        }
    }
}

fn check_completeness(projectors: &[CMat], dim: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::InvalidArgument("measurement needs at least one projector".into()));
    }
    let mut sum = CMat::zeros(dim, dim);
    for p in projectors {
        if p.nrows() != dim || p.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "projector is {}x{}, state dimension is {dim}",
                p.nrows(),
                p.ncols()
            )));
        }
        sum += p;
    }
    let dev = crate::linalg::max_abs(&(sum - CMat::identity(dim, dim)));
    if dev > COMPLETENESS_TOL {
        return Err(Error::Validation(format!(
            "projectors do not resolve the identity: max |sum P - I| = {dev}"
        )));
    }
    Ok(())
}

fn sanitize(probabilities: Vec<f64>) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(probabilities.len());
    for p in probabilities {
        if p < -PROB_TOL || !p.is_finite() {
            return Err(Error::Numeric(format!("outcome probability {p} is not in [0, 1]")));
        }
        out.push(p.max(0.0));
    }
    Ok(out)
}

/// Draw `shots` outcomes from a discrete distribution, returning per-outcome
/// counts. `shots = 0` returns `None` (exact mode).
pub fn sample_counts(probabilities: &[f64], shots: u64, rng: &mut Prng) -> Option<Vec<u64>> {
    if shots == 0 {
        return None;
    }
    let dist = WeightedIndex::new(probabilities.iter().map(|&p| p.max(0.0)))
        .expect("sanitized probabilities always form a valid distribution");
    let mut counts = vec![0u64; probabilities.len()];
    for _ in 0..shots {
        counts[dist.sample(rng)] += 1;
    }
    Some(counts)
}

/// Measure a pure state against a complete set of projectors
/// (`sum_i P_i = I` within 1e-9). `p_i = <psi| P_i |psi>`.
pub fn measure_projective(
    state: &StateVector,
    projectors: &[CMat],
    shots: u64,
    rng: &mut Prng,
) -> Result<Measurement> {
    check_completeness(projectors, state.dim())?;
    let probabilities = sanitize(
        projectors
            .iter()
            .map(|p| state.amplitudes().dotc(&(p * state.amplitudes())).re)
            .collect(),
    )?;
    let counts = sample_counts(&probabilities, shots, rng);
    Ok(Measurement {
        probabilities,
        counts,
        shots,
    })
}

/// Measure a density matrix against a complete set of projectors,
/// `p_i = Tr(P_i rho)`.
pub fn measure_projective_dm(
    rho: &DensityMatrix,
    projectors: &[CMat],
    shots: u64,
    rng: &mut Prng,
) -> Result<Measurement> {
    check_completeness(projectors, rho.dim())?;
    let probabilities = sanitize(
        projectors
            .iter()
            .map(|p| {
                let prod = p * rho.matrix();
                (0..prod.nrows()).map(|i| prod[(i, i)]).sum::<C64>().re
            })
            .collect(),
    )?;
    let counts = sample_counts(&probabilities, shots, rng);
    Ok(Measurement {
        probabilities,
        counts,
        shots,
    })
}

/// Computational-basis measurement of a pure state: outcome `i` with
/// probability `|psi_i|^2`, without materializing projectors.
pub fn measure_computational(state: &StateVector, shots: u64, rng: &mut Prng) -> Result<Measurement> {
    let probabilities = state.probabilities();
    let counts = sample_counts(&probabilities, shots, rng);
    Ok(Measurement {
        probabilities,
        counts,
        shots,
    })
}

/// Computational-basis measurement of a density matrix (its diagonal).
pub fn measure_computational_dm(
    rho: &DensityMatrix,
    shots: u64,
    rng: &mut Prng,
) -> Result<Measurement> {
    let probabilities = rho.probabilities();
    let counts = sample_counts(&probabilities, shots, rng);
    Ok(Measurement {
        probabilities,
        counts,
        shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::gates::{apply_gate, h};
    use crate::rng::stream;

    fn basis_projectors(dim: usize) -> Vec<CMat> {
        (0..dim)
            .map(|i| {
                let mut p = CMat::zeros(dim, dim);
                p[(i, i)] = c64(1.0, 0.0);
                p
            })
            .collect()
    }

    #[test]
    fn exact_mode_returns_born_probabilities() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), &h(), &[0]).unwrap();
        let mut rng = stream(7, "measure");
        let m = measure_projective(&plus, &basis_projectors(2), 0, &mut rng).unwrap();
        assert!(m.counts.is_none());
        assert!((m.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((m.probabilities[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn incomplete_projector_set_is_rejected() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), &h(), &[0]).unwrap();
        let mut rng = stream(7, "measure");
        let only_zero = vec![basis_projectors(2).swap_remove(0)];
        assert!(measure_projective(&plus, &only_zero, 0, &mut rng).is_err());
    }

    #[test]
    fn shot_counts_sum_to_shots_and_concentrate() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), &h(), &[0]).unwrap();
        let mut rng = stream(7, "measure");
        let m = measure_computational(&plus, 100_000, &mut rng).unwrap();
        let counts = m.counts.unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 100_000);
        let f0 = counts[0] as f64 / 1e5;
        // five standard deviations of a fair coin at 1e5 shots
        assert!((f0 - 0.5).abs() < 5.0 * 0.5 / (1e5f64).sqrt());
    }

    #[test]
    fn sampling_is_reproducible_per_stream() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), &h(), &[0]).unwrap();
        let a = measure_computational(&plus, 1000, &mut stream(11, "m")).unwrap();
        let b = measure_computational(&plus, 1000, &mut stream(11, "m")).unwrap();
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn density_matrix_diagonal_matches_pure_state() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), &h(), &[0]).unwrap();
        let mut rng = stream(7, "measure");
        let m = measure_computational_dm(&plus.to_density(), 0, &mut rng).unwrap();
        assert!((m.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((m.frequencies()[1] - 0.5).abs() < 1e-12);
    }
}
