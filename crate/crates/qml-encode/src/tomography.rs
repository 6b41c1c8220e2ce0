//! State tomography from local Pauli measurements: linear inversion and
//! maximum-likelihood reconstruction.

use qml_core::linalg::{hermitian_eigen, hermitian_fn, kron, lstsq, svd, trace_norm};
use qml_core::rng::substream;
use qml_core::state::{DensityMatrix, StateVector};
use qml_core::{c64, CMat, CVec, Error, Result, C64};

use crate::readout::{
    outcome_index, rotate_to_measurement_basis, rotate_to_measurement_basis_dm, MeasurementRecord,
};

/// Eigenvalue floor below which the linear-inversion estimate is flagged as
/// violating positivity (matches the density-matrix constructor's tolerance).
const PSD_TOL: f64 = 1e-9;
/// Probability floor inside the MLE R operator.
const PROB_FLOOR: f64 = 1e-12;
/// MLE stops when the iterate moves by less than this (Frobenius norm).
const MLE_STEP_TOL: f64 = 1e-10;
/// MLE iteration cap.
const MLE_MAX_ITERS: usize = 10_000;
/// Dilution parameter of the R rho R iteration.
const MLE_DILUTION: f64 = 0.5;

/// All `3^N` full-weight local Pauli settings, lexicographic over `{X,Y,Z}`.
pub fn pauli_settings(n: usize) -> Vec<String> {
    let letters = ['X', 'Y', 'Z'];
    let count = 3usize.pow(n as u32);
    (0..count)
        .map(|mut idx| {
            let mut s = vec!['Z'; n];
            for k in (0..n).rev() {
                s[k] = letters[idx % 3];
                idx /= 3;
            }
            s.into_iter().collect()
        })
        .collect()
}

/// One setting's outcome distribution: empirical frequencies from counts, or
/// exact Born probabilities when `shots = 0`.
#[derive(Debug, Clone)]
pub struct SettingFrequencies {
    pub setting: String,
    pub frequencies: Vec<f64>,
    pub shots: u64,
}

impl SettingFrequencies {
    /// Convert a counts record into frequencies over all `2^n` outcomes.
    pub fn from_record(record: &MeasurementRecord, n: usize) -> Result<Self> {
        if record.setting.len() != n {
            return Err(Error::InvalidArgument(format!(
                "record setting {:?} does not cover {n} qubits",
                record.setting
            )));
        }
        let total: u64 = record.counts.values().sum();
        if total == 0 {
            return Err(Error::InvalidArgument(format!(
                "record for setting {:?} has no counts",
                record.setting
            )));
        }
        let mut frequencies = vec![0.0; 1 << n];
        for (bits, &count) in &record.counts {
            frequencies[outcome_index(bits, n)?] += count as f64 / total as f64;
        }
        Ok(Self {
            setting: record.setting.clone(),
            frequencies,
            shots: total,
        })
    }
}

/// Exact outcome distributions of a pure state over all `3^N` settings.
pub fn exact_setting_frequencies(state: &StateVector) -> Result<Vec<SettingFrequencies>> {
    pauli_settings(state.num_qubits())
        .into_iter()
        .map(|setting| {
            let rotated = rotate_to_measurement_basis(state, &setting)?;
            Ok(SettingFrequencies {
                setting,
                frequencies: rotated.probabilities(),
                shots: 0,
            })
        })
        .collect()
}

/// Exact outcome distributions of a density matrix over all `3^N` settings.
pub fn exact_setting_frequencies_dm(rho: &DensityMatrix) -> Result<Vec<SettingFrequencies>> {
    pauli_settings(rho.num_qubits())
        .into_iter()
        .map(|setting| {
            let rotated = rotate_to_measurement_basis_dm(rho, &setting)?;
            Ok(SettingFrequencies {
                setting,
                frequencies: rotated.probabilities(),
                shots: 0,
            })
        })
        .collect()
}

/// Convert count records to frequencies for the reconstruction routines.
pub fn frequencies_from_records(
    records: &[MeasurementRecord],
    n: usize,
) -> Result<Vec<SettingFrequencies>> {
    records
        .iter()
        .map(|r| SettingFrequencies::from_record(r, n))
        .collect()
}

fn basis_eigenvector(letter: char, bit: usize) -> Result<CVec> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let pair = match (letter, bit) {
        ('X', 0) => [c64(r, 0.0), c64(r, 0.0)],
        ('X', 1) => [c64(r, 0.0), c64(-r, 0.0)],
        ('Y', 0) => [c64(r, 0.0), c64(0.0, r)],
        ('Y', 1) => [c64(r, 0.0), c64(0.0, -r)],
        ('Z', 0) => [c64(1.0, 0.0), c64(0.0, 0.0)],
        ('Z', 1) => [c64(0.0, 0.0), c64(1.0, 0.0)],
        _ => {
            return Err(Error::InvalidArgument(format!(
                "invalid Pauli letter {letter:?} in a tomography setting"
            )))
        }
    };
    Ok(CVec::from_row_slice(&pair))
}

/// The rank-one POVM elements of one local Pauli setting, indexed by outcome.
pub fn setting_projectors(setting: &str) -> Result<Vec<CMat>> {
    let n = setting.len();
    let mut projectors = Vec::with_capacity(1 << n);
    for z in 0..(1usize << n) {
        let mut e = CMat::identity(1, 1);
        for (k, letter) in setting.chars().enumerate() {
            let v = basis_eigenvector(letter, (z >> (n - 1 - k)) & 1)?;
            let proj = CMat::from_fn(2, 2, |i, j| v[i] * v[j].conj());
            e = kron(&e, &proj);
        }
        projectors.push(e);
    }
    Ok(projectors)
}

/// Which reconstruction produced a [`TomographyResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TomographyMethod {
    LinearInversion,
    Mle,
}

/// A reconstructed state and the diagnostics that qualify it.
///
/// `rho_hat` is kept as a raw matrix: the linear-inversion estimate is
/// Hermitian with unit trace but may carry negative eigenvalues under shot
/// noise, which `psd_ok`/`min_eigenvalue` report rather than repair. Use
/// [`TomographyResult::density`] to convert once positivity holds.
#[derive(Debug, Clone)]
pub struct TomographyResult {
    pub rho_hat: CMat,
    pub method: TomographyMethod,
    pub settings_used: usize,
    pub shots_per_setting: u64,
    pub fidelity_to_truth: Option<f64>,
    pub min_eigenvalue: f64,
    pub psd_ok: bool,
    /// False when MLE hit its iteration cap before the likelihood settled.
    pub converged: bool,
    /// Log-likelihood after each MLE iteration; empty for linear inversion.
    pub log_likelihoods: Vec<f64>,
}

impl TomographyResult {
    /// Validate the estimate into a [`DensityMatrix`].
    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_matrix(self.rho_hat.clone())
    }

    /// Record fidelity against a known preparation.
    pub fn with_fidelity_to(mut self, truth: &DensityMatrix) -> Result<Self> {
        self.fidelity_to_truth = Some(fidelity(&self.rho_hat, truth.matrix())?);
        Ok(self)
    }
}

/// Uhlmann fidelity `F(a, b) = (Tr sqrt(sqrt(a) b sqrt(a)))^2` of two states
/// given as raw matrices.
pub fn fidelity(a: &CMat, b: &CMat) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::InvalidArgument("fidelity needs equal-dimension states".into()));
    }
    let sqrt_a = hermitian_fn(a, |x| x.max(0.0).sqrt());
    let inner = &sqrt_a * b * &sqrt_a;
    let herm = (&inner + inner.adjoint()) * c64(0.5, 0.0);
    let (vals, _) = hermitian_eigen(&herm);
    let tr: f64 = vals.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok(tr * tr)
}

/// Trace distance `(1/2) ||a - b||_1` of two states given as raw matrices.
pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    trace_norm(&(a - b)) / 2.0
}

fn infer_qubits(data: &[SettingFrequencies]) -> Result<usize> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("tomography needs measurement data".into()));
    }
    let n = data[0].setting.len();
    for d in data {
        if d.setting.len() != n || d.frequencies.len() != (1 << n) {
            return Err(Error::InvalidArgument(format!(
                "setting {:?} carries {} frequencies; expected {} over {n} qubits",
                d.setting,
                d.frequencies.len(),
                1 << n
            )));
        }
    }
    Ok(n)
}

fn hermitize_and_normalize(m: &CMat) -> Result<CMat> {
    let herm = (m + m.adjoint()) * c64(0.5, 0.0);
    let tr: C64 = (0..herm.nrows()).map(|i| herm[(i, i)]).sum();
    if tr.re.abs() < 1e-9 {
        return Err(Error::Numeric("reconstructed matrix has vanishing trace".into()));
    }
    Ok(herm / c64(tr.re, 0.0))
}

/// Least-squares tomography: stack `p_i = Tr(rho E_i)` into a linear system
/// and solve `vec rho = (A^H A)^(-1) A^H p`. The estimate is Hermitized and
/// trace-normalized; positivity violations are flagged, not repaired.
pub fn qst_linear_inversion(data: &[SettingFrequencies]) -> Result<TomographyResult> {
    let n = infer_qubits(data)?;
    let d = 1usize << n;
    let rows = data.len() * d;
    let mut a = CMat::zeros(rows, d * d);
    let mut p = CVec::zeros(rows);
    let mut row = 0usize;
    for sf in data {
        let projectors = setting_projectors(&sf.setting)?;
        for (z, e) in projectors.iter().enumerate() {
            // Tr(rho E) = sum_{i,j} rho[i,j] E[j,i]; vec(rho) is column-major
            for j in 0..d {
                for i in 0..d {
                    a[(row, j * d + i)] = e[(j, i)];
                }
            }
            p[row] = c64(sf.frequencies[z], 0.0);
            row += 1;
        }
    }
    if rows < d * d {
        return Err(Error::Singular(format!(
            "{rows} measurement rows cannot determine {} matrix entries; \
             the setting set is not informationally complete",
            d * d
        )));
    }
    let sv = svd(&a)?;
    let (s_max, s_min) = (sv.s[0], sv.s[sv.s.len() - 1]);
    if s_min < 1e-10 * s_max {
        return Err(Error::Singular(format!(
            "design matrix is rank deficient (sigma_min/sigma_max = {:.3e}); \
             the setting set is not informationally complete",
            s_min / s_max
        )));
    }
    let x = lstsq(&a, &p, 1e-12)?;
    let raw = CMat::from_fn(d, d, |i, j| x[j * d + i]);
    let rho_hat = hermitize_and_normalize(&raw)?;
    let (vals, _) = hermitian_eigen(&rho_hat);
    let min_eigenvalue = vals[0];
    Ok(TomographyResult {
        rho_hat,
        method: TomographyMethod::LinearInversion,
        settings_used: data.len(),
        shots_per_setting: data[0].shots,
        fidelity_to_truth: None,
        min_eigenvalue,
        psd_ok: min_eigenvalue >= -PSD_TOL,
        converged: true,
        log_likelihoods: Vec::new(),
    })
}

/// Maximum-likelihood tomography by the diluted `R rho R` fixed point:
/// `R = sum_i (f_i / Tr(rho E_i)) E_i`, `rho <- N[(I + eps R) rho (I + eps R)]`
/// with dilution `eps = 0.5`. The output is PSD with unit trace by
/// construction, and the recorded log-likelihood sequence is non-decreasing.
/// Iteration stops once the iterate moves by less than 1e-10 or after 10^4
/// steps, whichever comes first; hitting the cap is reported through
/// `converged`, not as an error.
pub fn qst_mle(data: &[SettingFrequencies]) -> Result<TomographyResult> {
    let n = infer_qubits(data)?;
    let d = 1usize << n;
    let settings = data.len() as f64;
    let mut elements: Vec<(f64, CMat)> = Vec::with_capacity(data.len() * d);
    for sf in data {
        let projectors = setting_projectors(&sf.setting)?;
        for (z, e) in projectors.into_iter().enumerate() {
            // normalize so the weights sum to one across all settings
            elements.push((sf.frequencies[z] / settings, e));
        }
    }

    let log_likelihood = |rho: &CMat| -> f64 {
        elements
            .iter()
            .filter(|(f, _)| *f > 0.0)
            .map(|(f, e)| {
                let p = trace_product(rho, e).max(PROB_FLOOR);
                f * p.ln()
            })
            .sum()
    };

    let mut rho = CMat::identity(d, d) / c64(d as f64, 0.0);
    let mut log_likelihoods = Vec::new();
    let mut converged = false;
    for _ in 0..MLE_MAX_ITERS {
        let mut r = CMat::zeros(d, d);
        for (f, e) in &elements {
            if *f > 0.0 {
                let p = trace_product(&rho, e).max(PROB_FLOOR);
                r += e * c64(f / p, 0.0);
            }
        }
        let step = CMat::identity(d, d) + r * c64(MLE_DILUTION, 0.0);
        let updated = &step * &rho * &step;
        let next = hermitize_and_normalize(&updated)?;
        let moved = qml_core::linalg::frob_distance(&next, &rho);
        rho = next;
        log_likelihoods.push(log_likelihood(&rho));
        if moved < MLE_STEP_TOL {
            converged = true;
            break;
        }
    }

    let (vals, _) = hermitian_eigen(&rho);
    let min_eigenvalue = vals[0];
    Ok(TomographyResult {
        rho_hat: rho,
        method: TomographyMethod::Mle,
        settings_used: data.len(),
        shots_per_setting: data[0].shots,
        fidelity_to_truth: None,
        min_eigenvalue,
        psd_ok: min_eigenvalue >= -PSD_TOL,
        converged,
        log_likelihoods,
    })
}

fn trace_product(rho: &CMat, e: &CMat) -> f64 {
    let d = rho.nrows();
    let mut tr = c64(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            tr += rho[(i, j)] * e[(j, i)];
        }
    }
    tr.re
}

/// Draw a random full-rank mixed state by mixing `2^n + 1` Haar-random pure
/// states with decreasing weights; handy for tomography exercises.
pub fn random_mixed_state(n: usize, seed: u64) -> Result<DensityMatrix> {
    let d = 1usize << n;
    let mut mix = CMat::zeros(d, d);
    let total: f64 = (1..=d + 1).sum::<usize>() as f64;
    for i in 0..=d {
        let weight = (d + 1 - i) as f64 / total;
        let mut rng = substream(seed, "mixed-component", i as u64);
        let psi = qml_core::haar::haar_random_state(n, &mut rng)?;
        mix += psi.to_density().matrix() * c64(weight, 0.0);
    }
    DensityMatrix::from_matrix(mix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qml_core::gates::{apply_gate, h};

    #[test]
    fn settings_enumerate_all_strings() {
        let s = pauli_settings(2);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0], "XX");
        assert_eq!(s[8], "ZZ");
        assert!(s.contains(&"YZ".to_string()));
    }

    #[test]
    fn projectors_match_rotation_probabilities() {
        let state = apply_gate(&StateVector::zero(2).unwrap(), &h(), &[0]).unwrap();
        for setting in pauli_settings(2) {
            let rotated = rotate_to_measurement_basis(&state, &setting).unwrap();
            let probs = rotated.probabilities();
            for (z, e) in setting_projectors(&setting).unwrap().iter().enumerate() {
                let born = state.amplitudes().dotc(&(e * state.amplitudes())).re;
                assert!((born - probs[z]).abs() < 1e-12, "{setting} outcome {z}");
            }
        }
    }

    #[test]
    fn linear_inversion_recovers_ground_state_exactly() {
        let state = StateVector::zero(1).unwrap();
        let data = exact_setting_frequencies(&state).unwrap();
        let result = qst_linear_inversion(&data).unwrap();
        let truth = state.to_density();
        assert!(trace_distance(&result.rho_hat, truth.matrix()) < 1e-10);
        assert!(result.psd_ok);
    }

    #[test]
    fn linear_inversion_recovers_random_mixed_state() {
        let rho = random_mixed_state(1, 99).unwrap();
        let data = exact_setting_frequencies_dm(&rho).unwrap();
        let result = qst_linear_inversion(&data).unwrap();
        assert!(trace_distance(&result.rho_hat, rho.matrix()) < 1e-9);
    }

    #[test]
    fn dropping_settings_triggers_the_rank_check() {
        let state = StateVector::zero(1).unwrap();
        let data = exact_setting_frequencies(&state).unwrap();
        match qst_linear_inversion(&data[..1]) {
            Err(Error::Singular(_)) => {}
            other => panic!("expected a singularity error, got {other:?}"),
        }
    }

    #[test]
    fn mle_recovers_plus_state_from_exact_data() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), &h(), &[0]).unwrap();
        let data = exact_setting_frequencies(&plus).unwrap();
        let result = qst_mle(&data).unwrap();
        let f = fidelity(&result.rho_hat, plus.to_density().matrix()).unwrap();
        assert!(f >= 1.0 - 1e-8, "fidelity {f}");
        assert!(result.converged);
    }

    #[test]
    fn mle_on_maximally_mixed_data_returns_the_identity() {
        let rho = DensityMatrix::maximally_mixed(1).unwrap();
        let data = exact_setting_frequencies_dm(&rho).unwrap();
        let result = qst_mle(&data).unwrap();
        assert!(trace_distance(&result.rho_hat, rho.matrix()) < 1e-6);
    }

    #[test]
    fn mle_log_likelihood_is_monotone() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), &h(), &[0]).unwrap();
        let data = exact_setting_frequencies(&plus).unwrap();
        let result = qst_mle(&data).unwrap();
        for pair in result.log_likelihoods.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12);
        }
    }

    #[test]
    fn fidelity_of_a_state_with_itself_is_one() {
        let rho = random_mixed_state(2, 5).unwrap();
        let f = fidelity(rho.matrix(), rho.matrix()).unwrap();
        // the matrix square root amplifies rounding near zero eigenvalues to
        // sqrt(eps), so the tolerance is looser than usual
        assert!((f - 1.0).abs() < 1e-7);
    }
}
