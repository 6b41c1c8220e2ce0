//! Shot-based read-out: Pauli expectation estimation via basis rotations,
//! observable estimation term by term, and Pauli decomposition of Hermitian
//! matrices. Measurement data is exchanged as JSON-lines records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qml_core::gates::{self, apply_gate, apply_gate_dm};
use qml_core::linalg::{is_hermitian, max_abs};
use qml_core::measure::measure_computational;
use qml_core::observable::Observable;
use qml_core::pauli::{pauli_string_matrix, pauli_strings};
use qml_core::rng::{stream, substream, Prng};
use qml_core::state::{DensityMatrix, StateVector};
use qml_core::{c64, CMat, Error, Result};

const HERM_TOL: f64 = 1e-10;
const RECONSTRUCT_TOL: f64 = 1e-10;

/// Rotate a state so that measuring each qubit in the computational basis
/// realizes the given Pauli-basis measurement: `H` maps the X eigenbasis to
/// computational, `H S^H` does the same for Y, and Z (or I) needs nothing.
pub fn rotate_to_measurement_basis(state: &StateVector, setting: &str) -> Result<StateVector> {
    if setting.len() != state.num_qubits() {
        return Err(Error::InvalidArgument(format!(
            "setting {setting:?} has {} letters for a {}-qubit state",
            setting.len(),
            state.num_qubits()
        )));
    }
    let mut rotated = state.clone();
    for (k, letter) in setting.chars().enumerate() {
        match letter {
            'I' | 'Z' => {}
            'X' => rotated = apply_gate(&rotated, &gates::h(), &[k])?,
            'Y' => {
                rotated = apply_gate(&rotated, &gates::s_dagger(), &[k])?;
                rotated = apply_gate(&rotated, &gates::h(), &[k])?;
            }
            other => {
                return Err(Error::InvalidArgument(format!(
                    "invalid Pauli letter {other:?} in setting {setting:?}"
                )))
            }
        }
    }
    Ok(rotated)
}

/// Density-matrix version of [`rotate_to_measurement_basis`].
pub fn rotate_to_measurement_basis_dm(rho: &DensityMatrix, setting: &str) -> Result<DensityMatrix> {
    if setting.len() != rho.num_qubits() {
        return Err(Error::InvalidArgument(format!(
            "setting {setting:?} has {} letters for a {}-qubit state",
            setting.len(),
            rho.num_qubits()
        )));
    }
    let mut rotated = rho.clone();
    for (k, letter) in setting.chars().enumerate() {
        match letter {
            'I' | 'Z' => {}
            'X' => rotated = apply_gate_dm(&rotated, &gates::h(), &[k])?,
            'Y' => {
                rotated = apply_gate_dm(&rotated, &gates::s_dagger(), &[k])?;
                rotated = apply_gate_dm(&rotated, &gates::h(), &[k])?;
            }
            other => {
                return Err(Error::InvalidArgument(format!(
                    "invalid Pauli letter {other:?} in setting {setting:?}"
                )))
            }
        }
    }
    Ok(rotated)
}

/// Parity of the measured bits at the non-identity positions of a Pauli
/// string: the +/-1 eigenvalue the outcome contributes.
fn outcome_sign(outcome: usize, setting: &str, n: usize) -> f64 {
    let mut ones = 0u32;
    for (k, letter) in setting.chars().enumerate() {
        if letter != 'I' && (outcome >> (n - 1 - k)) & 1 == 1 {
            ones += 1;
        }
    }
    if ones % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn estimate_pauli_with_rng(
    state: &StateVector,
    pauli: &str,
    shots: u64,
    rng: &mut Prng,
) -> Result<f64> {
    let n = state.num_qubits();
    let rotated = rotate_to_measurement_basis(state, pauli)?;
    let measurement = measure_computational(&rotated, shots, rng)?;
    let weights = measurement.frequencies();
    Ok(weights
        .iter()
        .enumerate()
        .map(|(z, w)| w * outcome_sign(z, pauli, n))
        .sum())
}

/// Estimate `<P>` for a Pauli string over `{I,X,Y,Z}`.
///
/// `shots = 0` evaluates the exact expectation; otherwise the estimate is the
/// mean of `shots` sampled +/-1 outcomes. The RNG stream is derived from the
/// seed and the Pauli string, so estimates are reproducible per seed.
pub fn estimate_pauli_expectation(
    state: &StateVector,
    pauli: &str,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    let mut rng = stream(seed, &format!("readout:{pauli}"));
    estimate_pauli_with_rng(state, pauli, shots, &mut rng)
}

/// Estimate `<O> = sum_i alpha_i <P_i>` term by term. Each term consumes
/// `shots_per_term` shots from its own derived RNG stream.
pub fn estimate_observable(
    state: &StateVector,
    obs: &Observable,
    shots_per_term: u64,
    seed: u64,
) -> Result<f64> {
    let terms = obs.pauli_terms().ok_or_else(|| {
        Error::Validation("observable carries no Pauli decomposition to estimate from".into())
    })?;
    let mut total = 0.0;
    for (i, (coeff, pauli)) in terms.iter().enumerate() {
        let mut rng = substream(seed, &format!("readout-term:{pauli}"), i as u64);
        total += coeff * estimate_pauli_with_rng(state, pauli, shots_per_term, &mut rng)?;
    }
    Ok(total)
}

/// Expand a Hermitian matrix over Pauli strings: `H = sum_i c_i P_i` with
/// `c_i = Tr(H P_i) / 2^N`. Coefficients are real and the expansion
/// reconstructs `H` within 1e-10; zero terms are dropped.
pub fn pauli_decompose(h: &CMat) -> Result<Vec<(f64, String)>> {
    if !h.is_square() || !h.nrows().is_power_of_two() {
        return Err(Error::InvalidArgument(
            "Pauli decomposition needs a square power-of-two matrix".into(),
        ));
    }
    if !is_hermitian(h, HERM_TOL) {
        return Err(Error::Validation("Pauli decomposition needs a Hermitian matrix".into()));
    }
    let d = h.nrows();
    let n = d.trailing_zeros() as usize;
    let mut terms = Vec::new();
    for s in pauli_strings(n) {
        let p = pauli_string_matrix(&s)?;
        let mut tr = c64(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                tr += h[(i, j)] * p[(j, i)];
            }
        }
        let coeff = tr.re / d as f64;
        if coeff.abs() > 1e-13 {
            terms.push((coeff, s));
        }
    }
    let mut check = CMat::zeros(d, d);
    for (coeff, s) in &terms {
        check += pauli_string_matrix(s)? * c64(*coeff, 0.0);
    }
    let residual = max_abs(&(check - h));
    if residual > RECONSTRUCT_TOL {
        return Err(Error::Numeric(format!(
            "Pauli expansion residual {residual} exceeds 1e-10"
        )));
    }
    Ok(terms)
}

/// One measurement setting's worth of shot data: the Pauli basis measured and
/// the observed counts per outcome bitstring (zero counts omitted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub setting: String,
    pub counts: BTreeMap<String, u64>,
}

/// Render an outcome index as a bitstring, qubit 0 leftmost.
pub fn outcome_bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|k| if (index >> (n - 1 - k)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse an outcome bitstring back to its basis index.
pub fn outcome_index(bits: &str, n: usize) -> Result<usize> {
    if bits.len() != n {
        return Err(Error::Parse(format!(
            "outcome {bits:?} has {} bits, expected {n}",
            bits.len()
        )));
    }
    let mut index = 0usize;
    for ch in bits.chars() {
        index = (index << 1)
            | match ch {
                '0' => 0,
                '1' => 1,
                other => return Err(Error::Parse(format!("invalid outcome bit {other:?}"))),
            };
    }
    Ok(index)
}

/// Measure one Pauli setting with `shots >= 1` shots.
pub fn measure_setting(
    state: &StateVector,
    setting: &str,
    shots: u64,
    rng: &mut Prng,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::InvalidArgument(
            "measurement records hold counts; use the exact-probability path for shots = 0".into(),
        ));
    }
    let n = state.num_qubits();
    let rotated = rotate_to_measurement_basis(state, setting)?;
    let measurement = measure_computational(&rotated, shots, rng)?;
    let counts_vec = measurement.counts.expect("sampled measurement always carries counts");
    let mut counts = BTreeMap::new();
    for (z, &c) in counts_vec.iter().enumerate() {
        if c > 0 {
            counts.insert(outcome_bitstring(z, n), c);
        }
    }
    Ok(MeasurementRecord {
        setting: setting.to_string(),
        counts,
    })
}

/// Measure every full-weight local Pauli setting (all `3^N` strings over
/// `{X,Y,Z}`), each with its own RNG substream of the seed.
pub fn collect_records(
    state: &StateVector,
    shots_per_setting: u64,
    seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    crate::tomography::pauli_settings(state.num_qubits())
        .iter()
        .enumerate()
        .map(|(i, setting)| {
            let mut rng = substream(seed, &format!("setting:{setting}"), i as u64);
            measure_setting(state, setting, shots_per_setting, &mut rng)
        })
        .collect()
}

/// Serialize records as JSON lines, one record per line.
pub fn records_to_jsonl(records: &[MeasurementRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| Error::Parse(format!("cannot serialize record: {e}")))?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Parse JSON-lines measurement records; blank lines are skipped.
pub fn records_from_jsonl(text: &str) -> Result<Vec<MeasurementRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| Error::Parse(format!("bad measurement record on line {}: {e}", i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qml_core::gates::h;

    fn plus() -> StateVector {
        apply_gate(&StateVector::zero(1).unwrap(), &h(), &[0]).unwrap()
    }

    #[test]
    fn x_on_plus_is_one_exactly() {
        assert!((estimate_pauli_expectation(&plus(), "X", 0, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn y_on_circular_state_is_one_exactly() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let state = StateVector::from_amplitudes(vec![c64(r, 0.0), c64(0.0, r)]).unwrap();
        assert!((estimate_pauli_expectation(&state, "Y", 0, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zz_on_bell_state_concentrates_near_one() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(vec![
            c64(r, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(r, 0.0),
        ])
        .unwrap();
        let est = estimate_pauli_expectation(&bell, "ZZ", 10_000, 7).unwrap();
        assert!((est - 1.0).abs() < 0.05);
    }

    #[test]
    fn identity_letters_are_skipped_in_parity() {
        let state = StateVector::basis(2, 0b01).unwrap();
        // <Z I> on |01> = +1 (qubit 0 is |0>), <I Z> = -1
        assert!((estimate_pauli_expectation(&state, "ZI", 0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((estimate_pauli_expectation(&state, "IZ", 0, 1).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn observable_estimation_sums_terms() {
        let obs = Observable::from_pauli_terms(vec![(0.5, "ZI".into()), (0.5, "IZ".into())])
            .unwrap();
        let state = StateVector::basis(2, 0b01).unwrap();
        assert!(estimate_observable(&state, &obs, 0, 1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn observable_without_terms_is_rejected() {
        let obs = Observable::from_matrix(CMat::identity(2, 2)).unwrap();
        assert!(estimate_observable(&plus(), &obs, 0, 1).is_err());
    }

    #[test]
    fn decompose_z_is_a_single_term() {
        let z = pauli_string_matrix("Z").unwrap();
        let terms = pauli_decompose(&z).unwrap();
        assert_eq!(terms, vec![(1.0, "Z".to_string())]);
    }

    #[test]
    fn decompose_demo_matrix() {
        let iz = pauli_string_matrix("IZ").unwrap();
        let xx = pauli_string_matrix("XX").unwrap();
        let a = iz * c64(0.36, 0.0) + xx * c64(0.64, 0.0);
        let terms = pauli_decompose(&a).unwrap();
        assert_eq!(
            terms,
            vec![(0.36, "IZ".to_string()), (0.64, "XX".to_string())]
        );
    }

    #[test]
    fn non_hermitian_decomposition_is_rejected() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = c64(1.0, 0.0);
        assert!(pauli_decompose(&m).is_err());
    }

    #[test]
    fn records_roundtrip_through_jsonl() {
        let mut rng = stream(3, "record");
        let rec = measure_setting(&plus(), "Z", 100, &mut rng).unwrap();
        let text = records_to_jsonl(std::slice::from_ref(&rec)).unwrap();
        let back = records_from_jsonl(&text).unwrap();
        assert_eq!(back, vec![rec]);
    }

    #[test]
    fn bitstring_helpers_roundtrip() {
        for z in 0..8 {
            let s = outcome_bitstring(z, 3);
            assert_eq!(outcome_index(&s, 3).unwrap(), z);
        }
    }
}
