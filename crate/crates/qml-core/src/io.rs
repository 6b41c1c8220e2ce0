//! JSON serialization for states and complex matrices.
//!
//! Complex numbers are `[re, im]` pairs; matrices are arrays of row arrays.
//! Deserialization runs the same invariant checks as the in-memory
//! constructors, so a corrupted file fails loudly instead of propagating.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, StateVector};
use crate::{c64, CMat, CVec, C64};

fn complex_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

fn complex_from_json(value: &Value) -> Result<C64> {
    let pair = value
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse("complex entry must be a [re, im] pair".into()))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| Error::Parse("complex entry has a non-numeric real part".into()))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| Error::Parse("complex entry has a non-numeric imaginary part".into()))?;
    Ok(c64(re, im))
}

pub fn cvec_to_json(v: &CVec) -> Value {
    Value::Array(v.iter().map(|&z| complex_to_json(z)).collect())
}

pub fn cvec_from_json(value: &Value) -> Result<CVec> {
    let entries = value
        .as_array()
        .ok_or_else(|| Error::Parse("vector must be a JSON array".into()))?;
    let parsed = entries
        .iter()
        .map(complex_from_json)
        .collect::<Result<Vec<_>>>()?;
    Ok(CVec::from_vec(parsed))
}

pub fn cmat_to_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn cmat_from_json(value: &Value) -> Result<CMat> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::Parse("matrix must be a JSON array of rows".into()))?;
    if rows.is_empty() {
        return Err(Error::Parse("matrix has no rows".into()));
    }
    let mut data: Vec<Vec<C64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let entries = row
            .as_array()
            .ok_or_else(|| Error::Parse("matrix row must be a JSON array".into()))?;
        data.push(entries.iter().map(complex_from_json).collect::<Result<Vec<_>>>()?);
    }
    let ncols = data[0].len();
    if data.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("matrix rows have inconsistent lengths".into()));
    }
    Ok(CMat::from_fn(data.len(), ncols, |i, j| data[i][j]))
}

pub fn state_to_json(state: &StateVector) -> Value {
    json!({
        "num_qubits": state.num_qubits(),
        "amplitudes": cvec_to_json(state.amplitudes()),
    })
}

pub fn state_from_json(value: &Value) -> Result<StateVector> {
    let amps = value
        .get("amplitudes")
        .ok_or_else(|| Error::Parse("state record is missing \"amplitudes\"".into()))?;
    let v = cvec_from_json(amps)?;
    let state = StateVector::from_amplitudes(v.iter().copied().collect())?;
    if let Some(n) = value.get("num_qubits").and_then(Value::as_u64) {
        if n as usize != state.num_qubits() {
            return Err(Error::Parse(format!(
                "state record claims {n} qubits but holds {} amplitudes",
                state.dim()
            )));
        }
    }
    Ok(state)
}

pub fn density_to_json(rho: &DensityMatrix) -> Value {
    json!({
        "num_qubits": rho.num_qubits(),
        "matrix": cmat_to_json(rho.matrix()),
    })
}

pub fn density_from_json(value: &Value) -> Result<DensityMatrix> {
    let m = value
        .get("matrix")
        .ok_or_else(|| Error::Parse("density record is missing \"matrix\"".into()))?;
    let rho = DensityMatrix::from_matrix(cmat_from_json(m)?)?;
    if let Some(n) = value.get("num_qubits").and_then(Value::as_u64) {
        if n as usize != rho.num_qubits() {
            return Err(Error::Parse(format!(
                "density record claims {n} qubits but is {}-dimensional",
                rho.dim()
            )));
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{apply_gate, h};

    #[test]
    fn state_roundtrip_is_exact() {
        let plus = apply_gate(&StateVector::zero(2).unwrap(), &h(), &[0]).unwrap();
        let back = state_from_json(&state_to_json(&plus)).unwrap();
        assert_eq!(back.amplitudes(), plus.amplitudes());
    }

    #[test]
    fn density_roundtrip_is_exact() {
        let rho = StateVector::basis(1, 1).unwrap().to_density();
        let back = density_from_json(&density_to_json(&rho)).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn loading_runs_invariant_checks() {
        let bad = json!({ "num_qubits": 1, "amplitudes": [[1.0, 0.0], [1.0, 0.0]] });
        assert!(state_from_json(&bad).is_err());
    }

    #[test]
    fn malformed_entries_are_parse_errors() {
        let bad = json!({ "amplitudes": [[1.0], [0.0, 0.0]] });
        match state_from_json(&bad) {
            Err(Error::Parse(_)) => {}
            other => panic!("expected a parse error, got {other:?}"),
        }
    }
}
