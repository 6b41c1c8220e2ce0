//! Pauli matrices, Pauli strings, and their enumeration.

use crate::error::{Error, Result};
use crate::linalg::kron;
use crate::{c64, CMat};

/// Single-qubit Pauli matrix for one of `I`, `X`, `Y`, `Z`.
pub fn pauli_matrix(label: char) -> Result<CMat> {
    let m = match label {
        'I' => CMat::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
        ),
        'X' => CMat::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)],
        ),
        'Y' => CMat::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
        ),
        'Z' => CMat::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)],
        ),
        other => {
            return Err(Error::InvalidArgument(format!(
                "invalid Pauli letter '{other}' (expected I, X, Y or Z)"
            )))
        }
    };
    Ok(m)
}

/// Dense matrix of a Pauli string such as `"XIZ"`, qubit 0 leftmost.
pub fn pauli_string_matrix(label: &str) -> Result<CMat> {
    if label.is_empty() {
        return Err(Error::InvalidArgument("empty Pauli string".into()));
    }
    let mut m = pauli_matrix(label.chars().next().unwrap())?;
    for ch in label.chars().skip(1) {
        m = kron(&m, &pauli_matrix(ch)?);
    }
    Ok(m)
}

/// All Pauli strings on `n` qubits in lexicographic order with I < X < Y < Z.
pub fn pauli_strings(n: usize) -> Vec<String> {
    let letters = ['I', 'X', 'Y', 'Z'];
    let mut out = Vec::with_capacity(4usize.pow(n as u32));
    for idx in 0..4usize.pow(n as u32) {
        let mut s = String::with_capacity(n);
        for q in 0..n {
            let shift = 2 * (n - 1 - q);
            s.push(letters[(idx >> shift) & 3]);
        }
        out.push(s);
    }
    out
}

/// Pauli strings on `n` qubits excluding the all-identity string.
pub fn pauli_strings_nonidentity(n: usize) -> Vec<String> {
    pauli_strings(n)
        .into_iter()
        .filter(|s| s.chars().any(|c| c != 'I'))
        .collect()
}
