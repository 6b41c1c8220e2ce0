//! Classical kernels, Gram matrices, and their validation.

use crate::maps::{quantum_kernel, FeatureMapSpec};
use qml_core::{Error, Result, RMat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const SYMMETRY_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-8;
const DIAGONAL_TOL: f64 = 1e-10;

/// Classical kernel functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ClassicalKernel {
    /// `(x . x' + c)^m`.
    Polynomial { degree: u32, constant: f64 },
    /// `exp(-||x - x'|| / (2 sigma^2))`.
    Gaussian { sigma: f64 },
    /// `tanh(a (x . x') + b)`.
    Sigmoid { a: f64, b: f64 },
}

impl ClassicalKernel {
    fn validate(&self) -> Result<()> {
        match *self {
            ClassicalKernel::Polynomial { degree, constant } => {
                if degree < 1 {
                    return Err(Error::InvalidArgument(
                        "polynomial kernels need degree >= 1".into(),
                    ));
                }
                if !(constant >= 0.0 && constant.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "polynomial kernels need a finite constant >= 0".into(),
                    ));
                }
            }
            ClassicalKernel::Gaussian { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "gaussian kernels need sigma > 0, got {sigma}"
                    )));
                }
            }
            ClassicalKernel::Sigmoid { a, b } => {
                if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "sigmoid kernels need a > 0 and b > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Evaluate a classical kernel on one pair of points.
pub fn classical_kernel(kind: &ClassicalKernel, x: &[f64], x_prime: &[f64]) -> Result<f64> {
    kind.validate()?;
    if x.len() != x_prime.len() {
        return Err(Error::InvalidArgument(format!(
            "kernel inputs differ in length: {} vs {}",
            x.len(),
            x_prime.len()
        )));
    }
    let dot: f64 = x.iter().zip(x_prime).map(|(a, b)| a * b).sum();
    Ok(match *kind {
        ClassicalKernel::Polynomial { degree, constant } => (dot + constant).powi(degree as i32),
        ClassicalKernel::Gaussian { sigma } => {
            let dist = x
                .iter()
                .zip(x_prime)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            (-dist / (2.0 * sigma * sigma)).exp()
        }
        ClassicalKernel::Sigmoid { a, b } => (a * dot + b).tanh(),
    })
}

/// Which kernel produced a Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSpec {
    Quantum(FeatureMapSpec),
    Classical(ClassicalKernel),
}

/// A validated kernel (Gram) matrix: real symmetric, positive semidefinite,
/// and unit-diagonal when it came from a quantum map.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    entries: RMat,
    provenance: KernelSpec,
}

impl KernelMatrix {
    pub fn new(entries: RMat, provenance: KernelSpec) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Validation("kernel matrices are square and non-empty".into()));
        }
        let n = entries.nrows();
        for i in 0..n {
            for j in 0..i {
                if (entries[(i, j)] - entries[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::Validation(format!(
                        "kernel matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
            if !entries[(i, i)].is_finite() {
                return Err(Error::Validation("kernel matrix has non-finite entries".into()));
            }
        }
        let min_eig = entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::Validation(format!(
                "kernel matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        if let KernelSpec::Quantum(_) = provenance {
            for i in 0..n {
                if (entries[(i, i)] - 1.0).abs() > DIAGONAL_TOL {
                    return Err(Error::Validation(format!(
                        "quantum kernel diagonal entry {i} is {} instead of 1",
                        entries[(i, i)]
                    )));
                }
            }
        }
        Ok(Self { entries, provenance })
    }

    pub fn entries(&self) -> &RMat {
        &self.entries
    }

    pub fn provenance(&self) -> &KernelSpec {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.nrows() == 0
    }

    /// Serialize the entries as CSV, one row per line.
    pub fn to_csv(&self) -> String {
        let n = self.len();
        let mut out = String::new();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| format!("{:.16e}", self.entries[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse entries from CSV and re-validate under the given provenance.
    pub fn from_csv(text: &str, provenance: KernelSpec) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("kernel CSV must be a square table".into()));
        }
        let entries = RMat::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(entries, provenance)
    }
}

fn kernel_value(spec: &KernelSpec, x: &[f64], x_prime: &[f64]) -> Result<f64> {
    match spec {
        KernelSpec::Quantum(map) => quantum_kernel(map, x, x_prime),
        KernelSpec::Classical(kind) => classical_kernel(kind, x, x_prime),
    }
}

/// Pairwise kernel matrix of a dataset.
pub fn kernel_matrix(data: &[Vec<f64>], spec: &KernelSpec) -> Result<KernelMatrix> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("kernel matrices need at least one point".into()));
    }
    let n = data.len();
    let width = data[0].len();
    if data.iter().any(|row| row.len() != width) {
        return Err(Error::InvalidArgument("all data points must have the same length".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| kernel_value(spec, &data[i], &data[j]).map(|v| (i, j, v)))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = RMat::zeros(n, n);
    for (i, j, v) in values {
        entries[(i, j)] = v;
        entries[(j, i)] = v;
    }
    KernelMatrix::new(entries, spec.clone())
}

/// Kernel values of one point against every training point, in training
/// order — the vector dual models predict with.
pub fn kernel_vector(data: &[Vec<f64>], spec: &KernelSpec, x: &[f64]) -> Result<Vec<f64>> {
    data.iter().map(|p| kernel_value(spec, p, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qml_core::rng::stream;
    use rand::Rng;

    fn random_points(n: usize, d: usize, label: &str) -> Vec<Vec<f64>> {
        let mut rng = stream(17, label);
        (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(0.0..3.0)).collect())
            .collect()
    }

    #[test]
    fn degree_two_polynomial_matches_its_explicit_features() {
        let kind = ClassicalKernel::Polynomial { degree: 2, constant: 0.0 };
        let x = [0.7, -1.2];
        let y = [2.0, 0.5];
        let phi = |p: &[f64]| [p[0] * p[0], p[1] * p[1], 2.0_f64.sqrt() * p[0] * p[1]];
        let primal: f64 = phi(&x).iter().zip(phi(&y).iter()).map(|(a, b)| a * b).sum();
        assert!((classical_kernel(&kind, &x, &y).unwrap() - primal).abs() < 1e-12);
    }

    #[test]
    fn gaussian_kernel_is_one_at_zero_distance() {
        let kind = ClassicalKernel::Gaussian { sigma: 0.8 };
        let x = [0.3, 0.9, -2.0];
        assert!((classical_kernel(&kind, &x, &x).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sigmoid_kernel_matches_a_direct_oracle() {
        let kind = ClassicalKernel::Sigmoid { a: 0.5, b: 0.25 };
        let x = [0.2, 1.4];
        let y = [-0.9, 0.8];
        let dot: f64 = x[0] * y[0] + x[1] * y[1];
        let expected = (0.5 * dot + 0.25).tanh();
        assert!((classical_kernel(&kind, &x, &y).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(classical_kernel(&ClassicalKernel::Gaussian { sigma: 0.0 }, &[1.0], &[1.0]).is_err());
        assert!(classical_kernel(
            &ClassicalKernel::Polynomial { degree: 0, constant: 1.0 },
            &[1.0],
            &[1.0]
        )
        .is_err());
    }

    #[test]
    fn single_point_gram_is_the_self_kernel() {
        let spec = KernelSpec::Classical(ClassicalKernel::Gaussian { sigma: 1.0 });
        let k = kernel_matrix(&[vec![0.4, 0.6]], &spec).unwrap();
        assert_eq!(k.len(), 1);
        assert!((k.entries()[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn angle_map_gram_matches_the_pairwise_oracle() {
        let map = FeatureMapSpec::angle_x(2).unwrap();
        let spec = KernelSpec::Quantum(map.clone());
        let data = random_points(3, 2, "gram-angle");
        let k = kernel_matrix(&data, &spec).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let oracle = quantum_kernel(&map, &data[i], &data[j]).unwrap();
                assert!((k.entries()[(i, j)] - oracle).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grams_on_random_points_are_psd() {
        let spec = KernelSpec::Quantum(FeatureMapSpec::angle_x(2).unwrap());
        let data = random_points(20, 2, "gram-psd");
        let k = kernel_matrix(&data, &spec).unwrap();
        let min_eig = k
            .entries()
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert!(min_eig >= -1e-8);
    }

    #[test]
    fn asymmetric_matrices_are_rejected() {
        let mut m = RMat::identity(2, 2);
        m[(0, 1)] = 0.3;
        assert!(matches!(
            KernelMatrix::new(m, KernelSpec::Classical(ClassicalKernel::Gaussian { sigma: 1.0 }))
                .unwrap_err(),
            Error::Validation(_)
        ));
    }

    #[test]
    fn indefinite_matrices_are_rejected() {
        let mut m = RMat::identity(2, 2);
        m[(0, 1)] = 2.0;
        m[(1, 0)] = 2.0;
        assert!(matches!(
            KernelMatrix::new(m, KernelSpec::Classical(ClassicalKernel::Gaussian { sigma: 1.0 }))
                .unwrap_err(),
            Error::Validation(_)
        ));
    }

    #[test]
    fn quantum_grams_must_have_unit_diagonals() {
        let mut m = RMat::identity(2, 2);
        m[(1, 1)] = 0.9;
        assert!(KernelMatrix::new(
            m,
            KernelSpec::Quantum(FeatureMapSpec::single_qubit_rx())
        )
        .is_err());
    }

    #[test]
    fn csv_round_trip_preserves_entries() {
        let spec = KernelSpec::Classical(ClassicalKernel::Gaussian { sigma: 1.3 });
        let data = random_points(4, 2, "gram-csv");
        let k = kernel_matrix(&data, &spec).unwrap();
        let text = k.to_csv();
        let restored = KernelMatrix::from_csv(&text, spec).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(restored.entries()[(i, j)], k.entries()[(i, j)]);
            }
        }
    }
}
