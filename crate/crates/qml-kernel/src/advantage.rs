//! Kernel advantage diagnostics: model complexity, geometric difference
//! between kernels, and the adversarial datasets that saturate it.

use crate::gram::KernelMatrix;
use qml_core::{Error, Result, RMat, RVec};
use serde::{Deserialize, Serialize};

/// Eigenvalues below this fraction of the largest count as null directions.
const NULL_CUTOFF: f64 = 1e-12;
/// Ridge added to a singular classical kernel before inverting.
const REGULARIZER: f64 = 1e-10;

/// Model complexity `s_K(y) = y^T K^-1 y` of a label vector against a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelComplexity {
    pub value: f64,
    /// True when null directions of `K` were dropped (pseudo-inverse).
    pub used_pseudo_inverse: bool,
}

/// Sorted eigendecomposition of a symmetric matrix, largest eigenvalue
/// first; ties keep the lower original index first.
fn sorted_eigen(m: &RMat) -> (Vec<f64>, Vec<RVec>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors: Vec<RVec> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    (values, vectors)
}

/// `y^T K^+ y` from a sorted eigendecomposition, dropping null directions.
fn quadratic_inverse_form(values: &[f64], vectors: &[RVec], y: &RVec) -> (f64, bool) {
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = top * NULL_CUTOFF;
    let mut total = 0.0;
    let mut dropped = false;
    for (value, vector) in values.iter().zip(vectors) {
        if *value > cutoff {
            let overlap = vector.dot(y);
            total += overlap * overlap / value;
        } else {
            dropped = true;
        }
    }
    (total, dropped)
}

/// Model complexity of the labels `y` under the kernel `K`.
pub fn model_complexity(k: &KernelMatrix, y: &[f64]) -> Result<ModelComplexity> {
    if y.len() != k.len() {
        return Err(Error::InvalidArgument(format!(
            "label count {} does not match kernel size {}",
            y.len(),
            k.len()
        )));
    }
    let (values, vectors) = sorted_eigen(k.entries());
    let (value, used_pseudo_inverse) =
        quadratic_inverse_form(&values, &vectors, &RVec::from_column_slice(y));
    Ok(ModelComplexity { value, used_pseudo_inverse })
}

/// The geometric difference `g(K_C || K_Q)` between two kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricDifference {
    pub value: f64,
    /// Ridge that was added to the classical kernel when it was singular.
    pub lambda_reg: Option<f64>,
}

/// Trace-normalized copy of a kernel matrix: `K * n / Tr(K)`.
fn trace_normalized(k: &KernelMatrix, name: &str) -> Result<RMat> {
    let trace = k.entries().trace();
    if trace <= 0.0 {
        return Err(Error::Validation(format!(
            "{name} kernel has non-positive trace {trace}; cannot normalize"
        )));
    }
    Ok(k.entries() * (k.len() as f64 / trace))
}

/// Everything the geometric-difference pipeline shares with the adversarial
/// construction: the comparison matrix `M = sqrt(K_Q) K_C^-1 sqrt(K_Q)` over
/// trace-normalized kernels, plus the square root of `K_Q`.
struct Comparison {
    m: RMat,
    sqrt_q: RMat,
    normalized_c: RMat,
    normalized_q: RMat,
    lambda_reg: Option<f64>,
}

fn compare_kernels(kc: &KernelMatrix, kq: &KernelMatrix) -> Result<Comparison> {
    if kc.len() != kq.len() {
        return Err(Error::InvalidArgument(format!(
            "kernel sizes differ: {} vs {}",
            kc.len(),
            kq.len()
        )));
    }
    let normalized_c = trace_normalized(kc, "classical")?;
    let normalized_q = trace_normalized(kq, "quantum")?;
    let n = kc.len();

    let (q_values, q_vectors) = sorted_eigen(&normalized_q);
    let mut sqrt_q = RMat::zeros(n, n);
    for (value, vector) in q_values.iter().zip(&q_vectors) {
        let root = value.max(0.0).sqrt();
        sqrt_q += vector * vector.transpose() * root;
    }

    let (c_values, c_vectors) = sorted_eigen(&normalized_c);
    let c_top = c_values.first().copied().unwrap_or(0.0).max(0.0);
    let singular = c_values.iter().any(|&v| v <= c_top * NULL_CUTOFF);
    let mut inv_c = RMat::zeros(n, n);
    let lambda_reg = if singular {
        for (value, vector) in c_values.iter().zip(&c_vectors) {
            inv_c += vector * vector.transpose() / (value.max(0.0) + REGULARIZER);
        }
        Some(REGULARIZER)
    } else {
        for (value, vector) in c_values.iter().zip(&c_vectors) {
            inv_c += vector * vector.transpose() / *value;
        }
        None
    };

    let m = &sqrt_q * inv_c * &sqrt_q;
    let m = (&m + m.transpose()) * 0.5;
    Ok(Comparison { m, sqrt_q, normalized_c, normalized_q, lambda_reg })
}

/// Geometric difference `g = sqrt(||sqrt(K_Q) K_C^-1 sqrt(K_Q)||_inf)`, with
/// both kernels trace-normalized to `n` first.
pub fn geometric_difference(kc: &KernelMatrix, kq: &KernelMatrix) -> Result<GeometricDifference> {
    let cmp = compare_kernels(kc, kq)?;
    let (values, _) = sorted_eigen(&cmp.m);
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    Ok(GeometricDifference { value: top.sqrt(), lambda_reg: cmp.lambda_reg })
}

/// A dataset engineered so the classical kernel needs `g^2` times the model
/// complexity the quantum kernel needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialDataset {
    /// Real-valued labels `y = sqrt(K_Q) v` for the top eigenvector `v`.
    pub real_labels: Vec<f64>,
    /// Median-thresholded `+1`/`-1` labels; ties go to `-1`.
    pub signed_labels: Vec<f64>,
    /// Achieved `s_C(y) / s_Q(y)` on the trace-normalized kernels.
    pub complexity_ratio: f64,
    /// Top eigenvalue of the comparison matrix, the predicted ratio.
    pub g_squared: f64,
}

/// Construct labels that saturate the geometric difference: take the top
/// eigenvector `v` of `sqrt(K_Q) K_C^-1 sqrt(K_Q)` and return
/// `y = sqrt(K_Q) v`, for which `s_C(y) = g^2 s_Q(y)`.
pub fn adversarial_dataset(kc: &KernelMatrix, kq: &KernelMatrix) -> Result<AdversarialDataset> {
    let cmp = compare_kernels(kc, kq)?;
    let (values, vectors) = sorted_eigen(&cmp.m);
    let g_squared = values.first().copied().unwrap_or(0.0).max(0.0);
    let mut v = vectors
        .first()
        .cloned()
        .ok_or_else(|| Error::Validation("comparison matrix has no eigenvectors".into()))?;
    if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            v = -v;
        }
    }
    let y: RVec = &cmp.sqrt_q * &v;

    let (c_values, c_vectors) = sorted_eigen(&cmp.normalized_c);
    let (q_values, q_vectors) = sorted_eigen(&cmp.normalized_q);
    let (s_c, _) = quadratic_inverse_form(&c_values, &c_vectors, &y);
    let (s_q, _) = quadratic_inverse_form(&q_values, &q_vectors, &y);
    let complexity_ratio = if s_q > 0.0 { s_c / s_q } else { f64::NAN };

    let mut sorted: Vec<f64> = y.iter().copied().collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let signed_labels: Vec<f64> = y
        .iter()
        .map(|&value| if value > median { 1.0 } else { -1.0 })
        .collect();

    Ok(AdversarialDataset {
        real_labels: y.iter().copied().collect(),
        signed_labels,
        complexity_ratio,
        g_squared,
    })
}
