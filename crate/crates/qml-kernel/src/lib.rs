//! Quantum and classical kernel machines with advantage diagnostics.
//!
//! Feature maps turn classical points into quantum states, and the squared
//! state overlap is the kernel. Around that sit the usual kernel-methods
//! toolkit (Gram matrices, ridge regression, risk bounds) and the
//! diagnostics that say when a quantum kernel can actually help: model
//! complexity `y^T K^-1 y`, the geometric difference between two kernels,
//! and the adversarial datasets that saturate it. A density-matrix
//! embedding carries Euclidean inner products into state overlaps, and a
//! Fourier fitter exposes the frequency content of angle-encoding kernels.
//!
//! Kernel evaluation is exact by default; shot-based estimators for the
//! adjoint-circuit and SWAP-test protocols sit alongside for noise studies.

pub mod advantage;
pub mod data;
pub mod embed;
pub mod fourier;
pub mod gram;
pub mod maps;
pub mod ridge;

pub use advantage::{
    adversarial_dataset, geometric_difference, model_complexity, AdversarialDataset,
    GeometricDifference, ModelComplexity,
};
pub use data::{parse_labeled_csv, parse_optdigits_csv};
pub use embed::{c2qe_embed, c2qe_sample, euclidean_inner_from_states};
pub use fourier::{kernel_fourier_decompose, FourierTable};
pub use gram::{
    classical_kernel, kernel_matrix, kernel_vector, ClassicalKernel, KernelMatrix, KernelSpec,
};
pub use maps::{
    encode_point, quantum_kernel, quantum_kernel_adjoint_sampled,
    quantum_kernel_swap_test_sampled, FeatureMapSpec, MapKind,
};
pub use ridge::{kernel_risk_bounds, ridge_fit, ridge_predict, RidgeModel, RiskBounds};
