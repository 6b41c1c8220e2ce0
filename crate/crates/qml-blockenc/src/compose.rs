//! Construction and composition of block encodings.
//!
//! Register conventions: every encoding keeps its ancillas in the leading
//! (most significant) qubits, so composite constructions lay registers out as
//! (first input's ancillas, second input's ancillas, ..., system) and the
//! encoded matrix stays in the top-left corner. All constructions here build
//! the composite unitary explicitly; error bounds propagate linearly through
//! the provenance records (`alpha_A * eps_B + alpha_B * eps_A` for products,
//! weighted sums for combinations).

use crate::types::{BlockEncoding, Provenance, UNITARITY_TOL};
use qml_core::gates::embed_unitary;
use qml_core::linalg::{dagger, is_unitary, kron, spectral_norm, unitary_dilation, unitary_with_first_column};
use qml_core::{c64, CMat, CVec, Error, Result};

/// Wrap a unitary as the `(1, 0)`-encoding of itself.
pub fn be_from_unitary(u: &CMat) -> Result<BlockEncoding> {
    if !u.is_square() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    BlockEncoding::new(u.clone(), 1.0, 0, u.nrows(), Provenance::leaf("be_from_unitary"))
}

/// Encode an arbitrary matrix as an `(alpha, 1)`-encoding via the standard
/// one-ancilla dilation, with `alpha` defaulting to the spectral norm.
pub fn be_from_matrix(a: &CMat) -> Result<BlockEncoding> {
    let norm = spectral_norm(a);
    let alpha = if norm > 0.0 { norm } else { 1.0 };
    be_from_matrix_scaled(a, alpha)
}

/// Encode an arbitrary matrix at a caller-chosen scale `alpha >= ||a||`.
pub fn be_from_matrix_scaled(a: &CMat, alpha: f64) -> Result<BlockEncoding> {
    if !a.is_square() || !a.nrows().is_power_of_two() {
        return Err(Error::InvalidArgument(
            "expected a square matrix of power-of-two dimension".into(),
        ));
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "encoding scale must be positive and finite, got {alpha}"
        )));
    }
    let block = a.map(|z| z / alpha);
    let u = unitary_dilation(&block)?;
    let prov = Provenance::leaf("be_from_matrix")
        .with_note(format!("one-ancilla dilation at scale {alpha}"));
    BlockEncoding::new(u, alpha, 1, a.nrows(), prov)
}

/// Linear combination of unitaries: a `(sum_k w_k, ceil(log2 K))`-encoding of
/// `sum_k w_k U_k` via prepare / select / unprepare.
///
/// Weights must be non-negative; fold signs or phases into the unitaries
/// before calling.
pub fn be_lcu(weights: &[f64], unitaries: &[CMat]) -> Result<BlockEncoding> {
    if weights.is_empty() || weights.len() != unitaries.len() {
        return Err(Error::InvalidArgument(format!(
            "need equally many weights and unitaries, got {} and {}",
            weights.len(),
            unitaries.len()
        )));
    }
    if let Some(w) = weights.iter().find(|&&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::Validation(format!(
            "weight {w} is negative or non-finite; fold signs and phases into the unitaries"
        )));
    }
    let dim = unitaries[0].nrows();
    if !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "term dimension {dim} is not a power of two"
        )));
    }
    for u in unitaries {
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::InvalidArgument(
                "all terms must share one dimension".into(),
            ));
        }
        if !is_unitary(u, UNITARITY_TOL) {
            return Err(Error::Validation(
                "a term in the combination is not unitary".into(),
            ));
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument(
            "weights sum to zero; nothing to encode".into(),
        ));
    }
    let prep_qubits = weights.len().next_power_of_two().trailing_zeros() as usize;
    let slots = 1usize << prep_qubits;
    let mut first = CVec::zeros(slots);
    for (j, &w) in weights.iter().enumerate() {
        first[j] = c64((w / total).sqrt(), 0.0);
    }
    let prep = unitary_with_first_column(&first)?;
    let mut select = CMat::zeros(slots * dim, slots * dim);
    for j in 0..slots {
        let mut view = select.view_mut((j * dim, j * dim), (dim, dim));
        if j < weights.len() {
            view.copy_from(&unitaries[j])
        } else {
            view.copy_from(&CMat::identity(dim, dim))
        }
    }
    let prep_full = kron(&prep, &CMat::identity(dim, dim));
    let u = dagger(&prep_full) * select * prep_full;
    let prov = Provenance::leaf("be_lcu").with_note(format!(
        "{} terms at combined weight {total}",
        weights.len()
    ));
    BlockEncoding::new(u, total, prep_qubits, dim, prov)
}

/// Product of two encodings: an `(alpha_A alpha_B, a + b)`-encoding of `A B`.
pub fn be_product(be_a: &BlockEncoding, be_b: &BlockEncoding) -> Result<BlockEncoding> {
    if be_a.target_dim() != be_b.target_dim() {
        return Err(Error::InvalidArgument(format!(
            "target dimensions differ: {} vs {}",
            be_a.target_dim(),
            be_b.target_dim()
        )));
    }
    let n_sys = be_a.num_system_qubits();
    let (a, b) = (be_a.anc(), be_b.anc());
    let n = a + b + n_sys;
    let targets_a: Vec<usize> = (0..a).chain(a + b..n).collect();
    let targets_b: Vec<usize> = (a..a + b + n_sys).collect();
    let ua = embed_unitary(n, be_a.unitary(), &targets_a)?;
    let ub = embed_unitary(n, be_b.unitary(), &targets_b)?;
    let alpha = be_a.alpha() * be_b.alpha();
    let eps = be_a.alpha() * be_b.provenance().epsilon + be_b.alpha() * be_a.provenance().epsilon;
    let prov = Provenance::derived(
        "be_product",
        vec![be_a.provenance().clone(), be_b.provenance().clone()],
        eps,
    );
    BlockEncoding::new(ua * ub, alpha, a + b, be_a.target_dim(), prov)
}

/// Transpose of a real-target encoding: the adjoint dilation encodes `A^T`
/// at the same scale and ancilla count.
pub fn be_transpose(be: &BlockEncoding) -> Result<BlockEncoding> {
    let imag = be
        .extract()
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0_f64, f64::max);
    if imag > 1e-9 {
        return Err(Error::Validation(format!(
            "encoded block has imaginary residue {imag:.3e}; the adjoint trick transposes real targets only"
        )));
    }
    let prov = Provenance::derived(
        "be_transpose",
        vec![be.provenance().clone()],
        be.provenance().epsilon,
    );
    BlockEncoding::new(
        dagger(be.unitary()),
        be.alpha(),
        be.anc(),
        be.target_dim(),
        prov,
    )
}

/// Weighted sum of encodings: the extract is `sum_k x_k A_k` at scale
/// `sum_k x_k alpha_k`, with ancillas padded to a common count plus a
/// preparation register of `ceil(log2 K)` qubits.
///
/// Weights must be non-negative (fold phases into the encodings with
/// [`BlockEncoding::with_phase`]); inputs may carry different scales, which
/// the preparation amplitudes absorb.
pub fn be_linear_combination(
    encodings: &[BlockEncoding],
    weights: &[f64],
) -> Result<BlockEncoding> {
    if encodings.is_empty() || encodings.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "need equally many encodings and weights, got {} and {}",
            encodings.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|&&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::Validation(format!(
            "weight {w} is negative or non-finite; fold signs and phases into the encodings"
        )));
    }
    let dim = encodings[0].target_dim();
    if encodings.iter().any(|e| e.target_dim() != dim) {
        return Err(Error::InvalidArgument(
            "all encodings must share one target dimension".into(),
        ));
    }
    let a_max = encodings.iter().map(BlockEncoding::anc).max().unwrap_or(0);
    let padded: Vec<BlockEncoding> = encodings
        .iter()
        .map(|e| e.pad_ancillas(a_max - e.anc()))
        .collect();
    // Slot k carries weight x_k * alpha_k: the preparation amplitudes absorb
    // both the combination weight and the input scale.
    let slot_weights: Vec<f64> = padded
        .iter()
        .zip(weights)
        .map(|(e, &x)| x * e.alpha())
        .collect();
    let scale: f64 = slot_weights.iter().sum();
    if scale <= 0.0 {
        return Err(Error::InvalidArgument(
            "combination has zero total weight".into(),
        ));
    }
    let prep_qubits = padded.len().next_power_of_two().trailing_zeros() as usize;
    let slots = 1usize << prep_qubits;
    let sub_dim = dim << a_max;
    let mut first = CVec::zeros(slots);
    for (j, &w) in slot_weights.iter().enumerate() {
        first[j] = c64((w / scale).sqrt(), 0.0);
    }
    let prep = unitary_with_first_column(&first)?;
    let mut select = CMat::zeros(slots * sub_dim, slots * sub_dim);
    for j in 0..slots {
        let mut view = select.view_mut((j * sub_dim, j * sub_dim), (sub_dim, sub_dim));
        if j < padded.len() {
            view.copy_from(padded[j].unitary())
        } else {
            view.copy_from(&CMat::identity(sub_dim, sub_dim))
        }
    }
    let prep_full = kron(&prep, &CMat::identity(sub_dim, sub_dim));
    let u = dagger(&prep_full) * select * prep_full;
    let eps = padded
        .iter()
        .zip(weights)
        .map(|(e, &x)| x * e.provenance().epsilon)
        .sum();
    let prov = Provenance::derived(
        "be_linear_combination",
        encodings.iter().map(|e| e.provenance().clone()).collect(),
        eps,
    );
    BlockEncoding::new(u, scale, prep_qubits + a_max, dim, prov)
}

/// Preparation pair for a linear combination with caller-supplied unitaries.
#[derive(Debug, Clone)]
pub struct PrepPair {
    /// Left preparation unitary, applied daggered after the select stage.
    pub left: CMat,
    /// Right preparation unitary, applied before the select stage.
    pub right: CMat,
    /// Normalization: slot `k` contributes `beta * conj(left[k,0]) * right[k,0]`.
    pub beta: f64,
}

/// Linear combination with explicit preparation unitaries.
///
/// Inputs must share one scale `alpha`; the result encodes
/// `sum_k beta conj(c_k) d_k A_k` at scale `alpha * beta`, where `c` and `d`
/// are the first columns of the two preparation unitaries. This is the fully
/// general prepare/select form: the default [`be_linear_combination`] is the
/// special case of a shared symmetric preparation with real amplitudes.
pub fn be_linear_combination_with_prep(
    encodings: &[BlockEncoding],
    prep: &PrepPair,
) -> Result<BlockEncoding> {
    if encodings.is_empty() {
        return Err(Error::InvalidArgument("no encodings to combine".into()));
    }
    let dim = encodings[0].target_dim();
    let alpha = encodings[0].alpha();
    for e in encodings {
        if e.target_dim() != dim {
            return Err(Error::InvalidArgument(
                "all encodings must share one target dimension".into(),
            ));
        }
        if (e.alpha() - alpha).abs() > 1e-12 * alpha.max(1.0) {
            return Err(Error::InvalidArgument(
                "explicit preparation pairs assume one shared input scale".into(),
            ));
        }
    }
    if !prep.beta.is_finite() || prep.beta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "preparation normalization must be positive, got {}",
            prep.beta
        )));
    }
    let slots = prep.left.nrows();
    if prep.right.nrows() != slots || !slots.is_power_of_two() || slots < encodings.len() {
        return Err(Error::InvalidArgument(format!(
            "preparation unitaries need a power-of-two slot count covering all {} terms",
            encodings.len()
        )));
    }
    if !is_unitary(&prep.left, UNITARITY_TOL) || !is_unitary(&prep.right, UNITARITY_TOL) {
        return Err(Error::Validation("preparation pair is not unitary".into()));
    }
    let a_max = encodings.iter().map(BlockEncoding::anc).max().unwrap_or(0);
    let padded: Vec<BlockEncoding> = encodings
        .iter()
        .map(|e| e.pad_ancillas(a_max - e.anc()))
        .collect();
    let prep_qubits = slots.trailing_zeros() as usize;
    let sub_dim = dim << a_max;
    let mut select = CMat::zeros(slots * sub_dim, slots * sub_dim);
    for j in 0..slots {
        let mut view = select.view_mut((j * sub_dim, j * sub_dim), (sub_dim, sub_dim));
        if j < padded.len() {
            view.copy_from(padded[j].unitary())
        } else {
            view.copy_from(&CMat::identity(sub_dim, sub_dim))
        }
    }
    let eye = CMat::identity(sub_dim, sub_dim);
    let u = dagger(&kron(&prep.left, &eye)) * select * kron(&prep.right, &eye);
    let eps_in = encodings
        .iter()
        .map(|e| e.provenance().epsilon)
        .fold(0.0_f64, f64::max);
    let prov = Provenance::derived(
        "be_linear_combination_with_prep",
        encodings.iter().map(|e| e.provenance().clone()).collect(),
        prep.beta * eps_in,
    )
    .with_note("weights taken from the preparation columns".to_string());
    BlockEncoding::new(u, alpha * prep.beta, prep_qubits + a_max, dim, prov)
}

/// Hadamard (entrywise) product: an `(alpha_A alpha_B, a + b + N)`-encoding
/// of `A o B`.
///
/// A CNOT fan copies the system index into a scratch register, so the
/// tensor-product encoding evaluated on index pairs `(i, i)` yields exactly
/// the entrywise product; the scratch register then joins the ancilla block.
pub fn be_hadamard_product(
    be_a: &BlockEncoding,
    be_b: &BlockEncoding,
) -> Result<BlockEncoding> {
    if be_a.target_dim() != be_b.target_dim() {
        return Err(Error::InvalidArgument(format!(
            "target dimensions differ: {} vs {}",
            be_a.target_dim(),
            be_b.target_dim()
        )));
    }
    let dim = be_a.target_dim();
    let n_sys = be_a.num_system_qubits();
    let (a, b) = (be_a.anc(), be_b.anc());
    let n = a + b + 2 * n_sys;
    // Register layout: (anc_A, anc_B, scratch, system). A acts on its
    // ancillas and the system register, B on its ancillas and the scratch.
    let targets_a: Vec<usize> = (0..a).chain(a + b + n_sys..n).collect();
    let targets_b: Vec<usize> = (a..a + b + n_sys).collect();
    let ua = embed_unitary(n, be_a.unitary(), &targets_a)?;
    let ub = embed_unitary(n, be_b.unitary(), &targets_b)?;
    // The index-copy permutation on (scratch, system): |y, x> -> |y xor x, x>.
    let mut perm = CMat::zeros(dim * dim, dim * dim);
    for x in 0..dim {
        for y in 0..dim {
            perm[((y ^ x) * dim + x, y * dim + x)] = c64(1.0, 0.0);
        }
    }
    let pair_targets: Vec<usize> = (a + b..n).collect();
    let p_full = embed_unitary(n, &perm, &pair_targets)?;
    let u = &p_full * ua * ub * p_full;
    let alpha = be_a.alpha() * be_b.alpha();
    let eps = be_a.alpha() * be_b.provenance().epsilon + be_b.alpha() * be_a.provenance().epsilon;
    let prov = Provenance::derived(
        "be_hadamard_product",
        vec![be_a.provenance().clone(), be_b.provenance().clone()],
        eps,
    )
    .with_note(format!("index-copy scratch register adds {n_sys} ancillas"));
    BlockEncoding::new(u, alpha, a + b + n_sys, dim, prov)
}
