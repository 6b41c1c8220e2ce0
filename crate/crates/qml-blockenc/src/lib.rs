//! Block-encoding algebra: embedding matrices into the corners of unitaries
//! and composing, transforming, and inverting them there.
//!
//! An `(alpha, a)`-encoding of an `N`-qubit matrix `A` is a unitary `U` on
//! `a + N` qubits with `A = alpha (<0^a| ⊗ I) U (|0^a> ⊗ I)` — the top-left
//! `2^N × 2^N` block of `U` times the scale `alpha`. Ancilla qubits are the
//! leading (most significant) tensor factors throughout, so the encoded
//! block always sits in the top-left corner of the stored matrix.
//!
//! Constructors marked as compositions ([`be_product`],
//! [`be_linear_combination`], [`be_hadamard_product`], [`be_lcu`]) build the
//! full prepare/select circuitry, so their unitaries are faithful gate-level
//! objects. The singular-value transforms ([`qsvt_apply`],
//! [`be_pseudo_inverse`]) and oversized element-wise polynomials are
//! semantic: the transformed block is computed densely and re-embedded
//! through a dilation, with circuit-level ancilla and query costs recorded
//! in the [`Provenance`] trace instead.

pub mod compose;
pub mod transform;
pub mod types;

pub use compose::{
    be_from_matrix, be_from_matrix_scaled, be_from_unitary, be_hadamard_product, be_lcu,
    be_linear_combination, be_linear_combination_with_prep, be_product, be_transpose, PrepPair,
};
pub use transform::{
    be_diag_from_state, be_elementwise_poly, be_pseudo_inverse, qsvt_apply, state_encode,
    EXPLICIT_ELEMENTWISE_LIMIT,
};
pub use types::{BlockEncoding, PolySpec, Provenance, StateEncoding};
