//! Small dense linear-algebra helpers shared across the workspace.
//!
//! Thin conveniences over `nalgebra`: conjugate transposes, sorted spectral
//! decompositions, orthonormal completions, and the one-ancilla unitary
//! dilation used to re-embed sub-normalized blocks.

use crate::error::{Error, Result};
use crate::{c64, CMat, CVec, RMat, RVec};

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Frobenius norm of the difference.
pub fn frob_distance(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_unitary(m: &CMat, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let d = m.nrows();
    let gram = m.adjoint() * m;
    let eye = CMat::identity(d, d);
    max_abs(&(gram - eye)) <= tol
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// Returns `(eigenvalues, eigenvectors)` where column `k` of the eigenvector
/// matrix belongs to eigenvalue `k`.
pub fn hermitian_eigen(m: &CMat) -> (RVec, CMat) {
    let eig = m.clone().symmetric_eigen();
    let d = m.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = RVec::from_iterator(d, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vecs = CMat::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(k));
    }
    (vals, vecs)
}

/// Real symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn symmetric_eigen(m: &RMat) -> (RVec, RMat) {
    let eig = m.clone().symmetric_eigen();
    let d = m.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = RVec::from_iterator(d, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vecs = RMat::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(k));
    }
    (vals, vecs)
}

/// Apply a scalar function to a Hermitian matrix through its spectrum.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let d = m.nrows();
    let diag = CMat::from_diagonal(&CVec::from_iterator(
        d,
        vals.iter().map(|&v| c64(f(v), 0.0)),
    ));
    &vecs * diag * vecs.adjoint()
}

/// Apply a scalar function to a real symmetric matrix through its spectrum.
pub fn symmetric_fn(m: &RMat, f: impl Fn(f64) -> f64) -> RMat {
    let (vals, vecs) = symmetric_eigen(m);
    let d = m.nrows();
    let diag = RMat::from_diagonal(&RVec::from_iterator(d, vals.iter().map(|&v| f(v))));
    &vecs * diag * vecs.transpose()
}

/// Singular value decomposition `m = u * diag(s) * v_adj` with singular
/// values sorted descending.
pub struct Svd {
    pub u: CMat,
    pub s: RVec,
    pub v_adj: CMat,
}

pub fn svd(m: &CMat) -> Result<Svd> {
    let decomp = m.clone().svd(true, true);
    let u = decomp
        .u
        .ok_or_else(|| Error::Numeric("SVD did not produce U".into()))?;
    let v_adj = decomp
        .v_t
        .ok_or_else(|| Error::Numeric("SVD did not produce V^H".into()))?;
    let s = decomp.singular_values;
    let r = s.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
    let s_sorted = RVec::from_iterator(r, order.iter().map(|&k| s[k]));
    let mut u_sorted = CMat::zeros(u.nrows(), r);
    let mut v_sorted = CMat::zeros(r, v_adj.ncols());
    for (col, &k) in order.iter().enumerate() {
        u_sorted.set_column(col, &u.column(k));
        v_sorted.set_row(col, &v_adj.row(k));
    }
    Ok(Svd {
        u: u_sorted,
        s: s_sorted,
        v_adj: v_sorted,
    })
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMat) -> f64 {
    m.clone().singular_values().max()
}

/// Trace norm (sum of singular values). For Hermitian differences,
/// `trace_norm(a - b) / 2` is the trace distance.
pub fn trace_norm(m: &CMat) -> f64 {
    m.clone().singular_values().sum()
}

/// Spectral norm of a real matrix.
pub fn spectral_norm_real(m: &RMat) -> f64 {
    m.clone().singular_values().max()
}

/// Solve `a x = b` by LU with partial pivoting.
pub fn solve(a: &CMat, b: &CVec) -> Result<CVec> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Singular("LU solve failed: matrix is singular".into()))
}

/// Solve a real system `a x = b`.
pub fn solve_real(a: &RMat, b: &RVec) -> Result<RVec> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Singular("LU solve failed: matrix is singular".into()))
}

/// Minimum-norm least-squares solution of `a x = b` via the SVD, dropping
/// singular values below `rcond * s_max`.
pub fn lstsq(a: &CMat, b: &CVec, rcond: f64) -> Result<CVec> {
    let d = svd(a)?;
    let s_max = if d.s.len() > 0 { d.s[0] } else { 0.0 };
    let cutoff = rcond * s_max;
    let proj = d.u.adjoint() * b;
    let r = d.s.len();
    let mut scaled = CVec::zeros(r);
    for k in 0..r {
        if d.s[k] > cutoff {
            scaled[k] = proj[k] / c64(d.s[k], 0.0);
        }
    }
    Ok(d.v_adj.adjoint() * scaled)
}

/// Extend `cols` (assumed orthonormal) to a full orthonormal basis of C^dim,
/// returned as the columns of a unitary matrix. Uses twice-iterated
/// Gram-Schmidt against the canonical basis.
pub fn complete_orthonormal_basis(cols: &[CVec], dim: usize) -> Result<CMat> {
    if cols.len() > dim {
        return Err(Error::InvalidArgument(format!(
            "cannot complete {} columns in dimension {dim}",
            cols.len()
        )));
    }
    let mut basis: Vec<CVec> = cols.to_vec();
    let mut canonical = 0usize;
    while basis.len() < dim {
        if canonical >= dim {
            return Err(Error::Numeric(
                "orthonormal completion exhausted the canonical basis".into(),
            ));
        }
        let mut v = CVec::zeros(dim);
        v[canonical] = c64(1.0, 0.0);
        canonical += 1;
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / c64(norm, 0.0));
        }
    }
    let mut m = CMat::zeros(dim, dim);
    for (j, b) in basis.iter().enumerate() {
        m.set_column(j, b);
    }
    Ok(m)
}

/// Build a unitary whose first column equals the given unit vector.
pub fn unitary_with_first_column(col: &CVec) -> Result<CMat> {
    let norm = col.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "first column must be unit norm, got {norm}"
        )));
    }
    complete_orthonormal_basis(std::slice::from_ref(col), col.len())
}

/// One-ancilla unitary dilation of a contraction (`||a|| <= 1`):
///
/// ```text
/// U = [ A            (I - A A^H)^(1/2) ]
///     [ (I - A^H A)^(1/2)       -A^H   ]
/// ```
///
/// The returned matrix is 2d x 2d with the ancilla as the leading qubit, so
/// its top-left block is exactly `a`.
pub fn unitary_dilation(a: &CMat) -> Result<CMat> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("dilation needs a square block".into()));
    }
    let d = a.nrows();
    let dec = svd(a)?;
    let norm = if dec.s.len() > 0 { dec.s[0] } else { 0.0 };
    if norm > 1.0 + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "block has spectral norm {norm} > 1; cannot dilate to a unitary"
        )));
    }
    // Both complement roots come from the shared singular bases; computing
    // them independently loses half the working precision whenever a
    // singular value sits at 1, since sqrt is not Lipschitz at zero.
    let mut comp = CMat::zeros(d, d);
    for k in 0..d {
        comp[(k, k)] = c64((1.0 - dec.s[k] * dec.s[k]).max(0.0).sqrt(), 0.0);
    }
    let upper = &dec.u * &comp * dec.u.adjoint();
    let lower = dec.v_adj.adjoint() * &comp * &dec.v_adj;
    let mut u = CMat::zeros(2 * d, 2 * d);
    u.view_mut((0, 0), (d, d)).copy_from(a);
    u.view_mut((0, d), (d, d)).copy_from(&upper);
    u.view_mut((d, 0), (d, d)).copy_from(&lower);
    u.view_mut((d, d), (d, d)).copy_from(&(-a.adjoint()));
    Ok(u)
}

/// Moore-Penrose pseudo-inverse with relative cutoff.
pub fn pinv(m: &CMat, rcond: f64) -> Result<CMat> {
    let d = svd(m)?;
    let s_max = if d.s.len() > 0 { d.s[0] } else { 0.0 };
    let cutoff = rcond * s_max;
    let r = d.s.len();
    let mut s_inv = CMat::zeros(r, r);
    for k in 0..r {
        if d.s[k] > cutoff {
            s_inv[(k, k)] = c64(1.0 / d.s[k], 0.0);
        }
    }
    Ok(d.v_adj.adjoint() * s_inv * d.u.adjoint())
}

/// Promote a real matrix to a complex one.
pub fn to_complex(m: &RMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| c64(m[(i, j)], 0.0))
}

/// Real part of a complex matrix, erroring if the imaginary residue exceeds `tol`.
pub fn to_real(m: &CMat, tol: f64) -> Result<RMat> {
    let worst = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::Validation(format!(
            "matrix has imaginary residue {worst} above tolerance {tol}"
        )));
    }
    Ok(RMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_unitaryish() -> CMat {
        // fixed, hand-built unitary: product of phase and rotation blocks
        let theta = 0.7f64;
        let mut m = CMat::identity(4, 4);
        m[(0, 0)] = c64(theta.cos(), 0.0);
        m[(0, 1)] = c64(-theta.sin(), 0.0);
        m[(1, 0)] = c64(theta.sin(), 0.0);
        m[(1, 1)] = c64(theta.cos(), 0.0);
        m[(2, 2)] = c64(0.0, 1.0);
        m[(3, 3)] = c64((0.3f64).cos(), (0.3f64).sin());
        m
    }

    #[test]
    fn hermitian_eigen_sorts_ascending() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![
            c64(3.0, 0.0),
            c64(-1.0, 0.0),
            c64(2.0, 0.0),
        ]));
        let (vals, vecs) = hermitian_eigen(&m);
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
        let rebuilt = &vecs
            * CMat::from_diagonal(&CVec::from_iterator(3, vals.iter().map(|&v| c64(v, 0.0))))
            * vecs.adjoint();
        assert!(frob_distance(&rebuilt, &m) < 1e-12);
    }

    #[test]
    fn svd_sorts_descending_and_recomposes() {
        let m = CMat::from_row_slice(
            2,
            3,
            &[
                c64(1.0, 0.5),
                c64(0.0, 0.0),
                c64(2.0, -1.0),
                c64(0.3, 0.0),
                c64(1.0, 1.0),
                c64(0.0, 0.2),
            ],
        );
        let d = svd(&m).unwrap();
        assert!(d.s[0] >= d.s[1]);
        let rebuilt = &d.u
            * CMat::from_fn(d.s.len(), d.s.len(), |i, j| {
                if i == j {
                    c64(d.s[i], 0.0)
                } else {
                    c64(0.0, 0.0)
                }
            })
            * &d.v_adj;
        assert!(frob_distance(&rebuilt, &m) < 1e-12);
    }

    #[test]
    fn completion_preserves_prefix_columns() {
        let col = CVec::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8), c64(0.0, 0.0)]);
        let u = unitary_with_first_column(&col).unwrap();
        assert!(is_unitary(&u, 1e-12));
        for i in 0..3 {
            assert!((u[(i, 0)] - col[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn dilation_of_half_identity_is_unitary_with_exact_block() {
        let a = CMat::identity(3, 3) * c64(0.5, 0.0);
        let u = unitary_dilation(&a).unwrap();
        assert!(is_unitary(&u, 1e-10));
        for i in 0..3 {
            for j in 0..3 {
                assert!((u[(i, j)] - a[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dilation_of_unitary_block_stays_unitary() {
        let a = random_unitaryish();
        let u = unitary_dilation(&a).unwrap();
        assert!(is_unitary(&u, 1e-9));
    }

    #[test]
    fn pinv_inverts_invertible_matrices() {
        let m = random_unitaryish() * c64(2.0, 0.0);
        let inv = pinv(&m, 1e-12).unwrap();
        let eye = &m * inv;
        assert!(frob_distance(&eye, &CMat::identity(4, 4)) < 1e-10);
    }
}
