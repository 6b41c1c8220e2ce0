//! Encoding containers with scale, ancilla, and construction bookkeeping.
//!
//! A block encoding hides a sub-normalized matrix in the top-left corner of a
//! larger unitary: with `a` ancilla qubits leading an N-qubit system register,
//! the encoded matrix is `alpha * (<0^a| (x) I) U (|0^a> (x) I)`. Every
//! constructor validates unitarity and the scale bound before handing an
//! encoding out, so downstream algebra can trust both.

use qml_core::io::{cmat_from_json, cmat_to_json};
use qml_core::linalg::{is_unitary, kron, spectral_norm};
use qml_core::{c64, CMat, CVec, Error, Result, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Tolerance for unitarity of stored dilations.
pub const UNITARITY_TOL: f64 = 1e-9;
/// Slack on the scale bound `||encoded block|| <= alpha`.
pub const SCALE_TOL: f64 = 1e-9;

/// One node of a construction trace: which operation produced an encoding,
/// what it consumed, and the bookkeeping the construction carries along.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    /// Name of the constructing operation.
    pub op: String,
    /// Traces of the inputs, in argument order.
    pub parents: Vec<Provenance>,
    /// Propagated error bound on the encoded block.
    pub epsilon: f64,
    /// Extra bookkeeping: query counts, ancilla formulas, realization notes.
    pub notes: Vec<String>,
}

impl Provenance {
    /// Trace for a freshly constructed encoding with no encoding inputs.
    pub fn leaf(op: &str) -> Self {
        Provenance {
            op: op.into(),
            parents: Vec::new(),
            epsilon: 0.0,
            notes: Vec::new(),
        }
    }

    /// Trace for an encoding derived from existing ones.
    pub fn derived(op: &str, parents: Vec<Provenance>, epsilon: f64) -> Self {
        Provenance {
            op: op.into(),
            parents,
            epsilon,
            notes: Vec::new(),
        }
    }

    /// Append a bookkeeping note.
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// An `(alpha, a)`-encoding of a `target_dim x target_dim` matrix.
///
/// The ancilla register occupies the leading (most significant) `a` qubits of
/// the stored unitary; the encoded matrix is recovered by
/// [`BlockEncoding::extract`].
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    unitary: CMat,
    alpha: f64,
    anc: usize,
    target_dim: usize,
    provenance: Provenance,
}

impl BlockEncoding {
    /// Validate and wrap a dilation unitary.
    ///
    /// Checks that `unitary` is unitary within [`UNITARITY_TOL`], that its
    /// dimension equals `target_dim * 2^anc`, and that the scale bound
    /// `||extract|| <= alpha` holds within [`SCALE_TOL`].
    pub fn new(
        unitary: CMat,
        alpha: f64,
        anc: usize,
        target_dim: usize,
        provenance: Provenance,
    ) -> Result<Self> {
        if !target_dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "target dimension {target_dim} is not a power of two"
            )));
        }
        if anc >= usize::BITS as usize || !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "unusable encoding parameters: {anc} ancillas at scale {alpha}"
            )));
        }
        let dim = target_dim << anc;
        if unitary.nrows() != dim || unitary.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "dilation is {}x{}, expected {dim}x{dim} for {anc} ancillas on a {target_dim}-dimensional target",
                unitary.nrows(),
                unitary.ncols(),
            )));
        }
        if !is_unitary(&unitary, UNITARITY_TOL) {
            return Err(Error::Validation("encoding matrix is not unitary".into()));
        }
        let enc = BlockEncoding {
            unitary,
            alpha,
            anc,
            target_dim,
            provenance,
        };
        let norm = spectral_norm(&enc.extract());
        if norm > alpha + SCALE_TOL {
            return Err(Error::Validation(format!(
                "encoded block has norm {norm}, exceeding the declared scale {alpha}"
            )));
        }
        Ok(enc)
    }

    /// The stored dilation unitary.
    pub fn unitary(&self) -> &CMat {
        &self.unitary
    }

    /// Scale factor `alpha`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Ancilla count `a`.
    pub fn anc(&self) -> usize {
        self.anc
    }

    /// Dimension `2^N` of the encoded matrix.
    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    /// System qubit count `N`.
    pub fn num_system_qubits(&self) -> usize {
        self.target_dim.trailing_zeros() as usize
    }

    /// Construction trace.
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The encoded matrix: `alpha * (<0^a| (x) I) U (|0^a> (x) I)`, i.e. the
    /// alpha-scaled top-left `target_dim` block of the dilation.
    pub fn extract(&self) -> CMat {
        self.unitary
            .view((0, 0), (self.target_dim, self.target_dim))
            .map(|z| z * self.alpha)
    }

    /// Replace the construction trace (the matrix data is untouched).
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Multiply the dilation by a global phase `exp(i theta)`.
    ///
    /// Folding phases into the encodings is how signed or complex weights
    /// enter linear combinations whose preparation amplitudes must stay
    /// non-negative.
    pub fn with_phase(&self, theta: f64) -> Self {
        let phase = C64::from_polar(1.0, theta);
        let provenance = Provenance::derived(
            "with_phase",
            vec![self.provenance.clone()],
            self.provenance.epsilon,
        )
        .with_note(format!("global phase {theta:.6}"));
        BlockEncoding {
            unitary: self.unitary.map(|z| z * phase),
            alpha: self.alpha,
            anc: self.anc,
            target_dim: self.target_dim,
            provenance,
        }
    }

    /// Restate this `(alpha, a)`-encoding as an `(alpha, a + extra)`-encoding
    /// by prepending idle ancilla qubits.
    pub fn pad_ancillas(&self, extra: usize) -> Self {
        if extra == 0 {
            return self.clone();
        }
        let eye = CMat::identity(1 << extra, 1 << extra);
        let provenance = Provenance::derived(
            "pad_ancillas",
            vec![self.provenance.clone()],
            self.provenance.epsilon,
        )
        .with_note(format!("{extra} idle ancillas prepended"));
        BlockEncoding {
            unitary: kron(&eye, &self.unitary),
            alpha: self.alpha,
            anc: self.anc + extra,
            target_dim: self.target_dim,
            provenance,
        }
    }

    /// Serialize to a JSON fixture (unitary, scale, ancillas, provenance).
    pub fn to_json(&self) -> Value {
        json!({
            "unitary": cmat_to_json(&self.unitary),
            "alpha": self.alpha,
            "anc": self.anc,
            "target_dim": self.target_dim,
            "provenance": serde_json::to_value(&self.provenance).unwrap_or(Value::Null),
        })
    }

    /// Rebuild an encoding from a [`BlockEncoding::to_json`] fixture,
    /// re-running all construction-time validation.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("encoding fixture must be a JSON object".into()))?;
        let unitary = cmat_from_json(
            obj.get("unitary")
                .ok_or_else(|| Error::Parse("encoding fixture is missing 'unitary'".into()))?,
        )?;
        let alpha = obj
            .get("alpha")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Parse("encoding fixture is missing numeric 'alpha'".into()))?;
        let anc = obj
            .get("anc")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("encoding fixture is missing integer 'anc'".into()))?
            as usize;
        let target_dim = obj
            .get("target_dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("encoding fixture is missing integer 'target_dim'".into()))?
            as usize;
        let provenance = match obj.get("provenance") {
            Some(p) => serde_json::from_value(p.clone())
                .map_err(|e| Error::Parse(format!("bad provenance record: {e}")))?,
            None => Provenance::leaf("fixture"),
        };
        BlockEncoding::new(unitary, alpha, anc, target_dim, provenance)
    }
}

/// An `(alpha, a)`-state-encoding: a unitary whose action on `|0^(a+N)>`
/// carries the target amplitudes in its `<0^a|`-postselected branch, within
/// a declared error `epsilon`.
#[derive(Debug, Clone)]
pub struct StateEncoding {
    unitary: CMat,
    alpha: f64,
    anc: usize,
    target_dim: usize,
    epsilon: f64,
}

impl StateEncoding {
    /// Validate and wrap a preparation unitary.
    pub fn new(
        unitary: CMat,
        alpha: f64,
        anc: usize,
        target_dim: usize,
        epsilon: f64,
    ) -> Result<Self> {
        if !target_dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "target dimension {target_dim} is not a power of two"
            )));
        }
        if !alpha.is_finite() || alpha <= 0.0 || !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "unusable state-encoding parameters: scale {alpha}, error {epsilon}"
            )));
        }
        let dim = target_dim << anc;
        if unitary.nrows() != dim || unitary.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "preparation unitary is {}x{}, expected {dim}x{dim}",
                unitary.nrows(),
                unitary.ncols(),
            )));
        }
        if !is_unitary(&unitary, UNITARITY_TOL) {
            return Err(Error::Validation(
                "state-preparation matrix is not unitary".into(),
            ));
        }
        Ok(StateEncoding {
            unitary,
            alpha,
            anc,
            target_dim,
            epsilon,
        })
    }

    /// The stored preparation unitary.
    pub fn unitary(&self) -> &CMat {
        &self.unitary
    }

    /// Scale factor `alpha`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Ancilla count `a`.
    pub fn anc(&self) -> usize {
        self.anc
    }

    /// Dimension `2^N` of the encoded vector.
    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    /// Declared preparation error.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The prepared amplitudes: `alpha * (<0^a| (x) I) U |0^(a+N)>`.
    ///
    /// With leading ancillas this is the alpha-scaled head of the first
    /// column of the preparation unitary.
    pub fn encoded_vector(&self) -> CVec {
        let col = self.unitary.column(0);
        CVec::from_iterator(self.target_dim, (0..self.target_dim).map(|i| col[i] * self.alpha))
    }
}

/// A polynomial `P(x) = sum_j c_j x^j` with its sup-norm bound on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct PolySpec {
    coefficients: Vec<C64>,
    degree: usize,
    declared_bound: f64,
}

fn eval_poly(coefficients: &[C64], x: f64) -> C64 {
    let mut acc = c64(0.0, 0.0);
    for &c in coefficients.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

impl PolySpec {
    /// Build a spec from coefficients `c_0..c_r`, trimming trailing zeros.
    ///
    /// The sup-norm bound on `[-1, 1]` is measured on a dense grid; use
    /// [`PolySpec::with_declared_bound`] to substitute a sharper analytic
    /// value.
    pub fn new(coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "a polynomial needs at least one coefficient".into(),
            ));
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "polynomial coefficients must be finite".into(),
            ));
        }
        let last = coefficients
            .iter()
            .rposition(|c| c.norm() > 0.0)
            .unwrap_or(0);
        let coefficients: Vec<C64> = coefficients[..=last].to_vec();
        let degree = coefficients.len() - 1;
        let grid = 4096;
        let mut bound = 0.0_f64;
        for k in 0..=grid {
            let x = -1.0 + 2.0 * (k as f64) / (grid as f64);
            bound = bound.max(eval_poly(&coefficients, x).norm());
        }
        Ok(PolySpec {
            coefficients,
            degree,
            declared_bound: bound,
        })
    }

    /// Build a spec from real coefficients.
    pub fn from_real(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&c| c64(c, 0.0)).collect())
    }

    /// Override the declared sup-norm bound.
    pub fn with_declared_bound(mut self, bound: f64) -> Self {
        self.declared_bound = bound;
        self
    }

    /// Coefficients `c_0..c_r` (trailing zeros trimmed).
    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    /// Degree `r`: the index of the last non-zero coefficient.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Declared sup-norm bound on `[-1, 1]`.
    pub fn declared_bound(&self) -> f64 {
        self.declared_bound
    }

    /// Constant term `c_0`.
    pub fn constant_term(&self) -> C64 {
        self.coefficients[0]
    }

    /// Evaluate at a real point by Horner's rule.
    pub fn eval(&self, x: f64) -> C64 {
        eval_poly(&self.coefficients, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qml_core::linalg::max_abs;

    fn hadamard2() -> CMat {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMat::from_row_slice(2, 2, &[c64(s, 0.0), c64(s, 0.0), c64(s, 0.0), c64(-s, 0.0)])
    }

    #[test]
    fn constructor_rejects_non_unitary_matrices() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.5, 0.0)],
        );
        let err = BlockEncoding::new(m, 1.0, 0, 2, Provenance::leaf("test")).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn constructor_rejects_mismatched_dimensions() {
        let err = BlockEncoding::new(CMat::identity(4, 4), 1.0, 0, 2, Provenance::leaf("test"))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn extract_scales_the_corner_block() {
        let be = BlockEncoding::new(hadamard2(), 3.0, 0, 2, Provenance::leaf("test")).unwrap();
        let ex = be.extract();
        assert!((ex[(0, 0)].re - 3.0 * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn padding_preserves_the_extract_and_counts_ancillas() {
        let be = BlockEncoding::new(hadamard2(), 1.0, 0, 2, Provenance::leaf("test")).unwrap();
        let padded = be.pad_ancillas(2);
        assert_eq!(padded.anc(), 2);
        assert_eq!(padded.unitary().nrows(), 8);
        assert!(max_abs(&(padded.extract() - be.extract())) < 1e-14);
        assert_eq!(padded.provenance().op, "pad_ancillas");
    }

    #[test]
    fn phases_rotate_the_extract() {
        let be = BlockEncoding::new(hadamard2(), 1.0, 0, 2, Provenance::leaf("test")).unwrap();
        let rotated = be.with_phase(std::f64::consts::PI);
        assert!(max_abs(&(rotated.extract() + be.extract())) < 1e-12);
    }

    #[test]
    fn json_fixture_round_trips_with_provenance() {
        let prov = Provenance::derived("outer", vec![Provenance::leaf("inner")], 0.25)
            .with_note("query count 3");
        let be = BlockEncoding::new(hadamard2(), 2.0, 0, 2, prov).unwrap();
        let back = BlockEncoding::from_json(&be.to_json()).unwrap();
        assert!(max_abs(&(back.extract() - be.extract())) < 1e-12);
        assert_eq!(back.provenance().op, "outer");
        assert_eq!(back.provenance().parents[0].op, "inner");
        assert_eq!(back.provenance().notes, vec!["query count 3".to_string()]);
        assert!((back.provenance().epsilon - 0.25).abs() < 1e-15);
    }

    #[test]
    fn corrupted_fixtures_are_rejected() {
        let be = BlockEncoding::new(hadamard2(), 1.0, 0, 2, Provenance::leaf("test")).unwrap();
        let mut fixture = be.to_json();
        fixture["alpha"] = serde_json::json!("not a number");
        assert!(matches!(
            BlockEncoding::from_json(&fixture).unwrap_err(),
            Error::Parse(_)
        ));
        let mut broken = be.to_json();
        broken["unitary"][0][0] = serde_json::json!([5.0, 0.0]);
        assert!(matches!(
            BlockEncoding::from_json(&broken).unwrap_err(),
            Error::Validation(_)
        ));
    }

    #[test]
    fn state_encoding_exposes_the_prepared_column() {
        let se = StateEncoding::new(hadamard2(), 1.0, 0, 2, 0.0).unwrap();
        let v = se.encoded_vector();
        assert!((v[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn poly_spec_trims_and_reports_degree() {
        let p = PolySpec::from_real(&[0.0, 1.0, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.coefficients().len(), 3);
        let q = PolySpec::from_real(&[0.0, 0.0]).unwrap();
        assert_eq!(q.degree(), 0);
    }

    #[test]
    fn poly_spec_measures_its_bound_and_evaluates() {
        let p = PolySpec::from_real(&[0.0, 1.0]).unwrap();
        assert!((p.declared_bound() - 1.0).abs() < 1e-12);
        let q = PolySpec::from_real(&[1.0, -2.0, 3.0]).unwrap();
        let x = 0.37;
        let direct = 1.0 - 2.0 * x + 3.0 * x * x;
        assert!((q.eval(x).re - direct).abs() < 1e-12);
        assert!((q.declared_bound() - 6.0).abs() < 1e-3);
        let capped = q.with_declared_bound(0.25);
        assert!((capped.declared_bound() - 0.25).abs() < 1e-15);
    }
}
