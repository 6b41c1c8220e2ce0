//! CPTP channels in Kraus form, plus their unitary (Stinespring) dilations.

use crate::error::{Error, Result};
use crate::linalg::{complete_orthonormal_basis, max_abs};
use crate::pauli::{pauli_matrix, pauli_strings};
use crate::state::{partial_trace, DensityMatrix, StateVector};
use crate::{c64, check_qubit_count, CMat, CVec};

const TP_TOL: f64 = 1e-9;

/// A completely positive trace-preserving map `rho -> sum_a M_a rho M_a^H`.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus_ops: Vec<CMat>,
    num_qubits: usize,
}

impl QuantumChannel {
    /// Build from Kraus operators, validating trace preservation
    /// `sum_a M_a^H M_a = I` within 1e-9.
    pub fn from_kraus(kraus_ops: Vec<CMat>) -> Result<Self> {
        if kraus_ops.is_empty() {
            return Err(Error::InvalidArgument("channel needs at least one Kraus operator".into()));
        }
        let d = kraus_ops[0].nrows();
        if !d.is_power_of_two() {
            return Err(Error::InvalidArgument(
                "Kraus operators must have power-of-two dimension".into(),
            ));
        }
        let n = d.trailing_zeros() as usize;
        check_qubit_count(n)?;
        for m in &kraus_ops {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::InvalidArgument("Kraus operators must share one square dimension".into()));
            }
        }
        let mut sum = CMat::zeros(d, d);
        for m in &kraus_ops {
            sum += m.adjoint() * m;
        }
        let dev = max_abs(&(sum - CMat::identity(d, d)));
        if dev > TP_TOL {
            return Err(Error::Validation(format!(
                "Kraus set is not trace preserving: max |sum M^H M - I| = {dev}"
            )));
        }
        Ok(Self {
            kraus_ops,
            num_qubits: n,
        })
    }

    pub fn kraus_ops(&self) -> &[CMat] {
        &self.kraus_ops
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }
}

/// Depolarizing channel on `n` qubits: `rho -> (1-p) rho + p I / 2^n`.
///
/// Realized by the uniform Pauli Kraus set; `p` outside `[0, 1]` is rejected.
pub fn depolarizing(n: usize, p: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "depolarizing probability {p} outside [0, 1]"
        )));
    }
    check_qubit_count(n)?;
    if n > 5 {
        return Err(Error::Capacity(format!(
            "depolarizing Kraus set grows as 4^n; {n} qubits is beyond the supported 5"
        )));
    }
    let strings = pauli_strings(n);
    let m = 4f64.powi(n as i32);
    let mut kraus = Vec::with_capacity(strings.len());
    for s in strings {
        let weight = if s.chars().all(|ch| ch == 'I') {
            1.0 - p + p / m
        } else {
            p / m
        };
        if weight == 0.0 {
            continue;
        }
        let mut op = crate::pauli::pauli_string_matrix(&s)?;
        op *= c64(weight.sqrt(), 0.0);
        kraus.push(op);
    }
    QuantumChannel::from_kraus(kraus)
}

/// Single-qubit Pauli channel
/// `rho -> p_I rho + p_x X rho X + p_y Y rho Y + p_z Z rho Z`.
pub fn pauli_channel(px: f64, py: f64, pz: f64) -> Result<QuantumChannel> {
    for (name, p) in [("p_x", px), ("p_y", py), ("p_z", pz)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("{name} = {p} outside [0, 1]")));
        }
    }
    let pi = 1.0 - px - py - pz;
    if pi < -1e-12 {
        return Err(Error::InvalidArgument(format!(
            "Pauli probabilities sum to {} > 1",
            px + py + pz
        )));
    }
    let mut kraus = Vec::new();
    for (label, p) in [('I', pi.max(0.0)), ('X', px), ('Y', py), ('Z', pz)] {
        if p > 0.0 {
            kraus.push(pauli_matrix(label)? * c64(p.sqrt(), 0.0));
        }
    }
    QuantumChannel::from_kraus(kraus)
}

/// Apply a channel: `rho -> sum_a M_a rho M_a^H`.
pub fn apply_channel(rho: &DensityMatrix, channel: &QuantumChannel) -> Result<DensityMatrix> {
    if rho.num_qubits() != channel.num_qubits() {
        return Err(Error::InvalidArgument(format!(
            "channel on {} qubits applied to {}-qubit state",
            channel.num_qubits(),
            rho.num_qubits()
        )));
    }
    let d = rho.dim();
    let mut out = CMat::zeros(d, d);
    for m in channel.kraus_ops() {
        out += m * rho.matrix() * m.adjoint();
    }
    DensityMatrix::from_matrix(out)
}

/// Unitary dilation of a channel: a unitary `U` on system (x) environment and
/// the environment state `|0...0>` such that
/// `N(rho) = Tr_E( U (rho (x) |0><0|) U^H )`.
///
/// The environment is padded to `ceil(log2(#Kraus))` qubits (at least one).
pub fn stinespring_dilation(channel: &QuantumChannel) -> Result<(CMat, StateVector)> {
    let d = 1usize << channel.num_qubits();
    let k = channel.kraus_ops().len();
    let env_qubits = (k.max(2) as f64).log2().ceil() as usize;
    let e = 1usize << env_qubits;
    check_qubit_count(channel.num_qubits() + env_qubits)?;
    // isometry columns: V |j> = sum_a (M_a |j>) (x) |a>
    let mut cols: Vec<CVec> = Vec::with_capacity(d);
    for j in 0..d {
        let mut col = CVec::zeros(d * e);
        for (a, m) in channel.kraus_ops().iter().enumerate() {
            for i in 0..d {
                col[i * e + a] += m[(i, j)];
            }
        }
        cols.push(col);
    }
    let completion = complete_orthonormal_basis(&cols, d * e)?;
    // place V's column j at full column index j * e (system (x) |0>_E),
    // fill the rest with the completion vectors
    let mut u = CMat::zeros(d * e, d * e);
    let mut spare = d;
    for full_col in 0..(d * e) {
        if full_col % e == 0 {
            u.set_column(full_col, &completion.column(full_col / e));
        } else {
            u.set_column(full_col, &completion.column(spare));
            spare += 1;
        }
    }
    let env_state = StateVector::zero(env_qubits)?;
    Ok((u, env_state))
}

/// Evolve `rho (x) |env><env|` by the dilation unitary and trace out the
/// environment (the trailing qubits).
pub fn stinespring_apply(
    rho: &DensityMatrix,
    dilation: &CMat,
    env_state: &StateVector,
) -> Result<DensityMatrix> {
    let combined_dim = rho.dim() * env_state.dim();
    if dilation.nrows() != combined_dim || dilation.ncols() != combined_dim {
        return Err(Error::InvalidArgument(format!(
            "dilation dimension {} does not match system x environment = {}",
            dilation.nrows(),
            combined_dim
        )));
    }
    let joint = rho.tensor(&env_state.to_density())?;
    let evolved = dilation * joint.matrix() * dilation.adjoint();
    let joint_evolved = DensityMatrix::from_parts(evolved, joint.num_qubits());
    let keep: Vec<usize> = (0..rho.num_qubits()).collect();
    partial_trace(&joint_evolved, &keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::linalg::frob_distance;

    #[test]
    fn depolarized_ground_state_is_the_textbook_diagonal() {
        for p in [0.0, 0.25, 0.5, 1.0] {
            let rho = StateVector::zero(1).unwrap().to_density();
            let out = apply_channel(&rho, &depolarizing(1, p).unwrap()).unwrap();
            assert!((out.matrix()[(0, 0)].re - (1.0 - p / 2.0)).abs() < 1e-12);
            assert!((out.matrix()[(1, 1)].re - p / 2.0).abs() < 1e-12);
            assert!(out.matrix()[(0, 1)].norm() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_purity_follows_quadratic_law() {
        for p in [0.0, 0.3, 1.0] {
            let rho = StateVector::zero(1).unwrap().to_density();
            let out = apply_channel(&rho, &depolarizing(1, p).unwrap()).unwrap();
            assert!((out.purity() - (1.0 - p + p * p / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_outside_unit_interval_is_rejected() {
        assert!(depolarizing(1, -0.1).is_err());
        assert!(depolarizing(1, 1.1).is_err());
    }

    #[test]
    fn identity_pauli_channel_is_the_identity_map() {
        let rho = StateVector::from_amplitudes(vec![c64(0.6, 0.0), c64(0.0, 0.8)])
            .unwrap()
            .to_density();
        let out = apply_channel(&rho, &pauli_channel(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(frob_distance(out.matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn non_cptp_kraus_set_is_rejected() {
        let half = CMat::identity(2, 2) * c64(0.5, 0.0);
        assert!(QuantumChannel::from_kraus(vec![half]).is_err());
    }

    #[test]
    fn unitary_dilation_with_untouched_environment() {
        let rho = StateVector::from_amplitudes(vec![c64(0.6, 0.0), c64(0.8, 0.0)])
            .unwrap()
            .to_density();
        let u_sys = gates::h().matrix().clone();
        let dilation = u_sys.kronecker(&CMat::identity(2, 2));
        let env = StateVector::zero(1).unwrap();
        let out = stinespring_apply(&rho, &dilation, &env).unwrap();
        let expect = &u_sys * rho.matrix() * u_sys.adjoint();
        assert!(frob_distance(out.matrix(), &expect) < 1e-12);
    }

    #[test]
    fn cnot_dilation_dephases_the_plus_state() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_amplitudes(vec![c64(r, 0.0), c64(r, 0.0)]).unwrap();
        let out = stinespring_apply(
            &plus.to_density(),
            gates::cnot().matrix(),
            &StateVector::zero(1).unwrap(),
        )
        .unwrap();
        assert!((out.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((out.matrix()[(1, 1)].re - 0.5).abs() < 1e-12);
        assert!(out.matrix()[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn dilation_reproduces_kraus_action() {
        let channel = pauli_channel(0.1, 0.25, 0.05).unwrap();
        let (u, env) = stinespring_dilation(&channel).unwrap();
        let rho = StateVector::from_amplitudes(vec![c64(0.48, 0.36), c64(0.0, -0.8)])
            .unwrap()
            .to_density();
        let via_kraus = apply_channel(&rho, &channel).unwrap();
        let via_dilation = stinespring_apply(&rho, &u, &env).unwrap();
        assert!(frob_distance(via_kraus.matrix(), via_dilation.matrix()) < 1e-10);
    }
}
