//! Fourier representation of angle-encoding kernels.
//!
//! Per-qubit rotation generators have eigenvalues ±1/2, so the induced
//! kernel is a trigonometric polynomial on the integer frequency lattice
//! `{-1, 0, 1}^d` in each of `x` and `x'`:
//! `k(x, x') = sum_{s,t} c_st e^{i s.x} e^{i t.x'}`. The coefficients are
//! fitted by least squares on a uniform probe grid and checked against the
//! kernel itself.

use crate::maps::{quantum_kernel, FeatureMapSpec, MapKind};
use qml_core::linalg::svd;
use qml_core::{c64, C64, CMat, CVec, Error, Result};

const RESIDUAL_TOL: f64 = 1e-8;
const CONDITION_LIMIT: f64 = 1e8;

/// Fitted Fourier coefficients of an angle-encoding kernel, indexed by
/// frequency pairs `(s, t)` on the lattice `{-1, 0, 1}^d x {-1, 0, 1}^d`.
#[derive(Debug, Clone)]
pub struct FourierTable {
    dims: usize,
    coefficients: Vec<C64>,
    residual: f64,
    condition_number: f64,
}

/// All frequency vectors in `{-1, 0, 1}^d`, lexicographic in (-1, 0, 1).
fn frequency_lattice(dims: usize) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                [-1, 0, 1].iter().map(move |&f| {
                    let mut next = prefix.clone();
                    next.push(f);
                    next
                })
            })
            .collect();
    }
    out
}

fn lattice_index(freq: &[i32]) -> Result<usize> {
    let mut index = 0;
    for &f in freq {
        if !(-1..=1).contains(&f) {
            return Err(Error::InvalidArgument(format!(
                "frequency component {f} is outside the lattice {{-1, 0, 1}}"
            )));
        }
        index = index * 3 + (f + 1) as usize;
    }
    Ok(index)
}

impl FourierTable {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Coefficient at the frequency pair `(s, t)`.
    pub fn coefficient(&self, s: &[i32], t: &[i32]) -> Result<C64> {
        if s.len() != self.dims || t.len() != self.dims {
            return Err(Error::InvalidArgument(format!(
                "frequency vectors must have {} components",
                self.dims
            )));
        }
        let index = lattice_index(s)? * 3usize.pow(self.dims as u32) + lattice_index(t)?;
        Ok(self.coefficients[index])
    }

    /// Iterate `(s, t, c_st)` over the whole lattice.
    pub fn entries(&self) -> Vec<(Vec<i32>, Vec<i32>, C64)> {
        let lattice = frequency_lattice(self.dims);
        let mut out = Vec::with_capacity(self.coefficients.len());
        for (i, s) in lattice.iter().enumerate() {
            for (j, t) in lattice.iter().enumerate() {
                out.push((s.clone(), t.clone(), self.coefficients[i * lattice.len() + j]));
            }
        }
        out
    }

    /// Evaluate the fitted series at one point pair.
    pub fn evaluate(&self, x: &[f64], x_prime: &[f64]) -> Result<f64> {
        if x.len() != self.dims || x_prime.len() != self.dims {
            return Err(Error::InvalidArgument(format!(
                "points must have {} components",
                self.dims
            )));
        }
        let mut total = c64(0.0, 0.0);
        for (s, t, coefficient) in self.entries() {
            let phase: f64 = s
                .iter()
                .zip(x)
                .map(|(&f, &v)| f as f64 * v)
                .chain(t.iter().zip(x_prime).map(|(&f, &v)| f as f64 * v))
                .sum();
            total += coefficient * C64::new(0.0, phase).exp();
        }
        Ok(total.re)
    }
}

/// Fit the Fourier coefficients of an angle-encoding kernel on a uniform
/// probe grid with `grid_points` samples per dimension.
pub fn kernel_fourier_decompose(map: &FeatureMapSpec, grid_points: usize) -> Result<FourierTable> {
    match map.kind {
        MapKind::AngleX | MapKind::AngleY | MapKind::SingleQubitRx => {}
        _ => {
            return Err(Error::InvalidArgument(
                "Fourier decomposition applies to angle encodings only".into(),
            ))
        }
    }
    let dims = map.qubits;
    if dims > 3 {
        return Err(Error::InvalidArgument(format!(
            "Fourier decomposition is limited to 3 dimensions, got {dims}"
        )));
    }
    if grid_points < 3 {
        return Err(Error::InvalidArgument(
            "the probe grid needs at least 3 points per dimension".into(),
        ));
    }

    let step = std::f64::consts::TAU / grid_points as f64;
    let mut grid = vec![Vec::new()];
    for _ in 0..dims {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                (0..grid_points).map(move |k| {
                    let mut next = prefix.clone();
                    next.push(k as f64 * step);
                    next
                })
            })
            .collect();
    }

    let lattice = frequency_lattice(dims);
    let cols = lattice.len() * lattice.len();
    let rows = grid.len() * grid.len();
    let mut design = CMat::zeros(rows, cols);
    let mut rhs = CVec::zeros(rows);
    for (a, x) in grid.iter().enumerate() {
        for (b, x_prime) in grid.iter().enumerate() {
            let row = a * grid.len() + b;
            rhs[row] = c64(quantum_kernel(map, x, x_prime)?, 0.0);
            for (i, s) in lattice.iter().enumerate() {
                for (j, t) in lattice.iter().enumerate() {
                    let phase: f64 = s
                        .iter()
                        .zip(x)
                        .map(|(&f, &v)| f as f64 * v)
                        .chain(t.iter().zip(x_prime).map(|(&f, &v)| f as f64 * v))
                        .sum();
                    design[(row, i * lattice.len() + j)] = C64::new(0.0, phase).exp();
                }
            }
        }
    }

    let dec = svd(&design)?;
    let top = dec.s[0];
    let bottom = dec.s[dec.s.len() - 1];
    let condition_number = if bottom > 0.0 { top / bottom } else { f64::INFINITY };
    if condition_number > CONDITION_LIMIT {
        return Err(Error::Numeric(format!(
            "Fourier design matrix is ill-conditioned (condition number {condition_number:.3e})"
        )));
    }
    let projected = dec.u.adjoint() * &rhs;
    let mut scaled = CVec::zeros(cols);
    for i in 0..cols {
        scaled[i] = projected[i] / c64(dec.s[i], 0.0);
    }
    let coefficients_vec = dec.v_adj.adjoint() * scaled;

    let residual = (&design * &coefficients_vec - &rhs)
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOL {
        return Err(Error::Numeric(format!(
            "Fourier fit left residual {residual:.3e}; the kernel is not band-limited to the lattice"
        )));
    }

    Ok(FourierTable {
        dims,
        coefficients: coefficients_vec.iter().copied().collect(),
        residual,
        condition_number,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_rx_reproduces_the_half_angle_cosine_table() {
        let map = FeatureMapSpec::single_qubit_rx();
        let table = kernel_fourier_decompose(&map, 6).unwrap();
        assert!((table.coefficient(&[0], &[0]).unwrap().re - 0.5).abs() < 1e-10);
        assert!((table.coefficient(&[1], &[-1]).unwrap().re - 0.25).abs() < 1e-10);
        assert!((table.coefficient(&[-1], &[1]).unwrap().re - 0.25).abs() < 1e-10);
        for (s, t, c) in table.entries() {
            let expected = matches!(
                (s[0], t[0]),
                (0, 0) | (1, -1) | (-1, 1)
            );
            if !expected {
                assert!(c.norm() < 1e-9, "leaked coefficient at ({s:?}, {t:?}): {c}");
            }
        }
        assert!(table.residual() < 1e-8);
        assert!(table.condition_number() < 10.0);
    }

    #[test]
    fn coefficients_come_in_conjugate_pairs() {
        let map = FeatureMapSpec::angle_x(2).unwrap();
        let table = kernel_fourier_decompose(&map, 4).unwrap();
        for (s, t, c) in table.entries() {
            let neg_s: Vec<i32> = s.iter().map(|f| -f).collect();
            let neg_t: Vec<i32> = t.iter().map(|f| -f).collect();
            let mirror = table.coefficient(&neg_s, &neg_t).unwrap();
            assert!((c - mirror.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn the_fit_evaluates_back_to_the_kernel() {
        let map = FeatureMapSpec::single_qubit_rx();
        let table = kernel_fourier_decompose(&map, 5).unwrap();
        for (x, y) in [(0.31, 2.7), (1.9, 1.9), (4.4, 0.05)] {
            let direct = quantum_kernel(&map, &[x], &[y]).unwrap();
            let series = table.evaluate(&[x], &[y]).unwrap();
            assert!((direct - series).abs() < 1e-9);
        }
    }

    #[test]
    fn non_angle_maps_are_rejected() {
        let map = FeatureMapSpec::amplitude(4).unwrap();
        assert!(matches!(
            kernel_fourier_decompose(&map, 4).unwrap_err(),
            Error::InvalidArgument(_)
        ));
    }

    #[test]
    fn more_than_three_dimensions_are_rejected() {
        let map = FeatureMapSpec::angle_x(4).unwrap();
        assert!(kernel_fourier_decompose(&map, 3).is_err());
    }
}
