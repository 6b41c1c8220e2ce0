//! Grover search simulated exactly on the amplitude vector.
//!
//! The walk alternates the marking oracle, which flips the sign of every
//! solution amplitude, with the diffusion operator `2|phi_0><phi_0| - I`
//! reflecting about the uniform superposition. Both act in O(2^N) time, so
//! no `2^N x 2^N` matrix is ever formed.

use qml_core::rng::{stream, Prng};
use qml_core::{Error, Result, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

/// Widest register the dense amplitude vector supports.
pub const MAX_SEARCH_QUBITS: usize = 20;

/// An unstructured search instance over the indices `0..2^N`: a membership
/// predicate plus its solution count, recomputed at construction so the two
/// can never disagree.
pub struct SearchProblem {
    num_qubits: usize,
    predicate: Box<dyn Fn(usize) -> bool + Send + Sync>,
    solution_count: usize,
}

impl fmt::Debug for SearchProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SearchProblem")
            .field("num_qubits", &self.num_qubits)
            .field("solution_count", &self.solution_count)
            .finish()
    }
}

fn validate_register_width(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::InvalidArgument(
            "a search register needs at least one qubit".into(),
        ));
    }
    if num_qubits > MAX_SEARCH_QUBITS {
        return Err(Error::Capacity(format!(
            "{num_qubits} qubits exceed the {MAX_SEARCH_QUBITS}-qubit amplitude-vector budget"
        )));
    }
    Ok(())
}

impl SearchProblem {
    /// Wrap a membership predicate, scanning the full index range once to
    /// count its solutions.
    pub fn new(
        num_qubits: usize,
        predicate: impl Fn(usize) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        validate_register_width(num_qubits)?;
        let dimension = 1usize << num_qubits;
        let solution_count = (0..dimension).filter(|&x| predicate(x)).count();
        Ok(Self {
            num_qubits,
            predicate: Box::new(predicate),
            solution_count,
        })
    }

    /// Build the instance from an explicit solution list.
    pub fn from_solutions(num_qubits: usize, solutions: &[usize]) -> Result<Self> {
        validate_register_width(num_qubits)?;
        let dimension = 1usize << num_qubits;
        if let Some(&bad) = solutions.iter().find(|&&x| x >= dimension) {
            return Err(Error::InvalidArgument(format!(
                "solution index {bad} is outside the register range 0..{dimension}"
            )));
        }
        let set: BTreeSet<usize> = solutions.iter().copied().collect();
        Self::new(num_qubits, move |x| set.contains(&x))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// `d = 2^N`, the size of the searched index set.
    pub fn dimension(&self) -> usize {
        1usize << self.num_qubits
    }

    /// `M`, the number of indices the predicate accepts.
    pub fn solution_count(&self) -> usize {
        self.solution_count
    }

    pub fn is_solution(&self, index: usize) -> bool {
        (self.predicate)(index)
    }

    /// The rotation angle `theta = arcsin sqrt(M/d)` of one Grover step.
    pub fn rotation_angle(&self) -> f64 {
        (self.solution_count as f64 / self.dimension() as f64).sqrt().asin()
    }

    /// The iteration count `m = floor((pi/4) sqrt(d/M) - 1/2)` that places
    /// the state closest to the solution subspace.
    pub fn prescribed_iterations(&self) -> usize {
        let ratio = self.dimension() as f64 / self.solution_count as f64;
        (FRAC_PI_4 * ratio.sqrt() - 0.5).floor().max(0.0) as usize
    }
}

/// What the run did and how well it could possibly do: the iteration count,
/// the step angle, and the exact probability mass on the solution set at
/// measurement time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroverDiagnostics {
    pub iterations: usize,
    pub rotation_angle: f64,
    pub success_probability: f64,
}

/// Simulated amplitudes on the solution span (`alpha`) and its complement
/// (`beta`) after `iteration` Grover steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePair {
    pub iteration: usize,
    pub alpha: f64,
    pub beta: f64,
}

pub(crate) fn uniform_state(dimension: usize) -> Vec<C64> {
    let amp = C64::new(1.0 / (dimension as f64).sqrt(), 0.0);
    vec![amp; dimension]
}

pub(crate) fn apply_marking_oracle(amps: &mut [C64], marked: &[bool]) {
    for (amp, &hit) in amps.iter_mut().zip(marked) {
        if hit {
            *amp = -*amp;
        }
    }
}

pub(crate) fn apply_diffusion(amps: &mut [C64]) {
    let twice_mean = 2.0 * amps.iter().sum::<C64>() / amps.len() as f64;
    for amp in amps.iter_mut() {
        *amp = twice_mean - *amp;
    }
}

pub(crate) fn sample_index(amps: &[C64], rng: &mut Prng) -> usize {
    let draw: f64 = rng.gen();
    let mut cumulative = 0.0;
    for (index, amp) in amps.iter().enumerate() {
        cumulative += amp.norm_sqr();
        if draw < cumulative {
            return index;
        }
    }
    amps.len() - 1
}

fn require_solutions(problem: &SearchProblem) -> Result<()> {
    if problem.solution_count == 0 {
        return Err(Error::Degenerate(
            "the search problem has no solutions to amplify".into(),
        ));
    }
    Ok(())
}

fn solution_mask(problem: &SearchProblem) -> Vec<bool> {
    (0..problem.dimension()).map(|x| problem.is_solution(x)).collect()
}

/// Run the search at the prescribed iteration count and measure once.
/// Returns the sampled index together with the run diagnostics.
pub fn grover_search(problem: &SearchProblem, seed: u64) -> Result<(usize, GroverDiagnostics)> {
    require_solutions(problem)?;
    let marked = solution_mask(problem);
    let iterations = problem.prescribed_iterations();
    let mut amps = uniform_state(problem.dimension());
    for _ in 0..iterations {
        apply_marking_oracle(&mut amps, &marked);
        apply_diffusion(&mut amps);
    }
    let success_probability: f64 = amps
        .iter()
        .zip(&marked)
        .filter(|(_, &hit)| hit)
        .map(|(amp, _)| amp.norm_sqr())
        .sum();
    let mut rng = stream(seed, "grover-measure");
    let index = sample_index(&amps, &mut rng);
    Ok((
        index,
        GroverDiagnostics {
            iterations,
            rotation_angle: problem.rotation_angle(),
            success_probability,
        },
    ))
}

/// Track the simulated solution-span amplitudes through `m_max` Grover
/// steps. Step `k` of the returned sequence satisfies
/// `alpha_k = sin((2k+1) theta)` and `beta_k = cos((2k+1) theta)`.
pub fn grover_amplitude_trace(problem: &SearchProblem, m_max: usize) -> Result<Vec<AmplitudePair>> {
    require_solutions(problem)?;
    let marked = solution_mask(problem);
    let dimension = problem.dimension();
    let solutions = problem.solution_count() as f64;
    let others = (dimension - problem.solution_count()) as f64;
    let mut amps = uniform_state(dimension);
    let mut trace = Vec::with_capacity(m_max + 1);
    for iteration in 0..=m_max {
        if iteration > 0 {
            apply_marking_oracle(&mut amps, &marked);
            apply_diffusion(&mut amps);
        }
        let alpha: f64 = amps
            .iter()
            .zip(&marked)
            .filter(|(_, &hit)| hit)
            .map(|(amp, _)| amp.re)
            .sum::<f64>()
            / solutions.sqrt();
        let beta: f64 = if others > 0.0 {
            amps.iter()
                .zip(&marked)
                .filter(|(_, &hit)| !hit)
                .map(|(amp, _)| amp.re)
                .sum::<f64>()
                / others.sqrt()
        } else {
            0.0
        };
        trace.push(AmplitudePair { iteration, alpha, beta });
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn four_element_search_peaks_in_one_iteration() {
        let problem = SearchProblem::from_solutions(2, &[3]).unwrap();
        let (index, diagnostics) = grover_search(&problem, 5).unwrap();
        assert_eq!(diagnostics.iterations, 1);
        assert_abs_diff_eq!(diagnostics.rotation_angle, FRAC_PI_6, epsilon = 1e-14);
        assert_abs_diff_eq!(diagnostics.success_probability, 1.0, epsilon = 1e-12);
        assert_eq!(index, 3);
    }

    #[test]
    fn two_element_search_stays_at_coin_flip_odds() {
        let problem = SearchProblem::from_solutions(1, &[0]).unwrap();
        let (_, diagnostics) = grover_search(&problem, 5).unwrap();
        assert_eq!(diagnostics.iterations, 0);
        assert_abs_diff_eq!(diagnostics.rotation_angle, FRAC_PI_4, epsilon = 1e-14);
        assert_abs_diff_eq!(diagnostics.success_probability, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn thousand_element_search_succeeds_with_high_probability() {
        let problem = SearchProblem::new(10, |x| x == 731).unwrap();
        let (index, diagnostics) = grover_search(&problem, 5).unwrap();
        assert!(diagnostics.success_probability >= 0.99);
        assert_eq!(index, 731);
    }

    #[test]
    fn oracle_applied_twice_is_the_identity() {
        let problem = SearchProblem::new(5, |x| x % 7 == 0).unwrap();
        let marked = solution_mask(&problem);
        let mut rng = stream(3, "oracle-involution");
        let original: Vec<C64> = (0..32)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut twice = original.clone();
        apply_marking_oracle(&mut twice, &marked);
        apply_marking_oracle(&mut twice, &marked);
        assert_eq!(original, twice);
    }

    #[test]
    fn amplitude_trace_matches_the_closed_form() {
        let problem = SearchProblem::from_solutions(4, &[9]).unwrap();
        let theta = problem.rotation_angle();
        let trace = grover_amplitude_trace(&problem, 10).unwrap();
        assert_abs_diff_eq!(trace[0].alpha, (1.0f64 / 16.0).sqrt(), epsilon = 1e-12);
        for pair in &trace {
            let phase = (2 * pair.iteration + 1) as f64 * theta;
            assert_abs_diff_eq!(pair.alpha, phase.sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(pair.beta, phase.cos(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(trace[2].alpha, (5.0 * theta).sin(), epsilon = 1e-12);
    }

    #[test]
    fn amplitude_overshoots_past_the_optimal_iteration() {
        let problem = SearchProblem::from_solutions(4, &[9]).unwrap();
        let optimum = problem.prescribed_iterations();
        let trace = grover_amplitude_trace(&problem, optimum + 3).unwrap();
        assert!(trace[optimum].alpha.powi(2) >= 0.8);
        assert!(
            trace[optimum + 3].alpha < trace[optimum].alpha,
            "iterating past the optimum should rotate away from the solutions"
        );
    }

    #[test]
    fn saturated_problems_need_no_iterations() {
        let problem = SearchProblem::new(3, |_| true).unwrap();
        let (_, diagnostics) = grover_search(&problem, 5).unwrap();
        assert_eq!(diagnostics.iterations, 0);
        assert_abs_diff_eq!(diagnostics.success_probability, 1.0, epsilon = 1e-12);
        let trace = grover_amplitude_trace(&problem, 2).unwrap();
        assert!(trace.iter().all(|pair| pair.beta == 0.0));
    }

    #[test]
    fn problems_without_solutions_are_rejected() {
        let problem = SearchProblem::new(3, |_| false).unwrap();
        assert!(matches!(grover_search(&problem, 5), Err(Error::Degenerate(_))));
        assert!(matches!(grover_amplitude_trace(&problem, 4), Err(Error::Degenerate(_))));
    }

    #[test]
    fn register_bounds_are_enforced() {
        assert!(matches!(SearchProblem::new(0, |_| true), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            SearchProblem::new(MAX_SEARCH_QUBITS + 1, |_| true),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            SearchProblem::from_solutions(2, &[4]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn predicate_and_listed_solutions_agree() {
        let by_predicate = SearchProblem::new(4, |x| x % 4 == 0).unwrap();
        let by_list = SearchProblem::from_solutions(4, &[0, 4, 8, 12]).unwrap();
        assert_eq!(by_predicate.solution_count(), by_list.solution_count());
        assert_eq!(by_predicate.prescribed_iterations(), by_list.prescribed_iterations());
        for x in 0..16 {
            assert_eq!(by_predicate.is_solution(x), by_list.is_solution(x));
        }
    }
}
