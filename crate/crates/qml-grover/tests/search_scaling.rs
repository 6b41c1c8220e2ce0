//! End-to-end checks of the search stack: simulated amplitudes against the
//! closed-form rotation at every register width, success probability at the
//! prescribed iteration count, and the query-scaling separation between the
//! Grover-driven perceptron and its uniform-sampling baseline.

use qml_grover::{
    fitted_exponent, grover_amplitude_trace, grover_search, perceptron_query_scaling,
    SearchProblem,
};

#[test]
fn amplitudes_track_the_closed_form_at_every_width() {
    for num_qubits in 1..=12 {
        let dimension = 1usize << num_qubits;
        let mut counts = vec![1];
        if dimension >= 8 {
            counts.push(dimension / 4);
        }
        for solution_count in counts {
            let problem =
                SearchProblem::new(num_qubits, move |x| x < solution_count).unwrap();
            let theta = problem.rotation_angle();
            let horizon = problem.prescribed_iterations() + 3;
            let trace = grover_amplitude_trace(&problem, horizon).unwrap();
            assert_eq!(trace.len(), horizon + 1);
            for pair in &trace {
                let phase = (2 * pair.iteration + 1) as f64 * theta;
                assert!(
                    (pair.alpha - phase.sin()).abs() < 1e-9,
                    "alpha diverged at N={num_qubits}, M={solution_count}, k={}",
                    pair.iteration
                );
                assert!(
                    (pair.beta - phase.cos()).abs() < 1e-9,
                    "beta diverged at N={num_qubits}, M={solution_count}, k={}",
                    pair.iteration
                );
            }
        }
    }
}

#[test]
fn prescribed_iterations_find_singletons_reliably() {
    for num_qubits in 4..=12 {
        let dimension = 1usize << num_qubits;
        let target = dimension / 3;
        let problem = SearchProblem::new(num_qubits, move |x| x == target).unwrap();
        let (_, diagnostics) = grover_search(&problem, 41).unwrap();
        assert!(
            diagnostics.success_probability >= 0.8,
            "N={num_qubits}: success probability {} fell below 0.8",
            diagnostics.success_probability
        );
    }
}

#[test]
fn query_counts_scale_like_root_d_against_linear_d() {
    let sizes = [64usize, 256, 1024, 4096];
    let rows = perceptron_query_scaling(&sizes, 8, 0.3, 0.1, 1.5, 20, 97).unwrap();
    assert_eq!(rows.len(), sizes.len());
    for row in &rows {
        assert!(
            row.quantum_successes >= 18,
            "d={}: only {} of {} quantum runs separated the data",
            row.dataset_size,
            row.quantum_successes,
            row.runs
        );
        assert!(
            row.classical_successes >= 18,
            "d={}: only {} of {} baseline runs separated the data",
            row.dataset_size,
            row.classical_successes,
            row.runs
        );
    }

    let quantum: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.dataset_size as f64, r.median_grover_queries))
        .collect();
    let classical: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.dataset_size as f64, r.median_classical_queries))
        .collect();
    let quantum_exponent = fitted_exponent(&quantum).unwrap();
    let classical_exponent = fitted_exponent(&classical).unwrap();
    assert!(
        (0.35..=0.65).contains(&quantum_exponent),
        "quantum query exponent {quantum_exponent} escaped [0.35, 0.65]"
    );
    assert!(
        (0.85..=1.15).contains(&classical_exponent),
        "classical query exponent {classical_exponent} escaped [0.85, 1.15]"
    );
}
