//! Grover search simulated exactly on dense amplitude vectors, and the
//! online perceptron that uses it to find misclassified samples in
//! `O(sqrt(d))` oracle queries per update, next to the `O(d)` uniform
//! sampling baseline it is measured against. Query ledgers account every
//! oracle application so the scaling claims can be checked empirically.

pub mod qperceptron;
pub mod search;

pub use qperceptron::{
    classical_perceptron_sampling_baseline, fitted_exponent, perceptron_query_scaling,
    quantum_perceptron_train, PerceptronSearchOutcome, PhaseTally, QueryLedger, ScalingRow,
};
pub use search::{
    grover_amplitude_trace, grover_search, AmplitudePair, GroverDiagnostics, SearchProblem,
    MAX_SEARCH_QUBITS,
};
