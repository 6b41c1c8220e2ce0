//! The Grover-accelerated online perceptron and its uniform-sampling
//! classical baseline, with exact oracle-call accounting.
//!
//! The misclassification oracle conceptually acts on an index register plus
//! a data register holding the encoded sample; since the encoding is a
//! fixed basis labeling, the oracle's effect on the index register is the
//! diagonal phase `(-1)^{f(w, z_i)}`, which is what the walk applies. The
//! data register is therefore bookkept, never materialized, and each
//! abstract oracle application still counts one ledger query.

use crate::search::{apply_diffusion, apply_marking_oracle, sample_index, uniform_state};
use qml_core::rng::stream;
use qml_core::{Error, Result};
use qml_learn::{synth_margin_dataset, LabeledSet};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Oracle-call totals for one training run, split by kind: Grover-walk
/// applications of the phase oracle versus direct classical evaluations of
/// the misclassification predicate (one per post-measurement check for the
/// quantum learner, one per drawn sample for the baseline). Counters only
/// ever accumulate, and the totals equal the per-round sums by
/// construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub grover_oracle_queries: usize,
    pub classical_oracle_queries: usize,
    pub updates: usize,
    pub phases: Vec<PhaseTally>,
}

/// Per-round breakdown of the ledger counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTally {
    pub round: usize,
    pub grover_oracle_queries: usize,
    pub classical_oracle_queries: usize,
    pub updates: usize,
}

impl QueryLedger {
    fn add_phase(&mut self, tally: PhaseTally) {
        self.grover_oracle_queries += tally.grover_oracle_queries;
        self.classical_oracle_queries += tally.classical_oracle_queries;
        self.updates += tally.updates;
        self.phases.push(tally);
    }
}

/// Trained weights, the query ledger, and whether the final weights
/// classify every training point correctly (verified by a direct sweep
/// that is not charged to the ledger).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronSearchOutcome {
    pub weights: Vec<f64>,
    pub ledger: QueryLedger,
    pub converged: bool,
}

/// The proof's misclassification condition: a zero margin counts as wrong.
fn misclassified(weights: &[f64], point: &[f64], label: f64) -> bool {
    let margin: f64 = weights.iter().zip(point).map(|(w, x)| w * x).sum();
    label * margin <= 0.0
}

fn validate_common(data: &LabeledSet, gamma: f64, epsilon: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "margin must lie in (0, 1), got {gamma}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "failure budget must lie in (0, 1), got {epsilon}"
        )));
    }
    for (row, point) in data.points().iter().enumerate() {
        let norm = point.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "the mistake-bound analysis needs unit-norm inputs; row {row} has norm {norm}"
            )));
        }
    }
    Ok(())
}

/// `ceil(1/gamma^2)`, the mistake budget that caps the outer training loop.
fn update_budget(gamma: f64) -> usize {
    (1.0 / (gamma * gamma)).ceil() as usize
}

/// Train by replacing the classical scan for a misclassified sample with
/// Grover search over sample indices. Each round runs the full
/// amplification schedule: `ceil(log_{3/4}(gamma^2 epsilon))` repetitions
/// of the exponential-expansion sweep `j = 1..=ceil(log_c(1/sin(2
/// arcsin(1/sqrt(d)))))`, drawing the walk length `m` uniformly from
/// `{0..ceil(c^j)-1}`, measuring, and updating on a verified hit. The
/// ledger charges `m` oracle queries per walk and one classical evaluation
/// per measurement check.
pub fn quantum_perceptron_train(
    data: &LabeledSet,
    gamma: f64,
    epsilon: f64,
    c: f64,
    seed: u64,
) -> Result<PerceptronSearchOutcome> {
    validate_common(data, gamma, epsilon)?;
    if !(c > 1.0 && c < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "expansion base must lie in (1, 2), got {c}"
        )));
    }
    let d = data.len();
    if d < 4 || !d.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "the index register needs a power-of-two dataset of at least 4 samples, got {d}"
        )));
    }
    let points = data.points();
    let labels = data.labels();
    let rounds = update_budget(gamma);
    let amplifications = ((gamma * gamma * epsilon).ln() / 0.75f64.ln()).ceil() as usize;
    let theta_floor = 2.0 * (1.0 / (d as f64).sqrt()).asin();
    let expansions = ((1.0 / theta_floor.sin()).ln() / c.ln()).ceil() as usize;

    let mut weights = vec![0.0; data.dim()];
    let mut ledger = QueryLedger::default();
    let mut walk_lengths = stream(seed, "qperceptron-m");
    let mut measurements = stream(seed, "qperceptron-measure");

    for round in 1..=rounds {
        let mut tally = PhaseTally { round, ..PhaseTally::default() };
        for _ in 1..=amplifications {
            for j in 1..=expansions {
                let cap = c.powi(j as i32).ceil() as usize;
                let m = walk_lengths.gen_range(0..cap);
                let marked: Vec<bool> = (0..d)
                    .map(|i| misclassified(&weights, &points[i], labels[i]))
                    .collect();
                let mut amps = uniform_state(d);
                for _ in 0..m {
                    apply_marking_oracle(&mut amps, &marked);
                    apply_diffusion(&mut amps);
                }
                tally.grover_oracle_queries += m;
                let q = sample_index(&amps, &mut measurements);
                tally.classical_oracle_queries += 1;
                if misclassified(&weights, &points[q], labels[q]) {
                    for (w, x) in weights.iter_mut().zip(&points[q]) {
                        *w += labels[q] * x;
                    }
                    tally.updates += 1;
                }
            }
        }
        ledger.add_phase(tally);
    }

    let converged = (0..d).all(|i| !misclassified(&weights, &points[i], labels[i]));
    Ok(PerceptronSearchOutcome { weights, ledger, converged })
}

/// Sampling-only baseline: each round draws up to `m_c = d
/// ceil(ln(1/(epsilon gamma^2)))` uniform indices, updating on the first
/// misclassified sample; a round that exhausts its draws without a hit
/// concludes the data is separated and stops. Every drawn sample charges
/// one classical oracle query.
pub fn classical_perceptron_sampling_baseline(
    data: &LabeledSet,
    gamma: f64,
    epsilon: f64,
    seed: u64,
) -> Result<PerceptronSearchOutcome> {
    validate_common(data, gamma, epsilon)?;
    let d = data.len();
    let points = data.points();
    let labels = data.labels();
    let batch = d * (1.0 / (epsilon * gamma * gamma)).ln().ceil() as usize;
    let rounds = update_budget(gamma) + 1;

    let mut weights = vec![0.0; data.dim()];
    let mut ledger = QueryLedger::default();
    let mut draws = stream(seed, "qperceptron-classical");

    for round in 1..=rounds {
        let mut tally = PhaseTally { round, ..PhaseTally::default() };
        let mut hit = false;
        for _ in 0..batch {
            let q = draws.gen_range(0..d);
            tally.classical_oracle_queries += 1;
            if misclassified(&weights, &points[q], labels[q]) {
                for (w, x) in weights.iter_mut().zip(&points[q]) {
                    *w += labels[q] * x;
                }
                tally.updates += 1;
                hit = true;
                break;
            }
        }
        ledger.add_phase(tally);
        if !hit {
            break;
        }
    }

    let converged = (0..d).all(|i| !misclassified(&weights, &points[i], labels[i]));
    Ok(PerceptronSearchOutcome { weights, ledger, converged })
}

/// One row of the query-scaling table: medians over the per-size seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub dataset_size: usize,
    pub median_grover_queries: f64,
    pub median_classical_queries: f64,
    pub quantum_successes: usize,
    pub classical_successes: usize,
    pub runs: usize,
}

fn median(values: &mut [usize]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}

/// Train both learners on fresh margin datasets at every size and seed,
/// reporting median query counts. Runs are independent, so they execute in
/// parallel; each one is single-threaded and seeded on its own.
pub fn perceptron_query_scaling(
    sizes: &[usize],
    dim: usize,
    gamma: f64,
    epsilon: f64,
    c: f64,
    seeds_per_size: usize,
    base_seed: u64,
) -> Result<Vec<ScalingRow>> {
    if sizes.is_empty() || seeds_per_size == 0 {
        return Err(Error::InvalidArgument(
            "the scaling study needs at least one size and one seed".into(),
        ));
    }
    let mut seeder = stream(base_seed, "scaling-seeds");
    let runs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&size| (0..seeds_per_size).map(|_| size).collect::<Vec<_>>())
        .map(|size| (size, seeder.gen()))
        .collect();

    let results: Vec<(usize, usize, bool, bool)> = runs
        .par_iter()
        .map(|&(size, run_seed)| {
            let dataset = synth_margin_dataset(size, dim, gamma, run_seed)?;
            let quantum = quantum_perceptron_train(&dataset.set, gamma, epsilon, c, run_seed)?;
            let classical =
                classical_perceptron_sampling_baseline(&dataset.set, gamma, epsilon, run_seed)?;
            Ok((
                quantum.ledger.grover_oracle_queries,
                classical.ledger.classical_oracle_queries,
                quantum.converged,
                classical.converged,
            ))
        })
        .collect::<Result<_>>()?;

    Ok(sizes
        .iter()
        .enumerate()
        .map(|(block, &size)| {
            let slice = &results[block * seeds_per_size..(block + 1) * seeds_per_size];
            let mut grover: Vec<usize> = slice.iter().map(|r| r.0).collect();
            let mut classical: Vec<usize> = slice.iter().map(|r| r.1).collect();
            ScalingRow {
                dataset_size: size,
                median_grover_queries: median(&mut grover),
                median_classical_queries: median(&mut classical),
                quantum_successes: slice.iter().filter(|r| r.2).count(),
                classical_successes: slice.iter().filter(|r| r.3).count(),
                runs: seeds_per_size,
            }
        })
        .collect())
}

/// Least-squares slope of `ln y` against `ln x`: the exponent of the best
/// power-law fit through the points.
pub fn fitted_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "a power-law fit needs at least two points".into(),
        ));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidArgument(
            "power-law fits need strictly positive finite coordinates".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let x_mean = logs.iter().map(|p| p.0).sum::<f64>() / logs.len() as f64;
    let y_mean = logs.iter().map(|p| p.1).sum::<f64>() / logs.len() as f64;
    let covariance: f64 = logs.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    let spread: f64 = logs.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
    if spread == 0.0 {
        return Err(Error::Degenerate(
            "all x-coordinates coincide; the exponent is undetermined".into(),
        ));
    }
    Ok(covariance / spread)
}
