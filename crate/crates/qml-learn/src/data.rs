//! Labeled datasets and the synthetic margin-dataset generator used by the
//! perceptron and classifier fixtures.

use qml_core::rng::stream;
use qml_core::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

/// A labeled dataset: one feature vector per row, labels in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    points: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl LabeledSet {
    /// Validate and wrap a dataset. Rows must be non-empty, rectangular, and
    /// finite; labels must be exactly -1 or +1, one per row.
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("dataset has no rows".into()));
        }
        if points.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rows but {} labels",
                points.len(),
                labels.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidArgument("rows must have at least one feature".into()));
        }
        for (i, row) in points.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} features, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("row {i} contains a non-finite feature")));
            }
        }
        for (i, &y) in labels.iter().enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(Error::InvalidArgument(format!(
                    "label {i} is {y}; labels must be -1 or +1"
                )));
            }
        }
        Ok(Self { points, labels })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Feature dimension shared by every row.
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// A synthetic dataset together with the separator that certifies its margin.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginDataset {
    pub set: LabeledSet,
    /// Unit vector w with y_i (w . x_i) >= gamma for every row.
    pub separator: Vec<f64>,
    pub gamma: f64,
}

fn unit_normal_vector(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Generate `n` unit-norm points in dimension `d` that a planted unit
/// separator classifies with margin at least `gamma`.
///
/// Each point is built as `y t w + sqrt(1 - t^2) o` with `o` a random unit
/// vector orthogonal to the separator `w` and `t` drawn from `[gamma, 1)`,
/// so `y (w . x) = t >= gamma` holds exactly. Labels are balanced to within
/// one and shuffled.
pub fn synth_margin_dataset(n: usize, d: usize, gamma: f64, seed: u64) -> Result<MarginDataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one point".into()));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "margin must lie in (0, 1), got {gamma}"
        )));
    }
    let mut rng = stream(seed, "margin-data");
    let separator = unit_normal_vector(d, &mut rng);

    let mut labels: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    labels.shuffle(&mut rng);

    let mut points = Vec::with_capacity(n);
    for &y in &labels {
        let t = gamma + (1.0 - gamma) * rng.gen::<f64>();
        let raw = unit_normal_vector(d, &mut rng);
        let along: f64 = raw.iter().zip(&separator).map(|(a, b)| a * b).sum();
        let mut ortho: Vec<f64> = raw
            .iter()
            .zip(&separator)
            .map(|(a, b)| a - along * b)
            .collect();
        let ortho_norm = ortho.iter().map(|x| x * x).sum::<f64>().sqrt();
        if ortho_norm > 1e-9 {
            for v in &mut ortho {
                *v /= ortho_norm;
            }
        } else {
            ortho = vec![0.0; d];
        }
        let radial = if ortho_norm > 1e-9 { t } else { 1.0 };
        let cross = (1.0 - radial * radial).max(0.0).sqrt();
        let point: Vec<f64> = separator
            .iter()
            .zip(&ortho)
            .map(|(w, o)| y * radial * w + cross * o)
            .collect();
        points.push(point);
    }

    Ok(MarginDataset {
        set: LabeledSet::new(points, labels)?,
        separator,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_points_are_unit_norm_with_certified_margin() {
        let data = synth_margin_dataset(20, 5, 0.3, 7).unwrap();
        for (x, &y) in data.set.points().iter().zip(data.set.labels()) {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            let dot: f64 = x.iter().zip(&data.separator).map(|(a, b)| a * b).sum();
            assert!(y * dot >= 0.3 - 1e-12, "margin violated: {}", y * dot);
        }
    }

    #[test]
    fn labels_are_balanced_within_one() {
        for n in [10, 11, 25] {
            let data = synth_margin_dataset(n, 3, 0.5, 11).unwrap();
            let positives = data.set.labels().iter().filter(|&&y| y > 0.0).count();
            let negatives = n - positives;
            assert!(positives.abs_diff(negatives) <= 1);
        }
    }

    #[test]
    fn generator_is_deterministic_per_seed() {
        let a = synth_margin_dataset(12, 4, 0.2, 3).unwrap();
        let b = synth_margin_dataset(12, 4, 0.2, 3).unwrap();
        assert_eq!(a, b);
        let c = synth_margin_dataset(12, 4, 0.2, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn one_dimensional_data_sits_at_the_poles() {
        let data = synth_margin_dataset(6, 1, 0.4, 9).unwrap();
        for (x, &y) in data.set.points().iter().zip(data.set.labels()) {
            assert!((x[0] - y * data.separator[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(synth_margin_dataset(0, 3, 0.5, 1).is_err());
        assert!(synth_margin_dataset(5, 0, 0.5, 1).is_err());
        assert!(synth_margin_dataset(5, 3, 0.0, 1).is_err());
        assert!(synth_margin_dataset(5, 3, 1.0, 1).is_err());
    }

    #[test]
    fn labeled_set_validation_catches_bad_rows() {
        assert!(LabeledSet::new(vec![], vec![]).is_err());
        assert!(LabeledSet::new(vec![vec![1.0]], vec![0.5]).is_err());
        assert!(LabeledSet::new(vec![vec![1.0], vec![1.0, 2.0]], vec![1.0, -1.0]).is_err());
        assert!(LabeledSet::new(vec![vec![f64::NAN]], vec![1.0]).is_err());
    }
}
