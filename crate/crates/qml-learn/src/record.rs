//! Training-run records: per-epoch metrics, parameter snapshot hashes, and
//! the seed that reproduces the run.

use qml_core::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// SHA-256 hex digest of a parameter vector's little-endian bytes.
pub fn parameter_hash(parameters: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for p in parameters {
        hasher.update(p.to_le_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Metrics captured at the end of one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStat {
    pub epoch: usize,
    pub train_loss: f64,
    pub test_loss: Option<f64>,
    pub train_accuracy: f64,
    pub test_accuracy: Option<f64>,
    pub param_hash: String,
}

/// Record of a full training run. Epoch numbers increase strictly; the seed
/// pins the run for exact replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub seed: u64,
    pub epochs: Vec<EpochStat>,
    pub wall_clock_seconds: f64,
}

impl TrainRecord {
    pub fn validate(&self) -> Result<()> {
        for pair in self.epochs.windows(2) {
            if pair[1].epoch <= pair[0].epoch {
                return Err(Error::Validation(format!(
                    "epoch {} does not follow epoch {}",
                    pair[1].epoch, pair[0].epoch
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("train records serialize")
    }

    /// One compact JSON object per epoch, preceded by none; suitable for
    /// appending to a log.
    pub fn to_json_lines(&self) -> String {
        self.epochs
            .iter()
            .map(|e| serde_json::to_string(e).expect("epoch stats serialize"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: Self =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("train record JSON: {e}")))?;
        record.validate()?;
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stat(epoch: usize) -> EpochStat {
        EpochStat {
            epoch,
            train_loss: 1.0 / epoch as f64,
            test_loss: Some(1.5 / epoch as f64),
            train_accuracy: 0.9,
            test_accuracy: None,
            param_hash: parameter_hash(&[epoch as f64]),
        }
    }

    #[test]
    fn hashes_are_stable_and_sensitive() {
        let a = parameter_hash(&[0.1, 0.2]);
        assert_eq!(a, parameter_hash(&[0.1, 0.2]));
        assert_ne!(a, parameter_hash(&[0.1, 0.2000000001]));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn records_round_trip_through_json() {
        let record = TrainRecord {
            seed: 42,
            epochs: vec![stat(1), stat(2), stat(3)],
            wall_clock_seconds: 0.25,
        };
        let back = TrainRecord::from_json(&record.to_json()).unwrap();
        assert_eq!(record, back);
    }

    #[test]
    fn non_increasing_epochs_fail_validation() {
        let record = TrainRecord {
            seed: 1,
            epochs: vec![stat(2), stat(2)],
            wall_clock_seconds: 0.0,
        };
        assert!(record.validate().is_err());
        assert!(TrainRecord::from_json(&record.to_json()).is_err());
    }

    #[test]
    fn json_lines_emit_one_object_per_epoch() {
        let record = TrainRecord {
            seed: 7,
            epochs: vec![stat(1), stat(2)],
            wall_clock_seconds: 0.1,
        };
        let text = record.to_json_lines();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains("\"epoch\":1"));
    }
}
