//! Labeled-dataset parsing for kernel experiments.
//!
//! Datasets arrive as CSV with one sample per row, features first and the
//! label in the last column. A leading non-numeric row is treated as a
//! header and skipped.

use qml_core::{Error, Result};

fn parse_rows(text: &str) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(format!("CSV: {e}")))?;
        if record.iter().all(|cell| cell.is_empty()) {
            continue;
        }
        rows.push(record.iter().map(|cell| cell.to_string()).collect());
    }
    Ok(rows)
}

fn is_numeric_row(row: &[String]) -> bool {
    row.iter().all(|cell| cell.parse::<f64>().is_ok())
}

fn to_numeric(rows: &[Vec<String>]) -> Result<Vec<Vec<f64>>> {
    let start = usize::from(!rows.is_empty() && !is_numeric_row(&rows[0]));
    let body = &rows[start..];
    if body.is_empty() {
        return Err(Error::Parse("dataset has no data rows".into()));
    }
    let width = body[0].len();
    if width < 2 {
        return Err(Error::Parse(
            "dataset rows need at least one feature column and a label column".into(),
        ));
    }
    body.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != width {
                return Err(Error::Parse(format!(
                    "row {} has {} columns, expected {width}",
                    i + start + 1,
                    row.len()
                )));
            }
            row.iter()
                .map(|cell| {
                    let value: f64 = cell
                        .parse()
                        .map_err(|e| Error::Parse(format!("row {}: {e}", i + start + 1)))?;
                    if !value.is_finite() {
                        return Err(Error::Parse(format!(
                            "row {} has non-finite value {value}",
                            i + start + 1
                        )));
                    }
                    Ok(value)
                })
                .collect()
        })
        .collect()
}

/// Parse a generic labeled CSV: features in all but the last column, label
/// in the last.
pub fn parse_labeled_csv(text: &str) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let numeric = to_numeric(&parse_rows(text)?)?;
    let mut features = Vec::with_capacity(numeric.len());
    let mut labels = Vec::with_capacity(numeric.len());
    for mut row in numeric {
        let label = row.pop().expect("rows have at least two columns");
        features.push(row);
        labels.push(label);
    }
    Ok((features, labels))
}

/// Parse a handwritten-digits CSV: integer pixel intensities 0..=16 in all
/// but the last column (normalized to `[0, 1]` by dividing by 16) and an
/// integer class label in the last column.
pub fn parse_optdigits_csv(text: &str) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let (raw_features, labels) = parse_labeled_csv(text)?;
    let features = raw_features
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .map(|pixel| {
                    if pixel.fract() != 0.0 || !(0.0..=16.0).contains(&pixel) {
                        return Err(Error::Parse(format!(
                            "row {} has pixel value {pixel}, expected an integer in 0..=16",
                            i + 1
                        )));
                    }
                    Ok(pixel / 16.0)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    for (i, label) in labels.iter().enumerate() {
        if label.fract() != 0.0 {
            return Err(Error::Parse(format!(
                "row {} has non-integer label {label}",
                i + 1
            )));
        }
    }
    Ok((features, labels))
}
