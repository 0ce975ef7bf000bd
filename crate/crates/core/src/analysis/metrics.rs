use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_percent(name: &str, v: f64) -> Result<()> {
    if !(0.0..=100.0).contains(&v) {
        return Err(Error::InvalidArgument(format!("{name} must be within [0, 100], got {v}")));
    }
    Ok(())
}

/// Error reduction rate, in percent, of `model_score` over `baseline_score`.
pub fn err(baseline_score: f64, model_score: f64) -> Result<f64> {
    check_percent("baseline score", baseline_score)?;
    check_percent("model score", model_score)?;
    if baseline_score == 100.0 {
        return Err(Error::InvalidArgument(
            "error reduction rate is undefined for a baseline score of 100".into(),
        ));
    }
    let base_err = 100.0 - baseline_score;
    let model_err = 100.0 - model_score;
    Ok(100.0 * (base_err - model_err) / base_err)
}

/// One line of an ERR versus language-distance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrRow {
    pub language: String,
    pub distance: f64,
    pub baseline: f64,
    pub model: f64,
}

/// Read `language,distance,baseline,model` rows and emit them with an `err`
/// column appended.
pub fn err_table_csv(input: &str) -> Result<String> {
    let mut reader = csv::Reader::from_reader(input.as_bytes());
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["language", "distance", "baseline", "model", "err"])?;
    for row in reader.deserialize() {
        let row: ErrRow = row?;
        let e = err(row.baseline, row.model)?;
        writer.write_record([
            row.language,
            row.distance.to_string(),
            row.baseline.to_string(),
            row.model.to_string(),
            e.to_string(),
        ])?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Pre-training effort as the number of token positions processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EffortMetric {
    pub batch_size: u64,
    pub sequence_length: u64,
    pub training_steps: u64,
    pub effort: u64,
}

pub fn effort(batch_size: u64, sequence_length: u64, training_steps: u64) -> Result<EffortMetric> {
    if batch_size == 0 || sequence_length == 0 || training_steps == 0 {
        return Err(Error::InvalidArgument("effort fields must be positive".into()));
    }
    let effort = batch_size
        .checked_mul(sequence_length)
        .and_then(|x| x.checked_mul(training_steps))
        .ok_or_else(|| Error::InvalidArgument("effort overflows 64 bits".into()))?;
    Ok(EffortMetric {
        batch_size,
        sequence_length,
        training_steps,
        effort,
    })
}

pub fn effort_ratio(a: &EffortMetric, b: &EffortMetric) -> f64 {
    a.effort as f64 / b.effort as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    HammingLoss,
    Pearson,
    AccuracyLike,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::HammingLoss => "hamming_loss",
            MetricKind::Pearson => "pearson",
            MetricKind::AccuracyLike => "accuracy_like",
        }
    }

    /// Closed input domain.
    pub fn domain(self) -> (f64, f64) {
        match self {
            MetricKind::HammingLoss => (0.0, 1.0),
            MetricKind::Pearson => (-1.0, 1.0),
            MetricKind::AccuracyLike => (0.0, 100.0),
        }
    }

    /// Human-readable mapping, emitted next to rescaled values.
    pub fn formula(self) -> &'static str {
        match self {
            MetricKind::HammingLoss => "(1 - v) * 100",
            MetricKind::Pearson => "(v + 1) / 2 * 100",
            MetricKind::AccuracyLike => "v",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming_loss" => Ok(MetricKind::HammingLoss),
            "pearson" => Ok(MetricKind::Pearson),
            "accuracy_like" => Ok(MetricKind::AccuracyLike),
            _ => Err(Error::InvalidArgument(format!("unknown metric kind {s:?}"))),
        }
    }
}

/// Map a metric onto a 0 to 100 scale where higher is better.
pub fn rescale(kind: MetricKind, value: f64) -> Result<f64> {
    let (lo, hi) = kind.domain();
    if !(lo..=hi).contains(&value) {
        return Err(Error::InvalidArgument(format!(
            "{kind} value {value} outside [{lo}, {hi}]"
        )));
    }
    Ok(match kind {
        MetricKind::HammingLoss => (1.0 - value) * 100.0,
        MetricKind::Pearson => (value + 1.0) / 2.0 * 100.0,
        MetricKind::AccuracyLike => value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn err_examples() {
        assert_eq!(err(80.0, 90.0).unwrap(), 50.0);
        assert_eq!(err(75.0, 75.0).unwrap(), 0.0);
        assert!(err(100.0, 100.0).is_err());
        assert!(err(-1.0, 50.0).is_err());
        assert!(err(50.0, f64::NAN).is_err());
    }

    #[test]
    fn err_of_two_close_scores() {
        // 8.04 points of error shrink to 6.40
        let e = err(91.96, 93.60).unwrap();
        assert!((e - 100.0 * (8.04 - 6.40) / 8.04).abs() < 1e-9);
        assert!((e - 20.4).abs() < 0.05);
    }

    #[test]
    fn effort_examples() {
        assert_eq!(effort(1024, 128, 10_000).unwrap().effort, 1_310_720_000);
        let a = effort(3, 5, 7).unwrap();
        assert_eq!(effort_ratio(&a, &a), 1.0);
        assert!(effort(0, 1, 1).is_err());
        assert!(effort(u64::MAX, 2, 1).is_err());
    }

    #[test]
    fn rescale_endpoints() {
        assert_eq!(rescale(MetricKind::HammingLoss, 0.0).unwrap(), 100.0);
        assert_eq!(rescale(MetricKind::HammingLoss, 1.0).unwrap(), 0.0);
        assert_eq!(rescale(MetricKind::Pearson, 1.0).unwrap(), 100.0);
        assert_eq!(rescale(MetricKind::Pearson, -1.0).unwrap(), 0.0);
        assert_eq!(rescale(MetricKind::Pearson, 0.0).unwrap(), 50.0);
        assert_eq!(rescale(MetricKind::AccuracyLike, 42.5).unwrap(), 42.5);
        assert!(rescale(MetricKind::Pearson, 1.5).is_err());
        assert!(rescale(MetricKind::HammingLoss, -0.1).is_err());
    }

    #[test]
    fn kind_parses() {
        for k in [MetricKind::HammingLoss, MetricKind::Pearson, MetricKind::AccuracyLike] {
            assert_eq!(k.as_str().parse::<MetricKind>().unwrap(), k);
        }
        assert!("f1".parse::<MetricKind>().is_err());
    }

    #[test]
    fn csv_table() {
        let out = err_table_csv("language,distance,baseline,model\nfa,0.5,80,90\n").unwrap();
        assert_eq!(out, "language,distance,baseline,model,err\nfa,0.5,80,90,50\n");
        assert!(err_table_csv("language,distance,baseline,model\nfa,x,80,90\n").is_err());
    }
}
