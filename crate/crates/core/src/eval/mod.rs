//! Metrics, the n-gram baseline classifier, error-overlap analysis and the
//! original-vs-augmented experiment.

mod baseline;
mod experiment;
mod metrics;
mod overlap;

use std::io::{BufRead, BufReader, Read, Write};

use thiserror::Error;

use crate::strategies::AugmentError;
use crate::taxonomy::BasicEmotion;

pub use baseline::{ngrams, train_baseline, train_on, BaselineModel, Hyper, Prediction, Scorer};
pub use experiment::{run_experiment, ExperimentReport, ExperimentRow, ExperimentSetup, MODEL_NAME, ORIGINAL};
pub use metrics::{f1, micro_metrics, precision, recall, ConfusionCounts, Counts, Metrics, Prf};
pub use overlap::{error_sets, fn_overlap, tool_overlap, ErrorSets, OverlapReport, Region, ToolOverlap};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("instance {0} appears in both train and test")]
    Overlap(String),
    #[error("overlap needs at least 2 sets, got {0}")]
    TooFewSets(usize),
    #[error("overlap supports at most 16 sets, got {0}")]
    TooManySets(usize),
    #[error("no prediction for gold instance {0}")]
    MissingPrediction(String),
    #[error("predictions line {line}: {message}")]
    MalformedPrediction { line: usize, message: String },
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads `{"id": str, "predicted": [str]}` lines; emotion names are
/// case-insensitive.
pub fn read_predictions<R: Read>(reader: R) -> Result<Vec<Prediction>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| EvalError::MalformedPrediction { line: i + 1, message };
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let id = value
            .get("id")
            .and_then(|v| v.as_str())
            .ok_or_else(|| bad("missing string field 'id'".into()))?;
        let labels = value
            .get("predicted")
            .and_then(|v| v.as_array())
            .ok_or_else(|| bad("missing array field 'predicted'".into()))?;
        let predicted = labels
            .iter()
            .map(|l| {
                l.as_str()
                    .ok_or_else(|| bad("labels must be strings".into()))?
                    .parse::<BasicEmotion>()
                    .map_err(|e| bad(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        out.push(Prediction {
            id: id.to_string(),
            predicted,
        });
    }
    Ok(out)
}

pub fn write_predictions<W: Write>(mut writer: W, predictions: &[Prediction]) -> std::io::Result<()> {
    for p in predictions {
        serde_json::to_writer(&mut writer, p)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn predictions_round_trip() {
        let preds = vec![
            Prediction {
                id: "a".into(),
                predicted: BTreeSet::from([BasicEmotion::Joy, BasicEmotion::Love]),
            },
            Prediction {
                id: "b".into(),
                predicted: BTreeSet::new(),
            },
        ];
        let mut buf = Vec::new();
        write_predictions(&mut buf, &preds).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "{\"id\":\"a\",\"predicted\":[\"Love\",\"Joy\"]}\n{\"id\":\"b\",\"predicted\":[]}\n"
        );
        assert_eq!(read_predictions(buf.as_slice()).unwrap(), preds);
        let err = read_predictions("{\"id\":\"x\",\"predicted\":[\"calm\"]}\n".as_bytes()).unwrap_err();
        assert!(matches!(err, EvalError::MalformedPrediction { line: 1, .. }));
    }
}
