use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{micro_metrics, train_on, ConfusionCounts, EvalError, Hyper, Metrics};
use crate::corpus::{Dataset, Utterance};
use crate::lexicon::Lexicons;
use crate::operators::Proposer;
use crate::strategies::{augment_dataset, AugmentationConfig, Embedder, GenerationReport};
use crate::taxonomy::BasicEmotion;

pub const MODEL_NAME: &str = "SVM (1-2 gram)";
pub const ORIGINAL: &str = "original";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub strategy: String,
    pub train_size: usize,
    pub metrics: Metrics,
    /// Percentage change in F1 against the original row, keyed by emotion
    /// name and `micro`. Absent on the original row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1_change: Option<BTreeMap<String, Option<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation: Option<GenerationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub model: String,
    pub hyper: Hyper,
    pub test_size: usize,
    pub rows: Vec<ExperimentRow>,
}

/// Model inputs shared by every row of an experiment.
pub struct ExperimentSetup<'a> {
    pub lexicons: &'a Lexicons,
    pub proposer: &'a dyn Proposer,
    pub embedder: &'a dyn Embedder,
    pub workers: usize,
}

/// `None` when the original F1 is zero and the new one is not.
fn pct_change(new: f64, old: f64) -> Option<f64> {
    if old == 0.0 {
        (new == 0.0).then_some(0.0)
    } else {
        Some((new - old) / old * 100.0)
    }
}

fn evaluate(train: &[Utterance], test: &Dataset, hyper: &Hyper) -> Result<Metrics, EvalError> {
    let model = train_on(train, hyper)?;
    let predictions = model.predict(test);
    let cc = ConfusionCounts::from_pairs(test.iter().map(|u| &u.labels).zip(predictions.iter().map(|p| &p.predicted)));
    Ok(micro_metrics(&cc))
}

/// Trains the baseline on `train` and on `train` plus each strategy's
/// augmented copy of `train`, and scores every model on `test`. The test set
/// is never augmented.
pub fn run_experiment(
    train: &Dataset,
    test: &Dataset,
    configs: &[AugmentationConfig],
    hyper: &Hyper,
    setup: &ExperimentSetup<'_>,
) -> Result<ExperimentReport, EvalError> {
    let train_ids: HashSet<&str> = train.iter().map(|u| u.id.as_str()).collect();
    if let Some(u) = test.iter().find(|u| train_ids.contains(u.id.as_str())) {
        return Err(EvalError::Overlap(u.id.clone()));
    }
    let base = evaluate(&train.instances, test, hyper)?;
    let mut rows = vec![ExperimentRow {
        strategy: ORIGINAL.to_string(),
        train_size: train.len(),
        metrics: base.clone(),
        f1_change: None,
        generation: None,
    }];
    for cfg in configs {
        let out = augment_dataset(train, cfg, setup.lexicons, setup.proposer, setup.embedder, setup.workers)?;
        let mut combined = train.instances.clone();
        combined.extend(out.instances.iter().map(|a| a.to_utterance()));
        let metrics = evaluate(&combined, test, hyper)?;
        let mut change: BTreeMap<String, Option<f64>> = BasicEmotion::ALL
            .iter()
            .map(|e| (e.name().to_string(), pct_change(metrics.per_emotion[e].f1, base.per_emotion[e].f1)))
            .collect();
        change.insert("micro".into(), pct_change(metrics.micro.f1, base.micro.f1));
        rows.push(ExperimentRow {
            strategy: cfg.strategy.name().to_string(),
            train_size: combined.len(),
            metrics,
            f1_change: Some(change),
            generation: Some(out.report),
        });
    }
    Ok(ExperimentReport {
        model: MODEL_NAME.to_string(),
        hyper: *hyper,
        test_size: test.len(),
        rows,
    })
}

fn fmt_change(change: Option<Option<f64>>) -> String {
    match change {
        None => "-".into(),
        Some(None) => "n/a".into(),
        Some(Some(c)) => format!("{c:+.1}%"),
    }
}

impl ExperimentReport {
    /// Aligned text table: one block per emotion plus a micro block, one row
    /// per training set.
    pub fn render_table(&self) -> String {
        let header = ["Emotion", "Strategy", "Model", "Precision", "Recall", "F1", "F1 change"];
        let mut lines: Vec<[String; 7]> = Vec::new();
        let mut blocks: Vec<Option<BasicEmotion>> = BasicEmotion::ALL.iter().copied().map(Some).collect();
        blocks.push(None);
        for block in blocks {
            let name = block.map_or("Micro", |e| e.name()).to_string();
            let key = block.map_or("micro", |e| e.name()).to_string();
            for (i, row) in self.rows.iter().enumerate() {
                let m = block.map_or(row.metrics.micro, |e| row.metrics.per_emotion[&e]);
                lines.push([
                    if i == 0 { name.clone() } else { String::new() },
                    row.strategy.clone(),
                    self.model.clone(),
                    format!("{:.3}", m.precision),
                    format!("{:.3}", m.recall),
                    format!("{:.3}", m.f1),
                    fmt_change(row.f1_change.as_ref().and_then(|c| c.get(&key).copied())),
                ]);
            }
        }
        let mut widths = header.map(str::len);
        for l in &lines {
            for (w, cell) in widths.iter_mut().zip(l) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let row = |out: &mut String, cells: &[String]| {
            let mut parts = Vec::with_capacity(cells.len());
            for (i, c) in cells.iter().enumerate() {
                parts.push(if i < 3 {
                    format!("{c:<w$}", w = widths[i])
                } else {
                    format!("{c:>w$}", w = widths[i])
                });
            }
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        row(&mut out, &header.map(String::from));
        let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        for l in &lines {
            row(&mut out, l);
        }
        out
    }
}
