use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::taxonomy::BasicEmotion;

/// `tp / (tp + fp)`, with 0/0 = 0.
pub fn precision(tp: u64, fp: u64) -> f64 {
    ratio(tp, tp + fp)
}

/// `tp / (tp + fn)`, with 0/0 = 0.
pub fn recall(tp: u64, fn_: u64) -> f64 {
    ratio(tp, tp + fn_)
}

/// Harmonic mean of precision and recall, with 0 when both are 0.
pub fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Counts {
    pub fn prf(&self) -> Prf {
        Prf::new(precision(self.tp, self.fp), recall(self.tp, self.fn_))
    }

    fn add(&mut self, other: &Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub per_emotion: BTreeMap<BasicEmotion, Counts>,
}

impl ConfusionCounts {
    /// Counts over paired gold and predicted label sets.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a BTreeSet<BasicEmotion>, &'a BTreeSet<BasicEmotion>)>) -> Self {
        let mut per_emotion: BTreeMap<BasicEmotion, Counts> = BasicEmotion::ALL.iter().map(|e| (*e, Counts::default())).collect();
        for (gold, pred) in pairs {
            for e in BasicEmotion::ALL {
                let c = per_emotion.get_mut(&e).expect("all emotions present");
                match (gold.contains(&e), pred.contains(&e)) {
                    (true, true) => c.tp += 1,
                    (false, true) => c.fp += 1,
                    (true, false) => c.fn_ += 1,
                    (false, false) => c.tn += 1,
                }
            }
        }
        Self { per_emotion }
    }

    pub fn pooled(&self) -> Counts {
        let mut total = Counts::default();
        for c in self.per_emotion.values() {
            total.add(c);
        }
        total
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        Self {
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub per_emotion: BTreeMap<BasicEmotion, Prf>,
    pub micro: Prf,
}

/// Per-emotion values plus micro averages from the pooled counts.
pub fn micro_metrics(cc: &ConfusionCounts) -> Metrics {
    Metrics {
        per_emotion: cc.per_emotion.iter().map(|(e, c)| (*e, c.prf())).collect(),
        micro: cc.pooled().prf(),
    }
}
