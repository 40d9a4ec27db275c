use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{EvalError, Prediction};
use crate::corpus::Dataset;
use crate::taxonomy::BasicEmotion;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    /// Sets the elements belong to; they belong to no other set.
    pub members: Vec<String>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub sets: Vec<String>,
    pub sizes: Vec<usize>,
    pub union: usize,
    /// Every nonempty combination of sets, including empty regions.
    pub regions: Vec<Region>,
    pub all_shared: usize,
    pub all_shared_fraction: f64,
}

impl OverlapReport {
    /// E.g. `176/301 (58%)`.
    pub fn all_shared_summary(&self) -> String {
        format!(
            "{}/{} ({:.0}%)",
            self.all_shared,
            self.union,
            self.all_shared_fraction * 100.0
        )
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, size) in self.sets.iter().zip(&self.sizes) {
            let _ = writeln!(out, "{name}: {size}");
        }
        for r in &self.regions {
            let _ = writeln!(out, "  {:<40} {}", r.members.join(" & "), r.count);
        }
        let _ = writeln!(out, "shared by all: {}", self.all_shared_summary());
        out
    }
}

/// Venn-region counts: for every nonempty combination of the named sets, how
/// many elements belong to exactly those sets.
pub fn fn_overlap(sets: &[(String, BTreeSet<String>)]) -> Result<OverlapReport, EvalError> {
    if sets.len() < 2 {
        return Err(EvalError::TooFewSets(sets.len()));
    }
    if sets.len() > 16 {
        return Err(EvalError::TooManySets(sets.len()));
    }
    let mut membership: HashMap<&str, u32> = HashMap::new();
    for (i, (_, set)) in sets.iter().enumerate() {
        for x in set {
            *membership.entry(x.as_str()).or_default() |= 1 << i;
        }
    }
    let mut counts = vec![0usize; 1 << sets.len()];
    for mask in membership.values() {
        counts[*mask as usize] += 1;
    }
    let full = (1usize << sets.len()) - 1;
    let regions = (1..=full)
        .map(|mask| Region {
            members: (0..sets.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| sets[i].0.clone())
                .collect(),
            count: counts[mask],
        })
        .collect();
    let union = membership.len();
    let all_shared = counts[full];
    Ok(OverlapReport {
        sets: sets.iter().map(|(n, _)| n.clone()).collect(),
        sizes: sets.iter().map(|(_, s)| s.len()).collect(),
        union,
        regions,
        all_shared,
        all_shared_fraction: if union == 0 { 0.0 } else { all_shared as f64 / union as f64 },
    })
}

/// False-negative and false-positive instance ids of one prediction set,
/// per emotion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorSets {
    pub false_negatives: BTreeMap<BasicEmotion, BTreeSet<String>>,
    pub false_positives: BTreeMap<BasicEmotion, BTreeSet<String>>,
}

pub fn error_sets(gold: &Dataset, predictions: &[Prediction]) -> Result<ErrorSets, EvalError> {
    let by_id: HashMap<&str, &BTreeSet<BasicEmotion>> =
        predictions.iter().map(|p| (p.id.as_str(), &p.predicted)).collect();
    let mut out = ErrorSets::default();
    for u in gold {
        let pred = by_id
            .get(u.id.as_str())
            .ok_or_else(|| EvalError::MissingPrediction(u.id.clone()))?;
        for e in BasicEmotion::ALL {
            match (u.labels.contains(&e), pred.contains(&e)) {
                (true, false) => {
                    out.false_negatives.entry(e).or_default().insert(u.id.clone());
                }
                (false, true) => {
                    out.false_positives.entry(e).or_default().insert(u.id.clone());
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolOverlap {
    pub false_negatives: BTreeMap<String, OverlapReport>,
    pub false_positives: BTreeMap<String, OverlapReport>,
}

/// FN and FP overlap between several prediction files over one gold set,
/// per emotion and pooled (`all`, over `id:Emotion` pairs).
pub fn tool_overlap(gold: &Dataset, tools: &[(String, Vec<Prediction>)]) -> Result<ToolOverlap, EvalError> {
    let errors: Vec<(String, ErrorSets)> = tools
        .iter()
        .map(|(name, preds)| Ok((name.clone(), error_sets(gold, preds)?)))
        .collect::<Result<_, EvalError>>()?;
    let side = |pick: fn(&ErrorSets) -> &BTreeMap<BasicEmotion, BTreeSet<String>>| -> Result<BTreeMap<String, OverlapReport>, EvalError> {
        let mut out = BTreeMap::new();
        for e in BasicEmotion::ALL {
            let sets: Vec<(String, BTreeSet<String>)> = errors
                .iter()
                .map(|(n, es)| (n.clone(), pick(es).get(&e).cloned().unwrap_or_default()))
                .collect();
            out.insert(e.name().to_string(), fn_overlap(&sets)?);
        }
        let pooled: Vec<(String, BTreeSet<String>)> = errors
            .iter()
            .map(|(n, es)| {
                let pairs = pick(es)
                    .iter()
                    .flat_map(|(e, ids)| ids.iter().map(move |id| format!("{id}:{e}")))
                    .collect();
                (n.clone(), pairs)
            })
            .collect();
        out.insert("all".to_string(), fn_overlap(&pooled)?);
        Ok(out)
    };
    Ok(ToolOverlap {
        false_negatives: side(|e| &e.false_negatives)?,
        false_positives: side(|e| &e.false_positives)?,
    })
}
