use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::embed::{similarity_gate, EmbedError, Embedder};
use super::{ops_count, polarity_ok, AugmentationConfig, ConfigError, PolarityProfile, PolarityRule, Strategy};
use crate::corpus::{Dataset, Utterance};
use crate::lexicon::{word_emotions, word_polarity, Lexicons, PolarityClass};
use crate::operators::{
    augmentable_length, op_delete, op_insert, op_shuffle, op_substitute, tokenize, Constraint, EditRecord, OpKind,
    OperatorError, ProposalContext, Proposer, TokenizedUtterance,
};
use crate::taxonomy::BasicEmotion;

/// Tries per operator step before the whole attempt is abandoned.
const STEP_TRIES: usize = 8;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("instance {id}: {source}")]
    Operator {
        id: String,
        #[source]
        source: OperatorError,
    },
    #[error("instance {id}: {source}")]
    Embed {
        id: String,
        #[source]
        source: EmbedError,
    },
    #[error("cannot start worker pool: {0}")]
    Workers(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    /// The utterance has no word tokens.
    NoWords,
    /// No operator could be applied at some step.
    OperatorFailure,
    /// A conflicting word had no label bucket to be repaired from.
    RepairImpossible,
    PolarityViolation,
    SimilarityGate,
    Duplicate,
}

/// A generated variant before the similarity gate.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub tokens: TokenizedUtterance,
    pub edits: Vec<EditRecord>,
}

impl Candidate {
    pub fn text(&self) -> String {
        self.tokens.text()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedInstance {
    pub id: String,
    pub parent_id: String,
    pub variant_index: usize,
    pub text: String,
    pub labels: BTreeSet<BasicEmotion>,
    pub strategy: Strategy,
    pub edits: Vec<EditRecord>,
    pub similarity: f64,
    pub attempts: usize,
}

impl AugmentedInstance {
    /// As a training utterance; the text is already masked.
    pub fn to_utterance(&self) -> Utterance {
        Utterance {
            id: self.id.clone(),
            raw_text: self.text.clone(),
            masked_text: self.text.clone(),
            labels: self.labels.clone(),
            secondary_labels: None,
            source: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shortfall {
    pub variant_index: usize,
    pub attempts: usize,
    pub reasons: BTreeMap<FailureReason, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub id: String,
    pub emitted: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shortfalls: Vec<Shortfall>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub strategy: Strategy,
    pub variants_per_instance: usize,
    pub instances: usize,
    pub emitted: usize,
    pub shortfall: usize,
    pub reasons: BTreeMap<FailureReason, usize>,
    pub per_instance: Vec<InstanceReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationOutput {
    pub instances: Vec<AugmentedInstance>,
    pub report: GenerationReport,
}

/// Per-variant seed: SHA-256 over the run seed, the instance id and the
/// variant index, so results do not depend on scheduling.
pub fn instance_seed(seed: u64, id: &str, variant: usize) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((id.len() as u64).to_le_bytes());
    h.update(id.as_bytes());
    h.update((variant as u64).to_le_bytes());
    h.finalize().into()
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn operator_error(id: &str, source: OperatorError) -> AugmentError {
    AugmentError::Operator { id: id.to_string(), source }
}

/// Applies `ops_count` randomly chosen operators in sequence, then the
/// strategy's post-step (lexicon repair or the polarity check).
///
/// `Ok(Err(reason))` means this attempt produced nothing usable; `Err` is
/// reserved for proposer or programming errors.
pub fn generate_variant(
    u: &Utterance,
    cfg: &AugmentationConfig,
    lexicons: &Lexicons,
    proposer: &dyn Proposer,
    rng: &mut ChaCha8Rng,
) -> Result<Result<Candidate, FailureReason>, OperatorError> {
    let original = tokenize(&u.masked_text);
    if augmentable_length(&original) == 0 {
        return Ok(Err(FailureReason::NoWords));
    }
    let constraint = match cfg.strategy {
        Strategy::Polarity => Some(Constraint::Polarity(PolarityRule::for_labels(&u.labels).proposal_class())),
        Strategy::Lexicon | Strategy::Unconstrained => None,
    };
    let k = ops_count(augmentable_length(&original), cfg);
    let mut tu = original.clone();
    let mut edits: Vec<EditRecord> = Vec::with_capacity(k + 2);
    let mut shuffled = false;
    // Delete and shuffle eligibility is judged on the input; the current
    // state is re-checked by the operator guards at every step.
    let input_deletable = augmentable_length(&original) >= 2;
    let input_multi_sentence = original.sentence_bounds.len() >= 2;

    for _ in 0..k {
        let mut applied = false;
        for _ in 0..STEP_TRIES {
            let words = tu.word_positions();
            let deletable: Vec<usize> = if cfg.strategy == Strategy::Polarity {
                words
                    .iter()
                    .copied()
                    .filter(|&i| word_polarity(&tu.tokens[i].text, lexicons.polarity()) == PolarityClass::Neutral)
                    .collect()
            } else {
                words.clone()
            };
            let mut eligible = vec![OpKind::Insert, OpKind::Substitute];
            if input_deletable && words.len() >= 2 && !deletable.is_empty() {
                eligible.push(OpKind::Delete);
            }
            if input_multi_sentence && !shuffled && tu.sentence_bounds.len() >= 2 {
                eligible.push(OpKind::Shuffle);
            }
            let op = eligible[rng.random_range(0..eligible.len())];
            let ctx = ProposalContext {
                constraint,
                lexicons,
                edit_index: edits.len(),
            };
            let result = match op {
                OpKind::Insert => op_insert(&tu, rng.random_range(0..=words.len()), proposer, &ctx, rng),
                OpKind::Substitute => op_substitute(&tu, words[rng.random_range(0..words.len())], proposer, &ctx, rng),
                OpKind::Delete => op_delete(&tu, deletable[rng.random_range(0..deletable.len())]),
                OpKind::Shuffle => op_shuffle(&tu, rng),
            };
            match result {
                Ok((next, edit)) => {
                    shuffled |= op == OpKind::Shuffle;
                    tu = next;
                    edits.push(edit);
                    applied = true;
                    break;
                }
                Err(OperatorError::Failure { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        if !applied {
            return Ok(Err(FailureReason::OperatorFailure));
        }
    }

    let mut cand = Candidate { tokens: tu, edits };
    match cfg.strategy {
        Strategy::Lexicon => {
            if repair_lexicon(&mut cand, &u.labels, lexicons, rng).is_err() {
                return Ok(Err(FailureReason::RepairImpossible));
            }
        }
        Strategy::Polarity => {
            let before = PolarityProfile::of(&original, lexicons.polarity());
            let after = PolarityProfile::of(&cand.tokens, lexicons.polarity());
            if !polarity_ok(&before, &after, &u.labels) {
                return Ok(Err(FailureReason::PolarityViolation));
            }
        }
        Strategy::Unconstrained => {}
    }
    Ok(Ok(cand))
}

/// Replaces every edit-introduced word whose emotions are nonempty and
/// disjoint from `labels` by a word from the bucket of one of the labels.
/// Each replacement is recorded as a substitute edit pointing at the edit
/// that introduced the word.
pub fn repair_lexicon(
    cand: &mut Candidate,
    labels: &BTreeSet<BasicEmotion>,
    lexicons: &Lexicons,
    rng: &mut ChaCha8Rng,
) -> Result<(), FailureReason> {
    let usable: Vec<BasicEmotion> = labels
        .iter()
        .copied()
        .filter(|e| !lexicons.pool(Some(Constraint::Emotion(*e))).is_empty())
        .collect();
    for i in 0..cand.tokens.tokens.len() {
        let token = &cand.tokens.tokens[i];
        let Some(origin) = token.introduced_by.filter(|_| token.is_word()) else {
            continue;
        };
        let emotions = word_emotions(&token.text, lexicons.emotion());
        if emotions.is_empty() || !emotions.is_disjoint(labels) {
            continue;
        }
        if usable.is_empty() {
            return Err(FailureReason::RepairImpossible);
        }
        let label = usable[rng.random_range(0..usable.len())];
        let pool = lexicons.pool(Some(Constraint::Emotion(label)));
        let word = pool[rng.random_range(0..pool.len())].clone();
        let token = &mut cand.tokens.tokens[i];
        let before = std::mem::replace(&mut token.text, word.clone());
        token.introduced_by = Some(cand.edits.len());
        cand.edits.push(EditRecord {
            op: OpKind::Substitute,
            index: Some(i),
            before: Some(before),
            after: Some(word),
            permutation: None,
            repairs: Some(origin),
        });
    }
    Ok(())
}

fn augment_instance(
    u: &Utterance,
    cfg: &AugmentationConfig,
    lexicons: &Lexicons,
    proposer: &dyn Proposer,
    embedder: &dyn Embedder,
) -> Result<(Vec<AugmentedInstance>, InstanceReport), AugmentError> {
    let mut seen: HashSet<String> = HashSet::from([normalize_ws(&u.masked_text)]);
    let mut out = Vec::new();
    let mut shortfalls = Vec::new();
    let attempts_allowed = cfg.max_retries + 1;

    for slot in 0..cfg.variants_per_instance {
        let mut rng = ChaCha8Rng::from_seed(instance_seed(cfg.seed, &u.id, slot));
        let mut reasons: BTreeMap<FailureReason, usize> = BTreeMap::new();
        let mut emitted = false;
        for attempt in 1..=attempts_allowed {
            let cand = match generate_variant(u, cfg, lexicons, proposer, &mut rng).map_err(|e| operator_error(&u.id, e))? {
                Ok(c) => c,
                Err(reason) => {
                    *reasons.entry(reason).or_default() += 1;
                    if reason == FailureReason::NoWords {
                        break;
                    }
                    continue;
                }
            };
            let text = cand.text();
            let key = normalize_ws(&text);
            if seen.contains(&key) {
                *reasons.entry(FailureReason::Duplicate).or_default() += 1;
                continue;
            }
            let gate = similarity_gate(&u.masked_text, &text, embedder, cfg.similarity_threshold).map_err(|source| {
                AugmentError::Embed {
                    id: u.id.clone(),
                    source,
                }
            })?;
            if !gate.pass {
                *reasons.entry(FailureReason::SimilarityGate).or_default() += 1;
                continue;
            }
            seen.insert(key);
            out.push(AugmentedInstance {
                id: format!("{}.aug{slot}", u.id),
                parent_id: u.id.clone(),
                variant_index: slot,
                text,
                labels: u.labels.clone(),
                strategy: cfg.strategy,
                edits: cand.edits,
                similarity: gate.similarity,
                attempts: attempt,
            });
            emitted = true;
            break;
        }
        if !emitted {
            shortfalls.push(Shortfall {
                variant_index: slot,
                attempts: reasons.values().sum(),
                reasons,
            });
        }
    }
    let report = InstanceReport {
        id: u.id.clone(),
        emitted: out.len(),
        shortfalls,
    };
    Ok((out, report))
}

/// Generates up to `variants_per_instance` variants per instance.
///
/// Instances are processed on `workers` threads; output is ordered by parent
/// id, then variant index, whatever the worker count.
pub fn augment_dataset(
    ds: &Dataset,
    cfg: &AugmentationConfig,
    lexicons: &Lexicons,
    proposer: &dyn Proposer,
    embedder: &dyn Embedder,
    workers: usize,
) -> Result<AugmentationOutput, AugmentError> {
    cfg.validate()?;
    let lexicons: Cow<'_, Lexicons> = if lexicons.polarity().tau() == cfg.polarity_tau {
        Cow::Borrowed(lexicons)
    } else {
        Cow::Owned(lexicons.with_tau(cfg.polarity_tau))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AugmentError::Workers(e.to_string()))?;
    let mut order: Vec<&Utterance> = ds.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    let results: Vec<(Vec<AugmentedInstance>, InstanceReport)> = pool.install(|| {
        order
            .par_iter()
            .map(|u| augment_instance(u, cfg, &lexicons, proposer, embedder))
            .collect::<Result<_, _>>()
    })?;

    let mut instances = Vec::new();
    let mut per_instance = Vec::with_capacity(results.len());
    let mut reasons: BTreeMap<FailureReason, usize> = BTreeMap::new();
    for (variants, report) in results {
        instances.extend(variants);
        for s in &report.shortfalls {
            for (r, n) in &s.reasons {
                *reasons.entry(*r).or_default() += n;
            }
        }
        per_instance.push(report);
    }
    let emitted = instances.len();
    let report = GenerationReport {
        strategy: cfg.strategy,
        variants_per_instance: cfg.variants_per_instance,
        instances: ds.len(),
        emitted,
        shortfall: ds.len() * cfg.variants_per_instance - emitted,
        reasons,
        per_instance,
    };
    Ok(AugmentationOutput { instances, report })
}
