//! Labeled utterance datasets: masking, loading, splitting and fetching.

mod fetch;
mod io;
mod preprocess;
mod split;

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::{BasicEmotion, EmotionTaxonomy};

pub use fetch::{fetch_comments, CommentKind, FetchClient, FetchConfig, FetchError, Sleeper, TOKEN_ENV};
pub use io::{ingest, ingest_reader, write_jsonl, Format};
pub use preprocess::{preprocess_text, CODE, URL, USERNAME};
pub use split::{stratified_split, SplitResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Issue,
    PullRequest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub repo: String,
    pub kind: SourceKind,
}

/// One labeled comment. An empty label set means neutral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub id: String,
    pub raw_text: String,
    pub masked_text: String,
    pub labels: BTreeSet<BasicEmotion>,
    pub secondary_labels: Option<Vec<String>>,
    pub source: Option<Source>,
}

impl Utterance {
    /// Builds an utterance from raw text, masking it on the way in.
    pub fn new(id: impl Into<String>, raw_text: impl Into<String>, labels: impl IntoIterator<Item = BasicEmotion>) -> Self {
        let raw_text = raw_text.into();
        Self {
            id: id.into(),
            masked_text: preprocess_text(&raw_text),
            raw_text,
            labels: labels.into_iter().collect(),
            secondary_labels: None,
            source: None,
        }
    }

    pub fn is_neutral(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record, field '{field}': {message}")]
    Malformed { line: u64, field: String, message: String },
    #[error("line {line}: unknown basic emotion '{label}'")]
    UnknownLabel { line: u64, label: String },
    #[error("duplicate id '{0}'")]
    DuplicateId(String),
    #[error("split ratio {0} outside (0, 1)")]
    InvalidRatio(f64),
    #[error("cannot split an empty dataset")]
    EmptyDataset,
    #[error("instance '{id}': secondary emotion '{name}' {reason}")]
    SecondaryMismatch { id: String, name: String, reason: String },
}

/// Ordered, id-unique collection of utterances.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub instances: Vec<Utterance>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(instances: Vec<Utterance>, provenance: impl Into<String>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(instances.len());
        for u in &instances {
            if !seen.insert(u.id.as_str()) {
                return Err(CorpusError::DuplicateId(u.id.clone()));
            }
        }
        Ok(Self {
            instances,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Utterance> {
        self.instances.iter()
    }

    pub fn ids(&self) -> BTreeSet<&str> {
        self.instances.iter().map(|u| u.id.as_str()).collect()
    }

    /// Number of instances carrying `emotion`.
    pub fn count_labeled(&self, emotion: BasicEmotion) -> usize {
        self.instances.iter().filter(|u| u.labels.contains(&emotion)).count()
    }

    pub fn count_neutral(&self) -> usize {
        self.instances.iter().filter(|u| u.is_neutral()).count()
    }

    /// Checks that every secondary label resolves, through the taxonomy, to
    /// one of the instance's basic labels.
    pub fn validate_secondary(&self, taxonomy: &EmotionTaxonomy) -> Result<(), CorpusError> {
        for u in &self.instances {
            for name in u.secondary_labels.iter().flatten() {
                match taxonomy.basic_of(name) {
                    Ok(basic) if u.labels.contains(&basic) => {}
                    Ok(basic) => {
                        return Err(CorpusError::SecondaryMismatch {
                            id: u.id.clone(),
                            name: name.clone(),
                            reason: format!("belongs to {basic}, which is not among the labels"),
                        })
                    }
                    Err(e) => {
                        return Err(CorpusError::SecondaryMismatch {
                            id: u.id.clone(),
                            name: name.clone(),
                            reason: e.to_string(),
                        })
                    }
                }
            }
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Utterance;
    type IntoIter = std::slice::Iter<'a, Utterance>;

    fn into_iter(self) -> Self::IntoIter {
        self.instances.iter()
    }
}
