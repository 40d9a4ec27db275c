//! The three-level emotion tree (basic → secondary → tertiary) and the
//! mapping from the NRC/Plutchik categories onto the six basic emotions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// The shipped taxonomy file.
pub const DEFAULT_TAXONOMY_CSV: &str = include_str!("../data/taxonomy.csv");

/// One of the six basic emotions. Parsing is case-insensitive; display and
/// serialization always use the capitalized name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicEmotion {
    Anger,
    Love,
    Fear,
    Joy,
    Sadness,
    Surprise,
}

impl BasicEmotion {
    pub const ALL: [BasicEmotion; 6] = [
        BasicEmotion::Anger,
        BasicEmotion::Love,
        BasicEmotion::Fear,
        BasicEmotion::Joy,
        BasicEmotion::Sadness,
        BasicEmotion::Surprise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasicEmotion::Anger => "Anger",
            BasicEmotion::Love => "Love",
            BasicEmotion::Fear => "Fear",
            BasicEmotion::Joy => "Joy",
            BasicEmotion::Sadness => "Sadness",
            BasicEmotion::Surprise => "Surprise",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BasicEmotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown basic emotion '{0}'")]
pub struct UnknownEmotion(pub String);

impl FromStr for BasicEmotion {
    type Err = UnknownEmotion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        BasicEmotion::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(trimmed))
            .ok_or_else(|| UnknownEmotion(trimmed.to_string()))
    }
}

impl Serialize for BasicEmotion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for BasicEmotion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Where a secondary category comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Shaver,
    GoEmotions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyEntry {
    pub basic: BasicEmotion,
    pub secondary: String,
    pub tertiary: Vec<String>,
    pub origin: Origin,
}

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("taxonomy io: {0}")]
    Io(#[from] std::io::Error),
    #[error("taxonomy line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("taxonomy line {line}: secondary emotion '{name}' maps to unknown basic emotion '{basic}'")]
    UnknownBasic { line: u64, name: String, basic: String },
    #[error("duplicate secondary emotion '{name}' (under {first} and {second})")]
    DuplicateSecondary {
        name: String,
        first: BasicEmotion,
        second: BasicEmotion,
    },
    #[error("tertiary emotion '{name}' appears under two basic emotions ({first} and {second})")]
    ConflictingTertiary {
        name: String,
        first: BasicEmotion,
        second: BasicEmotion,
    },
    #[error("unknown emotion name '{name}'; nearest matches: {}", .nearest.join(", "))]
    UnknownName { name: String, nearest: Vec<String> },
}

/// The validated emotion tree.
///
/// Lookups are case-insensitive. A name that exists at several levels (for
/// example "Sadness", which is basic, secondary and never ambiguous) always
/// resolves to the same basic emotion, which `load` checks.
#[derive(Debug, Clone)]
pub struct EmotionTaxonomy {
    entries: Vec<TaxonomyEntry>,
    secondary_index: BTreeMap<String, BasicEmotion>,
    tertiary_index: BTreeMap<String, BasicEmotion>,
}

#[derive(Debug, Deserialize)]
struct TaxonomyRow {
    basic: String,
    secondary: String,
    #[serde(default)]
    tertiary: String,
    origin: String,
}

impl EmotionTaxonomy {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, TaxonomyError> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut entries: Vec<TaxonomyEntry> = Vec::new();
        let mut secondary_index: BTreeMap<String, BasicEmotion> = BTreeMap::new();
        let mut tertiary_index: BTreeMap<String, BasicEmotion> = BTreeMap::new();

        let headers = csv
            .headers()
            .map_err(|e| TaxonomyError::Malformed {
                line: 1,
                message: e.to_string(),
            })?
            .clone();
        for record in csv.records() {
            let record = record.map_err(|e| TaxonomyError::Malformed {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let row: TaxonomyRow = record
                .deserialize(Some(&headers))
                .map_err(|e| TaxonomyError::Malformed {
                    line,
                    message: e.to_string(),
                })?;
            let basic: BasicEmotion =
                row.basic.parse().map_err(|_| TaxonomyError::UnknownBasic {
                    line,
                    name: row.secondary.clone(),
                    basic: row.basic.clone(),
                })?;
            let origin = match row.origin.to_ascii_lowercase().as_str() {
                "shaver" => Origin::Shaver,
                "goemotions" => Origin::GoEmotions,
                other => {
                    return Err(TaxonomyError::Malformed {
                        line,
                        message: format!("unknown origin '{other}'"),
                    })
                }
            };
            if row.secondary.is_empty() {
                return Err(TaxonomyError::Malformed {
                    line,
                    message: "empty secondary emotion".into(),
                });
            }

            let key = row.secondary.to_lowercase();
            if let Some(&first) = secondary_index.get(&key) {
                if first != basic {
                    return Err(TaxonomyError::DuplicateSecondary {
                        name: row.secondary,
                        first,
                        second: basic,
                    });
                }
            }
            secondary_index.insert(key, basic);

            if !row.tertiary.is_empty() {
                let tkey = row.tertiary.to_lowercase();
                if let Some(&first) = tertiary_index.get(&tkey) {
                    if first != basic {
                        return Err(TaxonomyError::ConflictingTertiary {
                            name: row.tertiary,
                            first,
                            second: basic,
                        });
                    }
                }
                tertiary_index.insert(tkey, basic);
            }

            match entries
                .iter_mut()
                .find(|e| e.secondary.eq_ignore_ascii_case(&row.secondary))
            {
                Some(entry) => {
                    if entry.origin != origin {
                        return Err(TaxonomyError::Malformed {
                            line,
                            message: format!(
                                "secondary emotion '{}' listed with two origins",
                                row.secondary
                            ),
                        });
                    }
                    if !row.tertiary.is_empty() {
                        entry.tertiary.push(row.tertiary);
                    }
                }
                None => entries.push(TaxonomyEntry {
                    basic,
                    secondary: row.secondary,
                    tertiary: if row.tertiary.is_empty() {
                        Vec::new()
                    } else {
                        vec![row.tertiary]
                    },
                    origin,
                }),
            }
        }

        Ok(Self {
            entries,
            secondary_index,
            tertiary_index,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TaxonomyError> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(file)
    }

    pub fn entries(&self) -> &[TaxonomyEntry] {
        &self.entries
    }

    pub fn secondaries_of(&self, basic: BasicEmotion) -> impl Iterator<Item = &TaxonomyEntry> {
        self.entries.iter().filter(move |e| e.basic == basic)
    }

    /// Every name known to the tree, at any level.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = BasicEmotion::ALL.iter().map(|e| e.name().to_string()).collect();
        for e in &self.entries {
            out.insert(e.secondary.clone());
            out.extend(e.tertiary.iter().cloned());
        }
        out
    }

    /// Resolves a basic, secondary or tertiary name to its basic emotion.
    pub fn basic_of(&self, name: &str) -> Result<BasicEmotion, TaxonomyError> {
        let key = name.trim().to_lowercase();
        if let Some(&b) = self.tertiary_index.get(&key) {
            return Ok(b);
        }
        if let Some(&b) = self.secondary_index.get(&key) {
            return Ok(b);
        }
        if let Ok(b) = key.parse::<BasicEmotion>() {
            return Ok(b);
        }
        Err(TaxonomyError::UnknownName {
            name: name.to_string(),
            nearest: self.nearest(&key, 3),
        })
    }

    fn nearest(&self, key: &str, n: usize) -> Vec<String> {
        let mut scored: Vec<(usize, String)> = self
            .names()
            .into_iter()
            .map(|candidate| (strsim::levenshtein(key, &candidate.to_lowercase()), candidate))
            .collect();
        scored.sort();
        scored.into_iter().take(n).map(|(_, name)| name).collect()
    }
}

impl Default for EmotionTaxonomy {
    fn default() -> Self {
        Self::from_reader(DEFAULT_TAXONOMY_CSV.as_bytes()).expect("shipped taxonomy is valid")
    }
}

/// Emotion and polarity categories used by the NRC word-emotion lexicon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NrcCategory {
    Anger,
    Anticipation,
    Disgust,
    Fear,
    Joy,
    Negative,
    Positive,
    Sadness,
    Surprise,
    Trust,
}

impl NrcCategory {
    pub const ALL: [NrcCategory; 10] = [
        NrcCategory::Anger,
        NrcCategory::Anticipation,
        NrcCategory::Disgust,
        NrcCategory::Fear,
        NrcCategory::Joy,
        NrcCategory::Negative,
        NrcCategory::Positive,
        NrcCategory::Sadness,
        NrcCategory::Surprise,
        NrcCategory::Trust,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NrcCategory::Anger => "anger",
            NrcCategory::Anticipation => "anticipation",
            NrcCategory::Disgust => "disgust",
            NrcCategory::Fear => "fear",
            NrcCategory::Joy => "joy",
            NrcCategory::Negative => "negative",
            NrcCategory::Positive => "positive",
            NrcCategory::Sadness => "sadness",
            NrcCategory::Surprise => "surprise",
            NrcCategory::Trust => "trust",
        }
    }
}

impl FromStr for NrcCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        NrcCategory::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(trimmed))
            .ok_or_else(|| format!("unknown NRC category '{trimmed}'"))
    }
}

/// Maps NRC categories onto basic emotions: Disgust folds into Anger, the
/// positive module stands in for Love, and Trust, Anticipation and negative
/// have no image.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SchemaMap;

impl SchemaMap {
    pub fn map(&self, category: NrcCategory) -> Option<BasicEmotion> {
        match category {
            NrcCategory::Anger | NrcCategory::Disgust => Some(BasicEmotion::Anger),
            NrcCategory::Positive => Some(BasicEmotion::Love),
            NrcCategory::Fear => Some(BasicEmotion::Fear),
            NrcCategory::Joy => Some(BasicEmotion::Joy),
            NrcCategory::Sadness => Some(BasicEmotion::Sadness),
            NrcCategory::Surprise => Some(BasicEmotion::Surprise),
            NrcCategory::Trust | NrcCategory::Anticipation | NrcCategory::Negative => None,
        }
    }
}
