//! The software-engineering emotion lexicon and the word-polarity lexicon.

mod nrc;
mod sentiwordnet;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::operators::{is_proposal_word, Constraint};
use crate::taxonomy::{BasicEmotion, NrcCategory, SchemaMap};

pub use nrc::{load_nrc, parse_nrc, NrcLexicon};
pub use sentiwordnet::{
    load_sentiwordnet, parse_sentiwordnet, word_polarity, PolarityClass, PolarityLexicon, PolarityScores, DEFAULT_TAU,
};

pub const EMOTION_LEXICON_FILE: &str = "emotion_lexicon.json";
pub const POLARITY_LEXICON_FILE: &str = "polarity_lexicon.json";
pub const BUILD_LOG_FILE: &str = "build_log.json";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file} line {line}: {message}")]
    Malformed { file: &'static str, line: u64, message: String },
    #[error("invalid lexicon json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LexiconError {
    pub(crate) fn malformed(file: &'static str, line: u64, message: impl Into<String>) -> Self {
        LexiconError::Malformed {
            file,
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn open(path: &Path) -> Result<File, LexiconError> {
    File::open(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a one-word-per-line list. Blank lines and `#` comments are skipped;
/// words are lowercased.
pub fn parse_word_list<R: Read>(reader: R) -> Result<BTreeSet<String>, LexiconError> {
    let mut out = BTreeSet::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| LexiconError::malformed("word list", idx as u64 + 1, e.to_string()))?;
        let word = line.trim();
        if word.is_empty() || word.starts_with('#') {
            continue;
        }
        out.insert(word.to_lowercase());
    }
    Ok(out)
}

pub fn load_word_list(path: impl AsRef<Path>) -> Result<BTreeSet<String>, LexiconError> {
    parse_word_list(open(path.as_ref())?)
}

/// Word → basic emotions, restricted to words present in both the
/// software-engineering list and the NRC lexicon.
///
/// Each (word, emotion) pair remembers which NRC categories produced it, so
/// that e.g. every Love entry can be traced back to the positive module.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmotionLexicon {
    entries: BTreeMap<String, BTreeMap<BasicEmotion, BTreeSet<NrcCategory>>>,
    buckets: [Vec<String>; 6],
}

impl EmotionLexicon {
    fn from_entries(entries: BTreeMap<String, BTreeMap<BasicEmotion, BTreeSet<NrcCategory>>>) -> Self {
        let mut buckets: [Vec<String>; 6] = Default::default();
        for (word, emotions) in &entries {
            for e in emotions.keys() {
                buckets[e.index()].push(word.clone());
            }
        }
        Self { entries, buckets }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&word.to_lowercase())
    }

    /// Every word, in lexical order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Words carrying `emotion`, in lexical order.
    pub fn bucket(&self, emotion: BasicEmotion) -> &[String] {
        &self.buckets[emotion.index()]
    }

    /// NRC categories that put `word` into `emotion`, if any.
    pub fn provenance(&self, word: &str, emotion: BasicEmotion) -> Option<&BTreeSet<NrcCategory>> {
        self.entries.get(&word.to_lowercase())?.get(&emotion)
    }

    pub fn to_mapping(&self) -> BTreeMap<String, BTreeSet<BasicEmotion>> {
        self.entries
            .iter()
            .map(|(w, m)| (w.clone(), m.keys().copied().collect()))
            .collect()
    }

    /// Serializes as `word → [emotions]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_mapping()).expect("mapping serializes")
    }

    /// Reads the `word → [emotions]` form. Provenance is not part of that
    /// form and comes back empty.
    pub fn from_json(value: serde_json::Value) -> Result<Self, LexiconError> {
        let mapping: BTreeMap<String, BTreeSet<BasicEmotion>> = serde_json::from_value(value)?;
        Ok(Self::from_entries(
            mapping
                .into_iter()
                .filter(|(_, e)| !e.is_empty())
                .map(|(w, e)| (w.to_lowercase(), e.into_iter().map(|e| (e, BTreeSet::new())).collect()))
                .collect(),
        ))
    }
}

/// Intersects the software-engineering word list with the NRC lexicon and
/// maps each word's NRC categories through `map`. Words left without any
/// basic emotion are dropped.
pub fn build_emotion_lexicon(nrc: &NrcLexicon, se_words: &BTreeSet<String>, map: &SchemaMap) -> EmotionLexicon {
    let mut entries = BTreeMap::new();
    for word in se_words {
        let word = word.to_lowercase();
        let Some(categories) = nrc.get(&word) else { continue };
        let mut emotions: BTreeMap<BasicEmotion, BTreeSet<NrcCategory>> = BTreeMap::new();
        for &c in categories {
            if let Some(e) = map.map(c) {
                emotions.entry(e).or_default().insert(c);
            }
        }
        if !emotions.is_empty() {
            entries.insert(word, emotions);
        }
    }
    EmotionLexicon::from_entries(entries)
}

/// Lowercased lookup; absent words have no emotion.
pub fn word_emotions(word: &str, lexicon: &EmotionLexicon) -> BTreeSet<BasicEmotion> {
    lexicon
        .entries
        .get(&word.to_lowercase())
        .map(|m| m.keys().copied().collect())
        .unwrap_or_default()
}

/// Both lexicons, as consumed by the augmentation strategies, plus the
/// word pools proposals are drawn from.
#[derive(Debug, Clone)]
pub struct Lexicons {
    emotion: EmotionLexicon,
    polarity: PolarityLexicon,
    vocabulary: Vec<String>,
    emotion_pools: [Vec<String>; 6],
    polarity_pools: [Vec<String>; 3],
}

/// Entry counts reported after a build.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BuildLog {
    pub nrc_words: usize,
    pub se_words: usize,
    pub se_words_in_nrc: usize,
    pub emotion_lexicon_words: usize,
    pub bucket_sizes: BTreeMap<BasicEmotion, usize>,
    pub polarity_lexicon_words: usize,
    pub polarity_class_sizes: BTreeMap<PolarityClass, usize>,
    pub tau: f64,
}

impl Lexicons {
    pub fn new(emotion: EmotionLexicon, polarity: PolarityLexicon) -> Self {
        let keep = |w: &&str| is_proposal_word(w);
        let vocabulary = emotion.words().filter(keep).map(String::from).collect();
        let emotion_pools = BasicEmotion::ALL.map(|e| {
            emotion
                .bucket(e)
                .iter()
                .map(String::as_str)
                .filter(keep)
                .map(String::from)
                .collect()
        });
        let polarity_pools = PolarityClass::ALL.map(|c| polarity.words_of(c).filter(keep).map(String::from).collect());
        Self {
            emotion,
            polarity,
            vocabulary,
            emotion_pools,
            polarity_pools,
        }
    }

    pub fn empty() -> Self {
        Self::new(EmotionLexicon::default(), PolarityLexicon::new(BTreeMap::new(), DEFAULT_TAU))
    }

    /// Same lexicons with polarity classes recomputed under `tau`.
    pub fn with_tau(&self, tau: f64) -> Self {
        Self::new(self.emotion.clone(), self.polarity.clone().with_tau(tau))
    }

    pub fn emotion(&self) -> &EmotionLexicon {
        &self.emotion
    }

    pub fn polarity(&self) -> &PolarityLexicon {
        &self.polarity
    }

    /// Proposal words admitted by `constraint`, in lexical order. Only
    /// single-token alphabetic words are included.
    pub fn pool(&self, constraint: Option<Constraint>) -> &[String] {
        match constraint {
            None => &self.vocabulary,
            Some(Constraint::Emotion(e)) => &self.emotion_pools[e.index()],
            Some(Constraint::Polarity(c)) => &self.polarity_pools[c.index()],
        }
    }

    /// Builds both lexicons from the three source files.
    pub fn build(nrc: &Path, se_words: &Path, sentiwordnet: &Path, tau: f64) -> Result<(Self, BuildLog), LexiconError> {
        let nrc = load_nrc(nrc)?;
        let se = load_word_list(se_words)?;
        let polarity = load_sentiwordnet(sentiwordnet, tau)?;
        let emotion = build_emotion_lexicon(&nrc, &se, &SchemaMap);
        let log = BuildLog {
            nrc_words: nrc.len(),
            se_words: se.len(),
            se_words_in_nrc: se.iter().filter(|w| nrc.contains_key(*w)).count(),
            emotion_lexicon_words: emotion.len(),
            bucket_sizes: BasicEmotion::ALL.iter().map(|e| (*e, emotion.bucket(*e).len())).collect(),
            polarity_lexicon_words: polarity.len(),
            polarity_class_sizes: PolarityClass::ALL
                .into_iter()
                .map(|c| (c, polarity.words_of(c).count()))
                .collect(),
            tau,
        };
        Ok((Self::new(emotion, polarity), log))
    }

    /// Loads lexicons previously written from [`Lexicons::to_files`].
    pub fn load_dir(dir: &Path, tau: f64) -> Result<Self, LexiconError> {
        let read = |name: &str| -> Result<serde_json::Value, LexiconError> {
            Ok(serde_json::from_reader(BufReader::new(open(&dir.join(name))?))?)
        };
        Ok(Self::new(
            EmotionLexicon::from_json(read(EMOTION_LEXICON_FILE)?)?,
            PolarityLexicon::from_json(read(POLARITY_LEXICON_FILE)?, tau)?,
        ))
    }

    /// Pretty-printed JSON for the two lexicon files.
    pub fn to_files(&self) -> [(&'static str, String); 2] {
        [
            (
                EMOTION_LEXICON_FILE,
                serde_json::to_string_pretty(&self.emotion.to_json()).expect("json"),
            ),
            (
                POLARITY_LEXICON_FILE,
                serde_json::to_string_pretty(&self.polarity.to_json()).expect("json"),
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasicEmotion::*;

    fn nrc(src: &str) -> NrcLexicon {
        parse_nrc(src.as_bytes()).unwrap()
    }

    fn words(ws: &[&str]) -> BTreeSet<String> {
        ws.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn afraid_maps_to_fear_and_negative_is_dropped() {
        let lex = build_emotion_lexicon(&nrc("afraid\tfear\t1\nafraid\tnegative\t1\n"), &words(&["afraid"]), &SchemaMap);
        assert_eq!(word_emotions("afraid", &lex), BTreeSet::from([Fear]));
        assert_eq!(word_emotions("Afraid", &lex), BTreeSet::from([Fear]));
    }

    #[test]
    fn disgust_merges_into_anger() {
        let lex = build_emotion_lexicon(&nrc("yuck\tdisgust\t1\n"), &words(&["yuck"]), &SchemaMap);
        assert_eq!(word_emotions("yuck", &lex), BTreeSet::from([Anger]));
        assert_eq!(lex.provenance("yuck", Anger), Some(&BTreeSet::from([NrcCategory::Disgust])));
    }

    #[test]
    fn joy_and_positive_give_joy_and_love() {
        let lex = build_emotion_lexicon(&nrc("yay\tjoy\t1\nyay\tpositive\t1\n"), &words(&["yay"]), &SchemaMap);
        assert_eq!(word_emotions("yay", &lex), BTreeSet::from([Joy, Love]));
        assert_eq!(lex.bucket(Love), ["yay"]);
    }

    #[test]
    fn unmapped_only_words_are_dropped() {
        let lex = build_emotion_lexicon(
            &nrc("expect\tanticipation\t1\nrely\ttrust\t1\nbug\tnegative\t1\n"),
            &words(&["expect", "rely", "bug"]),
            &SchemaMap,
        );
        assert!(lex.is_empty());
        assert!(word_emotions("expect", &lex).is_empty());
    }

    #[test]
    fn json_form_round_trips_mapping() {
        let lex = build_emotion_lexicon(
            &nrc("yay\tjoy\t1\nyay\tpositive\t1\nugh\tdisgust\t1\n"),
            &words(&["yay", "ugh"]),
            &SchemaMap,
        );
        let back = EmotionLexicon::from_json(lex.to_json()).unwrap();
        assert_eq!(back.to_mapping(), lex.to_mapping());
        assert_eq!(
            lex.to_json(),
            serde_json::json!({"ugh": ["Anger"], "yay": ["Love", "Joy"]})
        );
    }
}
