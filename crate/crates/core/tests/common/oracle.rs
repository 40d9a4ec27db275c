use std::collections::{BTreeMap, BTreeSet};

use emoaug::taxonomy::BasicEmotion;

/// Expected mapping worked out by hand from the fixture files: every
/// software-engineering word found in the NRC file, with its NRC emotion
/// categories mapped (anger and disgust to Anger, positive to Love, the
/// rest by name; trust, anticipation and negative dropped). Words left with
/// no emotion are absent.
const EXPECTED: &[(&str, &[&str])] = &[
    ("afraid", &["Fear"]),
    ("angry", &["Anger"]),
    ("annoying", &["Anger"]),
    ("astonishing", &["Love", "Surprise"]),
    ("awesome", &["Love"]),
    ("awful", &["Anger", "Fear", "Sadness"]),
    ("bad", &["Anger", "Fear", "Sadness"]),
    ("cheerful", &["Joy", "Love"]),
    ("curious", &["Surprise"]),
    ("delighted", &["Joy", "Love"]),
    ("disappointed", &["Anger", "Sadness"]),
    ("dread", &["Fear"]),
    ("excited", &["Joy", "Love", "Surprise"]),
    ("fun", &["Joy", "Love"]),
    ("furious", &["Anger"]),
    ("glad", &["Joy", "Love"]),
    ("good", &["Joy", "Love", "Surprise"]),
    ("gross", &["Anger"]),
    ("happy", &["Joy", "Love"]),
    ("hate", &["Anger", "Fear", "Sadness"]),
    ("helpful", &["Love"]),
    ("irritating", &["Anger"]),
    ("kind", &["Love"]),
    ("lonely", &["Sadness"]),
    ("lovely", &["Love"]),
    ("nervous", &["Fear"]),
    ("panic", &["Fear"]),
    ("regret", &["Sadness"]),
    ("ridiculous", &["Anger"]),
    ("sad", &["Sadness"]),
    ("scary", &["Fear"]),
    ("shocked", &["Surprise"]),
    ("sorry", &["Sadness"]),
    ("sudden", &["Fear", "Surprise"]),
    ("surprised", &["Surprise"]),
    ("unexpected", &["Surprise"]),
    ("unhappy", &["Anger", "Sadness"]),
    ("wonderful", &["Love"]),
    ("worried", &["Fear"]),
    ("worse", &["Sadness"]),
    ("wow", &["Surprise"]),
];

pub fn emotion_lexicon() -> BTreeMap<String, BTreeSet<BasicEmotion>> {
    EXPECTED
        .iter()
        .map(|(w, es)| (w.to_string(), es.iter().map(|e| e.parse().unwrap()).collect()))
        .collect()
}
