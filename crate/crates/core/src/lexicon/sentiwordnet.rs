use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::LexiconError;

pub const DEFAULT_TAU: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarityScores {
    pub pos: f64,
    pub neg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarityClass {
    Positive,
    Negative,
    Neutral,
}

impl PolarityClass {
    pub const ALL: [PolarityClass; 3] = [PolarityClass::Positive, PolarityClass::Negative, PolarityClass::Neutral];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Positive iff `pos − neg > tau`, Negative iff `neg − pos > tau`.
    pub fn classify(scores: PolarityScores, tau: f64) -> Self {
        if scores.pos - scores.neg > tau {
            PolarityClass::Positive
        } else if scores.neg - scores.pos > tau {
            PolarityClass::Negative
        } else {
            PolarityClass::Neutral
        }
    }
}

/// Word → synset-averaged positive/negative scores, with the threshold used
/// to turn scores into a [`PolarityClass`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolarityLexicon {
    entries: BTreeMap<String, PolarityScores>,
    tau: f64,
}

impl PolarityLexicon {
    pub fn new(entries: BTreeMap<String, PolarityScores>, tau: f64) -> Self {
        Self { entries, tau }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn scores(&self, word: &str) -> Option<PolarityScores> {
        self.entries.get(&word.to_lowercase()).copied()
    }

    pub fn entries(&self) -> &BTreeMap<String, PolarityScores> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Words of the given class, in lexical order.
    pub fn words_of(&self, class: PolarityClass) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(move |(_, s)| PolarityClass::classify(**s, self.tau) == class)
            .map(|(w, _)| w.as_str())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.entries).expect("scores serialize")
    }

    pub fn from_json(value: serde_json::Value, tau: f64) -> Result<Self, serde_json::Error> {
        Ok(Self::new(serde_json::from_value(value)?, tau))
    }
}

/// Lowercased lookup; absent words are Neutral.
pub fn word_polarity(word: &str, lexicon: &PolarityLexicon) -> PolarityClass {
    lexicon
        .scores(word)
        .map(|s| PolarityClass::classify(s, lexicon.tau))
        .unwrap_or(PolarityClass::Neutral)
}

fn parse_score(field: &str, name: &str, line: u64) -> Result<f64, LexiconError> {
    let value: f64 = field
        .trim()
        .parse()
        .map_err(|_| LexiconError::malformed("sentiwordnet", line, format!("{name} '{field}' is not a number")))?;
    if !(0.0..=1.0).contains(&value) {
        return Err(LexiconError::malformed(
            "sentiwordnet",
            line,
            format!("{name} {value} outside [0, 1]"),
        ));
    }
    Ok(value)
}

/// Parses a SentiWordNet 3.0 file. Each term's scores are the arithmetic
/// mean over every synset row listing it, regardless of part of speech.
pub fn parse_sentiwordnet<R: Read>(reader: R, tau: f64) -> Result<PolarityLexicon, LexiconError> {
    let mut sums: BTreeMap<String, (f64, f64, u32)> = BTreeMap::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|e| LexiconError::malformed("sentiwordnet", line_no, e.to_string()))?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 5 {
            return Err(LexiconError::malformed(
                "sentiwordnet",
                line_no,
                format!("expected at least 5 tab-separated fields, found {}", fields.len()),
            ));
        }
        let pos = parse_score(fields[2], "PosScore", line_no)?;
        let neg = parse_score(fields[3], "NegScore", line_no)?;
        let terms: BTreeSet<String> = fields[4]
            .split_whitespace()
            .map(|t| t.rsplit_once('#').map_or(t, |(term, _)| term).to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        for term in terms {
            let acc = sums.entry(term).or_insert((0.0, 0.0, 0));
            acc.0 += pos;
            acc.1 += neg;
            acc.2 += 1;
        }
    }
    let entries = sums
        .into_iter()
        .map(|(term, (pos, neg, n))| {
            let n = f64::from(n);
            (term, PolarityScores { pos: pos / n, neg: neg / n })
        })
        .collect();
    Ok(PolarityLexicon::new(entries, tau))
}

pub fn load_sentiwordnet(path: impl AsRef<Path>, tau: f64) -> Result<PolarityLexicon, LexiconError> {
    parse_sentiwordnet(super::open(path.as_ref())?, tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "# SentiWordNet v3.0\n# POS\tID\tPosScore\tNegScore\tSynsetTerms\tGloss\n";

    fn parse(rows: &str) -> PolarityLexicon {
        parse_sentiwordnet(format!("{HEADER}{rows}").as_bytes(), DEFAULT_TAU).unwrap()
    }

    #[test]
    fn single_row_mean() {
        let lex = parse("a\t1\t0.75\t0\tnice#2\tpleasant\n");
        assert_eq!(lex.scores("nice"), Some(PolarityScores { pos: 0.75, neg: 0.0 }));
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn multi_row_mean() {
        let lex = parse("a\t1\t0.5\t0\tfine#1\tx\nn\t2\t0.25\t0.25\tfine#3 Okay#1\ty\n");
        let s = lex.scores("fine").unwrap();
        assert!((s.pos - 0.375).abs() < 1e-12 && (s.neg - 0.125).abs() < 1e-12);
        assert_eq!(lex.scores("okay"), Some(PolarityScores { pos: 0.25, neg: 0.25 }));
    }

    #[test]
    fn non_numeric_score_is_an_error() {
        let err = parse_sentiwordnet(format!("{HEADER}a\t1\tlots\t0\tx#1\tg\n").as_bytes(), DEFAULT_TAU).unwrap_err();
        assert!(matches!(err, LexiconError::Malformed { line: 3, .. }), "{err}");
    }

    #[test]
    fn threshold_rule() {
        let lex = PolarityLexicon::new(
            [
                ("up".to_string(), PolarityScores { pos: 0.55, neg: 0.03 }),
                ("meh".to_string(), PolarityScores { pos: 0.2, neg: 0.15 }),
                ("down".to_string(), PolarityScores { pos: 0.0, neg: 0.5 }),
            ]
            .into_iter()
            .collect(),
            0.1,
        );
        assert_eq!(word_polarity("UP", &lex), PolarityClass::Positive);
        assert_eq!(word_polarity("meh", &lex), PolarityClass::Neutral);
        assert_eq!(word_polarity("down", &lex), PolarityClass::Negative);
        assert_eq!(word_polarity("absent", &lex), PolarityClass::Neutral);
    }
}
