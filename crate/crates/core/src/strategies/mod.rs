//! The three augmentation strategies and the dataset augmentation pipeline.

mod embed;
mod generate;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{word_polarity, PolarityClass, PolarityLexicon, DEFAULT_TAU};
use crate::operators::TokenizedUtterance;
use crate::taxonomy::BasicEmotion;

pub use embed::{
    cosine_native, embed_native, similarity_gate, EmbedError, Embedder, ExternalEmbedder, ExternalEmbedderConfig,
    GateResult, SparseVector, TrigramEmbedder,
};
pub use generate::{
    augment_dataset, generate_variant, instance_seed, repair_lexicon, AugmentError, AugmentationOutput,
    AugmentedInstance, Candidate, FailureReason, GenerationReport, InstanceReport, Shortfall,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Unconstrained,
    Lexicon,
    Polarity,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Unconstrained, Strategy::Lexicon, Strategy::Polarity];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Unconstrained => "unconstrained",
            Strategy::Lexicon => "lexicon",
            Strategy::Polarity => "polarity",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown strategy '{s}' (expected unconstrained|lexicon|polarity)"))
    }
}

/// Where insert and substitute candidates come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProposerSpec {
    #[default]
    Lexicon,
    External {
        url: String,
        #[serde(default = "default_true")]
        fallback: bool,
        #[serde(default = "default_top_k")]
        top_k: usize,
    },
}

fn default_true() -> bool {
    true
}

fn default_top_k() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentationConfig {
    pub strategy: Strategy,
    pub variants_per_instance: usize,
    pub ops_fraction: f64,
    pub ops_min: usize,
    pub similarity_threshold: f64,
    pub max_retries: usize,
    pub polarity_tau: f64,
    pub seed: u64,
    pub proposer: ProposerSpec,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Unconstrained,
            variants_per_instance: 10,
            ops_fraction: 0.2,
            ops_min: 2,
            similarity_threshold: 0.9,
            max_retries: 5,
            polarity_tau: DEFAULT_TAU,
            seed: 0,
            proposer: ProposerSpec::Lexicon,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid augmentation config: {0}")]
pub struct ConfigError(pub String);

impl AugmentationConfig {
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.variants_per_instance < 1 {
            return Err(ConfigError("variants_per_instance must be at least 1".into()));
        }
        if !(self.ops_fraction > 0.0 && self.ops_fraction <= 1.0) {
            return Err(ConfigError(format!("ops_fraction {} outside (0, 1]", self.ops_fraction)));
        }
        if !(0.0..=1.0).contains(&self.similarity_threshold) {
            return Err(ConfigError(format!(
                "similarity_threshold {} outside [0, 1]",
                self.similarity_threshold
            )));
        }
        if !(self.polarity_tau >= 0.0 && self.polarity_tau.is_finite()) {
            return Err(ConfigError(format!("polarity_tau {} must be non-negative", self.polarity_tau)));
        }
        Ok(())
    }
}

/// `max(ops_min, floor(ops_fraction * word_len))`.
pub fn ops_count(word_len: usize, cfg: &AugmentationConfig) -> usize {
    // The epsilon keeps products like 0.29 * 100 from flooring to 28.
    let scaled = (cfg.ops_fraction * word_len as f64 + 1e-9).floor() as usize;
    scaled.max(cfg.ops_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarityProfile {
    pub pos_count: usize,
    pub neg_count: usize,
    pub net_sign: i8,
}

impl PolarityProfile {
    pub fn new(pos_count: usize, neg_count: usize) -> Self {
        Self {
            pos_count,
            neg_count,
            net_sign: match pos_count.cmp(&neg_count) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
            },
        }
    }

    /// Counts Positive and Negative word tokens; punctuation and
    /// placeholders are skipped.
    pub fn of(tu: &TokenizedUtterance, lexicon: &PolarityLexicon) -> Self {
        let (mut pos, mut neg) = (0, 0);
        for t in tu.tokens.iter().filter(|t| t.is_word()) {
            match word_polarity(&t.text, lexicon) {
                PolarityClass::Positive => pos += 1,
                PolarityClass::Negative => neg += 1,
                PolarityClass::Neutral => {}
            }
        }
        Self::new(pos, neg)
    }
}

/// Which polarity rule a label set falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarityRule {
    /// Only Love/Joy: positive count may not drop.
    KeepPositive,
    /// Only Anger/Fear/Sadness: negative count may not drop.
    KeepNegative,
    /// Anything else: the sign of `pos − neg` is kept.
    KeepSign,
}

impl PolarityRule {
    pub fn for_labels(labels: &BTreeSet<BasicEmotion>) -> Self {
        use BasicEmotion::*;
        if labels.is_empty() {
            PolarityRule::KeepSign
        } else if labels.iter().all(|e| matches!(e, Love | Joy)) {
            PolarityRule::KeepPositive
        } else if labels.iter().all(|e| matches!(e, Anger | Fear | Sadness)) {
            PolarityRule::KeepNegative
        } else {
            PolarityRule::KeepSign
        }
    }

    /// Polarity class that insert and substitute draw from under this rule.
    pub fn proposal_class(self) -> PolarityClass {
        match self {
            PolarityRule::KeepPositive => PolarityClass::Positive,
            PolarityRule::KeepNegative => PolarityClass::Negative,
            PolarityRule::KeepSign => PolarityClass::Neutral,
        }
    }
}

pub fn polarity_ok(orig: &PolarityProfile, cand: &PolarityProfile, labels: &BTreeSet<BasicEmotion>) -> bool {
    match PolarityRule::for_labels(labels) {
        PolarityRule::KeepPositive => cand.pos_count >= orig.pos_count,
        PolarityRule::KeepNegative => cand.neg_count >= orig.neg_count,
        PolarityRule::KeepSign => cand.net_sign == orig.net_sign,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasicEmotion::*;

    #[test]
    fn op_count_formula() {
        let cfg = AugmentationConfig::default();
        assert_eq!(ops_count(5, &cfg), 2);
        assert_eq!(ops_count(30, &cfg), 6);
        assert_eq!(ops_count(13, &cfg), 2);
        assert_eq!(ops_count(0, &cfg), 2);
        let cfg = AugmentationConfig {
            ops_fraction: 0.29,
            ..cfg
        };
        assert_eq!(ops_count(100, &cfg), 29);
    }

    #[test]
    fn config_validation() {
        assert!(AugmentationConfig::default().validate().is_ok());
        for bad in [
            AugmentationConfig {
                variants_per_instance: 0,
                ..Default::default()
            },
            AugmentationConfig {
                ops_fraction: 0.0,
                ..Default::default()
            },
            AugmentationConfig {
                similarity_threshold: 1.5,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn polarity_rules() {
        let p = PolarityProfile::new;
        assert!(polarity_ok(&p(1, 0), &p(2, 0), &BTreeSet::from([Joy])));
        assert!(!polarity_ok(&p(0, 2), &p(0, 1), &BTreeSet::from([Anger])));
        assert!(polarity_ok(&p(1, 1), &p(2, 2), &BTreeSet::from([Surprise])));
        assert!(!polarity_ok(&p(1, 1), &p(2, 1), &BTreeSet::from([Surprise])));
        assert!(!polarity_ok(&p(2, 0), &p(2, 3), &BTreeSet::from([Love, Anger])));
        assert!(polarity_ok(&p(0, 0), &p(0, 0), &BTreeSet::new()));
    }

    #[test]
    fn rule_groups() {
        assert_eq!(PolarityRule::for_labels(&BTreeSet::from([Love, Joy])), PolarityRule::KeepPositive);
        assert_eq!(PolarityRule::for_labels(&BTreeSet::from([Fear, Sadness])), PolarityRule::KeepNegative);
        assert_eq!(PolarityRule::for_labels(&BTreeSet::from([Joy, Fear])), PolarityRule::KeepSign);
        assert_eq!(PolarityRule::for_labels(&BTreeSet::from([Surprise])), PolarityRule::KeepSign);
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = AugmentationConfig {
            strategy: Strategy::Polarity,
            seed: 42,
            proposer: ProposerSpec::External {
                url: "http://localhost:9000".into(),
                fallback: true,
                top_k: 5,
            },
            ..Default::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(toml::from_str::<AugmentationConfig>(&text).unwrap(), cfg);
        let parsed: AugmentationConfig = toml::from_str("strategy = \"lexicon\"\nproposer = \"lexicon\"\n").unwrap();
        assert_eq!(parsed.strategy, Strategy::Lexicon);
        assert_eq!(parsed.variants_per_instance, 10);
    }
}
