use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

use rand::seq::{index, SliceRandom};
use rand::RngCore;
use reqwest::blocking::Client;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{detokenize, is_proposal_word, ProposeMode, Token, TokenizedUtterance};
use crate::lexicon::{word_emotions, word_polarity, Lexicons, PolarityClass};
use crate::taxonomy::BasicEmotion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProposalSource {
    Lexicon,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub word: String,
    pub score: f64,
    pub source: ProposalSource,
}

/// Restricts proposals to one emotion bucket or one polarity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    Emotion(BasicEmotion),
    Polarity(PolarityClass),
}

impl Constraint {
    pub fn admits(self, word: &str, lexicons: &Lexicons) -> bool {
        match self {
            Constraint::Emotion(e) => word_emotions(word, lexicons.emotion()).contains(&e),
            Constraint::Polarity(c) => word_polarity(word, lexicons.polarity()) == c,
        }
    }
}

/// Per-call state shared by every proposer.
#[derive(Debug, Clone, Copy)]
pub struct ProposalContext<'a> {
    pub constraint: Option<Constraint>,
    pub lexicons: &'a Lexicons,
    /// Index the resulting edit will have in the trail.
    pub edit_index: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProposerError {
    #[error("proposer unavailable: {0}")]
    Unavailable(String),
    #[error("proposer protocol error: {0}")]
    Protocol(String),
}

/// Source of candidate words for insert and substitute.
///
/// `position` is the token index of the word being replaced, or the token
/// index the inserted word will take.
pub trait Proposer: Send + Sync {
    fn propose(
        &self,
        tu: &TokenizedUtterance,
        position: usize,
        mode: ProposeMode,
        ctx: &ProposalContext<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Proposal>, ProposerError>;
}

fn current_word(tu: &TokenizedUtterance, position: usize, mode: ProposeMode) -> Option<String> {
    match mode {
        ProposeMode::Substitute => tu.tokens.get(position).map(|t| t.text.to_lowercase()),
        ProposeMode::Insert => None,
    }
}

fn lexicon_proposal(word: &str) -> Proposal {
    Proposal {
        word: word.to_string(),
        score: 1.0,
        source: ProposalSource::Lexicon,
    }
}

/// Every lexicon word admitted by `constraint` (the whole emotion-lexicon
/// vocabulary when unconstrained), minus the word being replaced, in seeded
/// order with uniform scores.
pub fn lexicon_propose(
    tu: &TokenizedUtterance,
    position: usize,
    mode: ProposeMode,
    constraint: Option<Constraint>,
    lexicons: &Lexicons,
    rng: &mut dyn RngCore,
) -> Vec<Proposal> {
    let current = current_word(tu, position, mode);
    let mut out: Vec<Proposal> = lexicons
        .pool(constraint)
        .iter()
        .filter(|w| Some(*w) != current.as_ref())
        .map(|w| lexicon_proposal(w))
        .collect();
    out.shuffle(rng);
    out
}

/// Lexicon-backed proposer. With `max_candidates` set, a uniform sample of
/// that many pool words is returned instead of the whole pool; since every
/// lexicon proposal has the same score, the word an operator ends up
/// choosing has the same distribution either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexiconProposer {
    pub max_candidates: Option<usize>,
}

impl Default for LexiconProposer {
    fn default() -> Self {
        Self {
            max_candidates: Some(64),
        }
    }
}

impl LexiconProposer {
    pub fn unbounded() -> Self {
        Self { max_candidates: None }
    }
}

impl Proposer for LexiconProposer {
    fn propose(
        &self,
        tu: &TokenizedUtterance,
        position: usize,
        mode: ProposeMode,
        ctx: &ProposalContext<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Proposal>, ProposerError> {
        let Some(cap) = self.max_candidates else {
            return Ok(lexicon_propose(tu, position, mode, ctx.constraint, ctx.lexicons, rng));
        };
        let pool = ctx.lexicons.pool(ctx.constraint);
        let current = current_word(tu, position, mode);
        let take = (cap + 1).min(pool.len());
        let mut out: Vec<Proposal> = index::sample(rng, pool.len(), take)
            .into_iter()
            .map(|i| &pool[i])
            .filter(|w| Some(*w) != current.as_ref())
            .map(|w| lexicon_proposal(w))
            .collect();
        out.truncate(cap);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalProposerConfig {
    /// Service root, e.g. `http://127.0.0.1:8080`.
    pub url: String,
    pub top_k: usize,
    pub timeout: Duration,
    pub pool_max_idle_per_host: usize,
    /// Fall back to lexicon proposals when the service cannot be reached.
    pub fallback: bool,
}

impl Default for ExternalProposerConfig {
    fn default() -> Self {
        Self {
            url: "http://127.0.0.1:8080".into(),
            top_k: 10,
            timeout: Duration::from_secs(10),
            pool_max_idle_per_host: 8,
            fallback: true,
        }
    }
}

#[derive(Serialize)]
struct ProposeRequest<'a> {
    text: &'a str,
    mode: ProposeMode,
    top_k: usize,
}

#[derive(Deserialize)]
struct ProposeResponse {
    candidates: Vec<Candidate>,
}

#[derive(Deserialize)]
struct Candidate {
    word: String,
    score: f64,
}

/// Client for a model service speaking the `/propose` protocol.
pub struct ExternalProposer {
    http: Client,
    config: ExternalProposerConfig,
    fallback: LexiconProposer,
    warned: AtomicBool,
}

pub const MASK: &str = "<mask>";

impl ExternalProposer {
    pub fn new(config: ExternalProposerConfig) -> Result<Self, ProposerError> {
        let http = Client::builder()
            .timeout(config.timeout)
            .pool_max_idle_per_host(config.pool_max_idle_per_host)
            .build()
            .map_err(|e| ProposerError::Unavailable(e.to_string()))?;
        Ok(Self {
            http,
            config,
            fallback: LexiconProposer::default(),
            warned: AtomicBool::new(false),
        })
    }

    pub fn config(&self) -> &ExternalProposerConfig {
        &self.config
    }

    /// `text` with the target word replaced by (or a new slot filled with)
    /// the mask token.
    pub fn masked_context(tu: &TokenizedUtterance, position: usize, mode: ProposeMode) -> String {
        let mut masked = tu.clone();
        match mode {
            ProposeMode::Substitute => masked.tokens[position].text = MASK.to_string(),
            ProposeMode::Insert => masked.tokens.insert(position.min(masked.tokens.len()), Token::word(MASK)),
        }
        detokenize(&masked)
    }

    /// One `/propose` round trip. Candidates come back sorted by descending
    /// score, at most `top_k` of them; words that are not a single token are
    /// discarded.
    pub fn request(&self, text: &str, mode: ProposeMode, top_k: usize) -> Result<Vec<Proposal>, ProposerError> {
        if top_k == 0 {
            return Ok(Vec::new());
        }
        let url = format!("{}/propose", self.config.url.trim_end_matches('/'));
        let response = self
            .http
            .post(url)
            .json(&ProposeRequest { text, mode, top_k })
            .send()
            .map_err(|e| ProposerError::Unavailable(e.to_string()))?;
        let status = response.status();
        if status == reqwest::StatusCode::SERVICE_UNAVAILABLE {
            return Err(ProposerError::Unavailable(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(ProposerError::Protocol(format!("HTTP {status}")));
        }
        let body: ProposeResponse = response.json().map_err(|e| ProposerError::Protocol(e.to_string()))?;
        let mut out = Vec::with_capacity(body.candidates.len());
        for c in body.candidates {
            if !c.score.is_finite() || !(0.0..=1.0).contains(&c.score) {
                return Err(ProposerError::Protocol(format!("score {} for '{}' outside [0, 1]", c.score, c.word)));
            }
            if is_proposal_word(&c.word) {
                out.push(Proposal {
                    word: c.word,
                    score: c.score,
                    source: ProposalSource::External,
                });
            }
        }
        out.sort_by(|a, b| b.score.total_cmp(&a.score));
        out.truncate(top_k);
        Ok(out)
    }
}

impl Proposer for ExternalProposer {
    fn propose(
        &self,
        tu: &TokenizedUtterance,
        position: usize,
        mode: ProposeMode,
        ctx: &ProposalContext<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<Proposal>, ProposerError> {
        let text = Self::masked_context(tu, position, mode);
        match self.request(&text, mode, self.config.top_k) {
            Ok(candidates) => {
                let current = current_word(tu, position, mode);
                Ok(candidates
                    .into_iter()
                    .filter(|p| Some(p.word.to_lowercase()) != current)
                    .filter(|p| ctx.constraint.is_none_or(|c| c.admits(&p.word, ctx.lexicons)))
                    .collect())
            }
            Err(ProposerError::Unavailable(reason)) if self.config.fallback => {
                if !self.warned.swap(true, Ordering::Relaxed) {
                    log::warn!("model service unavailable ({reason}); using lexicon proposals");
                }
                self.fallback.propose(tu, position, mode, ctx, rng)
            }
            Err(e) => Err(e),
        }
    }
}
