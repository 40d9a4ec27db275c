//! Tokenization and the four edit operators.
//!
//! Operators take positions chosen by the caller and an RNG for tie-breaking,
//! and return the edited utterance with an [`EditRecord`]. None of them ever
//! touches a placeholder or punctuation token.

mod propose;
mod tokenize;

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use propose::{
    lexicon_propose, Constraint, ExternalProposer, ExternalProposerConfig, LexiconProposer, Proposal,
    ProposalContext, ProposalSource, Proposer, ProposerError, MASK,
};
pub use tokenize::{
    augmentable_length, detokenize, is_proposal_word, sentence_bounds, tokenize, Token, TokenKind,
    TokenizedUtterance, PLACEHOLDERS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Insert,
    Substitute,
    Delete,
    Shuffle,
}

impl OpKind {
    pub const ALL: [OpKind; 4] = [OpKind::Insert, OpKind::Substitute, OpKind::Delete, OpKind::Shuffle];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Insert => "insert",
            OpKind::Substitute => "substitute",
            OpKind::Delete => "delete",
            OpKind::Shuffle => "shuffle",
        }
    }
}

/// Insert and substitute proposals are requested in one of these modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProposeMode {
    Insert,
    Substitute,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditRecord {
    pub op: OpKind,
    /// Token position after the edit for insert, before it otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub before: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after: Option<String>,
    /// Shuffle only: new position `i` holds old sentence `permutation[i]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    /// Set on lexicon repairs: index of the edit whose word was replaced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repairs: Option<usize>,
}

impl EditRecord {
    fn new(op: OpKind, index: Option<usize>, before: Option<String>, after: Option<String>) -> Self {
        Self {
            op,
            index,
            before,
            after,
            permutation: None,
            repairs: None,
        }
    }

    /// Whether the optional fields match the shape required by `op`.
    pub fn is_well_formed(&self) -> bool {
        let has = (self.index.is_some(), self.before.is_some(), self.after.is_some());
        match self.op {
            OpKind::Insert => has == (true, false, true),
            OpKind::Delete => has == (true, true, false),
            OpKind::Substitute => has == (true, true, true),
            OpKind::Shuffle => has == (false, false, false) && self.permutation.is_some(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    /// The operator cannot apply here; the caller may try elsewhere.
    #[error("{op} not applicable: {reason}")]
    Failure { op: &'static str, reason: String },
    #[error("{op} precondition violated: {reason}")]
    Precondition { op: &'static str, reason: String },
    #[error(transparent)]
    Proposer(#[from] ProposerError),
}

fn failure(op: OpKind, reason: impl Into<String>) -> OperatorError {
    OperatorError::Failure {
        op: op.name(),
        reason: reason.into(),
    }
}

fn precondition(op: OpKind, reason: impl Into<String>) -> OperatorError {
    OperatorError::Precondition {
        op: op.name(),
        reason: reason.into(),
    }
}

/// Token index at which a word inserted into gap `gap` lands. Gap `g` sits
/// before the `g`-th word; the last gap sits right after the last word.
pub fn gap_to_token(tu: &TokenizedUtterance, gap: usize) -> Option<usize> {
    let words = tu.word_positions();
    match gap.cmp(&words.len()) {
        Ordering::Less => Some(words[gap]),
        Ordering::Equal => words.last().map(|&w| w + 1),
        Ordering::Greater => None,
    }
}

/// Highest score wins; ties are broken uniformly.
fn choose<R: Rng + ?Sized>(proposals: &[Proposal], rng: &mut R) -> Option<Proposal> {
    let best = proposals.iter().map(|p| p.score).fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<&Proposal> = proposals.iter().filter(|p| p.score == best).collect();
    if top.is_empty() {
        return None;
    }
    Some(top[rng.random_range(0..top.len())].clone())
}

fn insert_at(tu: &mut TokenizedUtterance, at: usize, mut token: Token) {
    let owner = tu
        .sentence_bounds
        .iter()
        .position(|r| r.contains(&at))
        .unwrap_or(tu.sentence_bounds.len().saturating_sub(1));
    if let Some(next) = tu.tokens.get_mut(at).filter(|t| t.is_word()) {
        token.glued = next.glued;
        next.glued = false;
    } else {
        token.glued = false;
    }
    tu.tokens.insert(at, token);
    if tu.sentence_bounds.is_empty() {
        tu.sentence_bounds.push(0..tu.tokens.len());
        return;
    }
    for (i, r) in tu.sentence_bounds.iter_mut().enumerate() {
        if i == owner {
            r.end += 1;
        } else if i > owner {
            r.start += 1;
            r.end += 1;
        }
    }
}

fn remove_at(tu: &mut TokenizedUtterance, at: usize) -> Token {
    let token = tu.tokens.remove(at);
    let mut bounds = Vec::with_capacity(tu.sentence_bounds.len());
    for r in &tu.sentence_bounds {
        let start = if r.start > at { r.start - 1 } else { r.start };
        let end = if r.end > at { r.end - 1 } else { r.end };
        if start < end {
            bounds.push(start..end);
        }
    }
    tu.sentence_bounds = bounds;
    token
}

/// Inserts the proposer's best word into word gap `gap`.
pub fn op_insert<R: Rng>(
    tu: &TokenizedUtterance,
    gap: usize,
    proposer: &dyn Proposer,
    ctx: &ProposalContext<'_>,
    rng: &mut R,
) -> Result<(TokenizedUtterance, EditRecord), OperatorError> {
    if augmentable_length(tu) == 0 {
        return Err(failure(OpKind::Insert, "no word gaps"));
    }
    let at = gap_to_token(tu, gap).ok_or_else(|| precondition(OpKind::Insert, format!("gap {gap} out of range")))?;
    let proposals = proposer.propose(tu, at, ProposeMode::Insert, ctx, rng as &mut dyn RngCore)?;
    let chosen = choose(&proposals, rng).ok_or_else(|| failure(OpKind::Insert, "no candidates"))?;
    let mut out = tu.clone();
    let mut token = Token::word(chosen.word.clone());
    token.introduced_by = Some(ctx.edit_index);
    insert_at(&mut out, at, token);
    Ok((out, EditRecord::new(OpKind::Insert, Some(at), None, Some(chosen.word))))
}

/// Replaces the word at token `index` with the proposer's best word.
pub fn op_substitute<R: Rng>(
    tu: &TokenizedUtterance,
    index: usize,
    proposer: &dyn Proposer,
    ctx: &ProposalContext<'_>,
    rng: &mut R,
) -> Result<(TokenizedUtterance, EditRecord), OperatorError> {
    let target = tu
        .tokens
        .get(index)
        .ok_or_else(|| precondition(OpKind::Substitute, format!("index {index} out of range")))?;
    if !target.is_word() {
        return Err(precondition(
            OpKind::Substitute,
            format!("token {index} '{}' is not a word", target.text),
        ));
    }
    let proposals = proposer.propose(tu, index, ProposeMode::Substitute, ctx, rng as &mut dyn RngCore)?;
    let chosen = choose(&proposals, rng).ok_or_else(|| failure(OpKind::Substitute, "no candidates"))?;
    let mut out = tu.clone();
    let before = std::mem::replace(&mut out.tokens[index].text, chosen.word.clone());
    out.tokens[index].introduced_by = Some(ctx.edit_index);
    Ok((out, EditRecord::new(OpKind::Substitute, Some(index), Some(before), Some(chosen.word))))
}

/// Removes the word at token `index`. The last remaining word is never
/// deleted.
pub fn op_delete(tu: &TokenizedUtterance, index: usize) -> Result<(TokenizedUtterance, EditRecord), OperatorError> {
    if augmentable_length(tu) < 2 {
        return Err(failure(OpKind::Delete, "fewer than two words"));
    }
    let target = tu
        .tokens
        .get(index)
        .ok_or_else(|| precondition(OpKind::Delete, format!("index {index} out of range")))?;
    if !target.is_word() {
        return Err(precondition(
            OpKind::Delete,
            format!("token {index} '{}' is not a word", target.text),
        ));
    }
    let mut out = tu.clone();
    let removed = remove_at(&mut out, index);
    Ok((out, EditRecord::new(OpKind::Delete, Some(index), Some(removed.text), None)))
}

/// Reorders whole sentences with a seeded permutation other than the
/// identity.
pub fn op_shuffle<R: Rng + ?Sized>(
    tu: &TokenizedUtterance,
    rng: &mut R,
) -> Result<(TokenizedUtterance, EditRecord), OperatorError> {
    let n = tu.sentence_bounds.len();
    if n < 2 {
        return Err(failure(OpKind::Shuffle, "fewer than two sentences"));
    }
    let identity: Vec<usize> = (0..n).collect();
    let mut perm = identity.clone();
    while perm == identity {
        perm.shuffle(rng);
    }
    let out = permute_sentences(tu, &perm);
    let mut record = EditRecord::new(OpKind::Shuffle, None, None, None);
    record.permutation = Some(perm);
    Ok((out, record))
}

fn permute_sentences(tu: &TokenizedUtterance, perm: &[usize]) -> TokenizedUtterance {
    let mut tokens = Vec::with_capacity(tu.tokens.len());
    let mut bounds = Vec::with_capacity(perm.len());
    for &old in perm {
        let range = tu.sentence_bounds[old].clone();
        let start = tokens.len();
        tokens.extend_from_slice(&tu.tokens[range]);
        tokens[start].glued = false;
        bounds.push(start..tokens.len());
    }
    TokenizedUtterance {
        tokens,
        sentence_bounds: bounds,
    }
}

/// Re-applies a recorded edit, checking that recorded `before` tokens match.
pub fn apply_edit(tu: &TokenizedUtterance, edit: &EditRecord) -> Result<TokenizedUtterance, OperatorError> {
    if !edit.is_well_formed() {
        return Err(precondition(edit.op, "malformed edit record"));
    }
    let mismatch = |i: usize| precondition(edit.op, format!("recorded token does not match position {i}"));
    match edit.op {
        OpKind::Insert => {
            let at = edit.index.expect("well formed");
            let valid = (0..=augmentable_length(tu)).any(|g| gap_to_token(tu, g) == Some(at));
            if !valid {
                return Err(mismatch(at));
            }
            let mut out = tu.clone();
            insert_at(&mut out, at, Token::word(edit.after.clone().expect("well formed")));
            Ok(out)
        }
        OpKind::Substitute => {
            let at = edit.index.expect("well formed");
            match tu.tokens.get(at) {
                Some(t) if t.is_word() && Some(&t.text) == edit.before.as_ref() => {
                    let mut out = tu.clone();
                    out.tokens[at].text = edit.after.clone().expect("well formed");
                    Ok(out)
                }
                _ => Err(mismatch(at)),
            }
        }
        OpKind::Delete => {
            let at = edit.index.expect("well formed");
            match tu.tokens.get(at) {
                Some(t) if Some(&t.text) == edit.before.as_ref() => Ok(op_delete(tu, at)?.0),
                _ => Err(mismatch(at)),
            }
        }
        OpKind::Shuffle => {
            let perm = edit.permutation.as_ref().expect("well formed");
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (0..tu.sentence_bounds.len()).collect::<Vec<_>>() {
                return Err(precondition(OpKind::Shuffle, "permutation does not match sentence count"));
            }
            Ok(permute_sentences(tu, perm))
        }
    }
}

/// Replays a whole edit trail from `tu`.
pub fn replay_edits(tu: &TokenizedUtterance, edits: &[EditRecord]) -> Result<TokenizedUtterance, OperatorError> {
    edits.iter().try_fold(tu.clone(), |acc, e| apply_edit(&acc, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Lexicons;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Fixed(Vec<(&'static str, f64)>);

    impl Proposer for Fixed {
        fn propose(
            &self,
            _: &TokenizedUtterance,
            _: usize,
            _: ProposeMode,
            _: &ProposalContext<'_>,
            _: &mut dyn rand::RngCore,
        ) -> Result<Vec<Proposal>, ProposerError> {
            Ok(self
                .0
                .iter()
                .map(|(w, s)| Proposal {
                    word: w.to_string(),
                    score: *s,
                    source: ProposalSource::Lexicon,
                })
                .collect())
        }
    }

    fn ctx(lex: &Lexicons) -> ProposalContext<'_> {
        ProposalContext {
            constraint: None,
            lexicons: lex,
            edit_index: 0,
        }
    }

    #[test]
    fn insert_single_candidate() {
        let lex = Lexicons::empty();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tu = tokenize("this is good");
        let (out, edit) = op_insert(&tu, 2, &Fixed(vec![("really", 0.9)]), &ctx(&lex), &mut rng).unwrap();
        assert_eq!(out.text(), "this is really good");
        assert_eq!(edit, EditRecord::new(OpKind::Insert, Some(2), None, Some("really".into())));
        assert!(edit.is_well_formed());
    }

    #[test]
    fn insert_into_wordless_utterance_fails() {
        let lex = Lexicons::empty();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = op_insert(&tokenize("<code>"), 0, &Fixed(vec![("x", 1.0)]), &ctx(&lex), &mut rng).unwrap_err();
        assert!(matches!(err, OperatorError::Failure { .. }));
    }

    #[test]
    fn insert_keeps_glue_before_word() {
        let lex = Lexicons::empty();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tu = tokenize("see (docs) now.");
        let (out, _) = op_insert(&tu, 1, &Fixed(vec![("new", 1.0)]), &ctx(&lex), &mut rng).unwrap();
        assert_eq!(out.text(), "see (new docs) now.");
        let (out, _) = op_insert(&tu, 3, &Fixed(vec![("please", 1.0)]), &ctx(&lex), &mut rng).unwrap();
        assert_eq!(out.text(), "see (docs) now please.");
    }

    #[test]
    fn substitute_reviewing() {
        let lex = Lexicons::empty();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tu = tokenize("This looks great, thanks for clarifying the docs.");
        let at = tu.tokens.iter().position(|t| t.text == "clarifying").unwrap();
        let (out, edit) = op_substitute(&tu, at, &Fixed(vec![("reviewing", 0.8)]), &ctx(&lex), &mut rng).unwrap();
        assert!(out.text().ends_with("thanks for reviewing the docs."));
        assert_eq!(edit.before.as_deref(), Some("clarifying"));
    }

    #[test]
    fn substitute_placeholder_is_rejected() {
        let lex = Lexicons::empty();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = op_substitute(&tokenize("<code> fails"), 0, &Fixed(vec![("x", 1.0)]), &ctx(&lex), &mut rng)
            .unwrap_err();
        assert!(matches!(err, OperatorError::Precondition { .. }));
    }

    #[test]
    fn ties_are_seeded() {
        let lex = Lexicons::empty();
        let p = Fixed(vec![("a", 0.5), ("b", 0.5), ("c", 0.5), ("low", 0.1)]);
        let tu = tokenize("one two");
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            op_insert(&tu, 1, &p, &ctx(&lex), &mut rng).unwrap()
        };
        assert_eq!(run(5), run(5));
        let picked: std::collections::BTreeSet<_> = (0..40).map(|s| run(s).1.after.unwrap()).collect();
        assert_eq!(picked, ["a", "b", "c"].map(String::from).into());
    }

    #[test]
    fn delete_guards_and_definition() {
        assert!(matches!(op_delete(&tokenize("ok"), 0), Err(OperatorError::Failure { .. })));
        let tu = tokenize("this is really good");
        let (out, edit) = op_delete(&tu, 2).unwrap();
        assert_eq!(out.text(), "this is good");
        assert_eq!(edit.before.as_deref(), Some("really"));
        assert!(matches!(op_delete(&tokenize("a <url> b"), 1), Err(OperatorError::Precondition { .. })));
    }

    #[test]
    fn shuffle_two_sentences_swaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(op_shuffle(&tokenize("Just one."), &mut rng), Err(OperatorError::Failure { .. })));
        let (out, edit) = op_shuffle(&tokenize("First part. Second part!"), &mut rng).unwrap();
        assert_eq!(out.text(), "Second part! First part.");
        assert_eq!(edit.permutation, Some(vec![1, 0]));
    }

    #[test]
    fn shuffle_unterminated_last_sentence_keeps_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tu = tokenize("Fixed it. thanks");
        let (out, _) = op_shuffle(&tu, &mut rng).unwrap();
        assert_eq!(out.text(), "thanks Fixed it.");
        assert_eq!(out.sentence_bounds, vec![0..1, 1..4]);
    }

    #[test]
    fn replay_reproduces_trail() {
        let lex = Lexicons::empty();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let tu = tokenize("A first one. Then <code> again! Last bit here.");
        let (a, e1) = op_insert(&tu, 3, &Fixed(vec![("nice", 1.0)]), &ctx(&lex), &mut rng).unwrap();
        let (b, e2) = op_shuffle(&a, &mut rng).unwrap();
        let w = b.word_positions()[2];
        let (c, e3) = op_delete(&b, w).unwrap();
        let replayed = replay_edits(&tu, &[e1, e2, e3]).unwrap();
        assert_eq!(replayed.text(), c.text());
        assert_eq!(replayed.sentence_bounds, c.sentence_bounds);
    }
}
