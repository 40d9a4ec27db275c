mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use emoaug::corpus::preprocess_text;
use emoaug::eval::{train_baseline, Hyper};
use emoaug::lexicon::Lexicons;
use emoaug::operators::{
    augmentable_length, op_delete, op_insert, op_shuffle, op_substitute, replay_edits, tokenize, EditRecord,
    LexiconProposer, OpKind, OperatorError, ProposalContext, TokenKind, TokenizedUtterance,
};
use emoaug::strategies::{similarity_gate, TrigramEmbedder};
use emoaug::synth;
use emoaug::taxonomy::BasicEmotion;

fn lexicons() -> &'static Lexicons {
    static LEX: OnceLock<Lexicons> = OnceLock::new();
    LEX.get_or_init(common::lexicons)
}

fn placeholder_counts(tu: &TokenizedUtterance) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for t in tu.tokens.iter().filter(|t| t.kind == TokenKind::Placeholder) {
        *out.entry(t.text.clone()).or_insert(0) += 1;
    }
    out
}

fn sorted_texts(tu: &TokenizedUtterance) -> Vec<String> {
    let mut v: Vec<String> = tu.tokens.iter().map(|t| t.text.clone()).collect();
    v.sort();
    v
}

/// A masked synthetic comment with mentions, links and code spans.
fn masked_comment(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=4);
    let cues: Vec<&str> = (0..rng.random_range(0..3))
        .map(|i| synth::lexicon_cues(BasicEmotion::ALL[(seed as usize + i) % 6])[0])
        .collect();
    let raw = synth::comment(&mut rng, n, &cues, true);
    format!(
        "@reviewer {} see https://x.org/{seed} and `cargo build`",
        preprocess_text(&raw)
    )
}

/// Applies one random operator; `None` when it does not apply.
fn random_op(tu: &TokenizedUtterance, op: OpKind, rng: &mut ChaCha8Rng) -> Option<(TokenizedUtterance, EditRecord)> {
    let proposer = LexiconProposer::default();
    let ctx = ProposalContext {
        constraint: None,
        lexicons: lexicons(),
        edit_index: 0,
    };
    let words = tu.word_positions();
    let res = match op {
        OpKind::Insert => op_insert(tu, rng.random_range(0..=words.len()), &proposer, &ctx, rng),
        OpKind::Substitute if !words.is_empty() => {
            op_substitute(tu, words[rng.random_range(0..words.len())], &proposer, &ctx, rng)
        }
        OpKind::Delete if !words.is_empty() => op_delete(tu, words[rng.random_range(0..words.len())]),
        OpKind::Shuffle => op_shuffle(tu, rng),
        _ => return None,
    };
    match res {
        Ok(r) => Some(r),
        Err(OperatorError::Failure { .. }) => None,
        Err(e) => panic!("unexpected operator error: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn operators_keep_placeholders_and_change_lengths_as_stated(seed in any::<u64>(), op_i in 0usize..4) {
        let tu = tokenize(&masked_comment(seed % 5000));
        let op = OpKind::ALL[op_i];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some((out, edit)) = random_op(&tu, op, &mut rng) else { return Ok(()) };
        prop_assert!(edit.is_well_formed());
        prop_assert_eq!(placeholder_counts(&out), placeholder_counts(&tu));
        let (before, after) = (augmentable_length(&tu), augmentable_length(&out));
        match op {
            OpKind::Insert => {
                prop_assert_eq!(out.len(), tu.len() + 1);
                prop_assert_eq!(after, before + 1);
            }
            OpKind::Substitute => {
                prop_assert_eq!(out.len(), tu.len());
                prop_assert_eq!(after, before);
                let i = edit.index.unwrap();
                prop_assert_ne!(&out.tokens[i].text, &tu.tokens[i].text);
            }
            OpKind::Delete => {
                prop_assert_eq!(out.len(), tu.len() - 1);
                prop_assert_eq!(after, before - 1);
                prop_assert!(after >= 1);
            }
            OpKind::Shuffle => {
                prop_assert_eq!(sorted_texts(&out), sorted_texts(&tu));
                prop_assert_eq!(out.sentence_bounds.len(), tu.sentence_bounds.len());
                let perm = edit.permutation.clone().unwrap();
                prop_assert!(perm.iter().enumerate().any(|(i, &p)| i != p));
            }
        }
        // Non-placeholder, non-word tokens are never edited either.
        let punct = |t: &TokenizedUtterance| {
            let mut v: Vec<String> = t.tokens.iter().filter(|t| t.kind == TokenKind::Punct).map(|t| t.text.clone()).collect();
            v.sort();
            v
        };
        prop_assert_eq!(punct(&out), punct(&tu));
        prop_assert_eq!(replay_edits(&tu, std::slice::from_ref(&edit)).unwrap().text(), out.text());
        let covered: usize = out.sentence_bounds.iter().map(|r| r.len()).sum();
        prop_assert_eq!(covered, out.len());
    }

    #[test]
    fn operators_are_deterministic_per_seed(seed in any::<u64>(), op_i in 0usize..4) {
        let tu = tokenize(&masked_comment(seed % 5000));
        let op = OpKind::ALL[op_i];
        let a = random_op(&tu, op, &mut ChaCha8Rng::seed_from_u64(seed));
        let b = random_op(&tu, op, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gate_passes_are_monotone_in_threshold(seed in 0u64..5000, t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
        let text = masked_comment(seed);
        let tu = tokenize(&text);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some((out, _)) = random_op(&tu, OpKind::Substitute, &mut rng) else { return Ok(()) };
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let g_lo = similarity_gate(&text, &out.text(), &TrigramEmbedder, lo).unwrap();
        let g_hi = similarity_gate(&text, &out.text(), &TrigramEmbedder, hi).unwrap();
        prop_assert_eq!(g_lo.similarity, g_hi.similarity);
        prop_assert!(!g_hi.pass || g_lo.pass);
    }
}

#[test]
fn placeholders_survive_a_thousand_chained_edits() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let start = tokenize(&masked_comment(11));
    let expected = placeholder_counts(&start);
    let mut tu = start.clone();
    let mut applied = 0;
    let mut steps = 0;
    while applied < 1000 {
        steps += 1;
        assert!(steps < 10_000, "operators stopped applying");
        let op = OpKind::ALL[rng.random_range(0..4)];
        if let Some((next, _)) = random_op(&tu, op, &mut rng) {
            tu = next;
            applied += 1;
            assert_eq!(placeholder_counts(&tu), expected, "after {applied} edits");
            assert!(augmentable_length(&tu) >= 1);
        }
    }
}

#[test]
fn predictions_do_not_depend_on_test_order() {
    let train = synth::mixed_corpus(120, 4);
    let test = synth::mixed_corpus(40, 5);
    let model = train_baseline(&train, &Hyper::default()).unwrap();
    let forward: BTreeMap<_, _> = model.predict(&test).into_iter().map(|p| (p.id, p.predicted)).collect();
    let mut reversed = test.clone();
    reversed.instances.reverse();
    let backward: BTreeMap<_, _> = model
        .predict(&reversed)
        .into_iter()
        .map(|p| (p.id, p.predicted))
        .collect();
    assert_eq!(forward, backward);
    for u in &test {
        assert_eq!(model.predict_text(&u.masked_text), forward[&u.id]);
    }
}
