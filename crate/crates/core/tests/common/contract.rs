//! Independent re-check of every augmented instance against its parent.

use std::collections::BTreeMap;

use emoaug::corpus::{Dataset, Utterance};
use emoaug::lexicon::{word_emotions, word_polarity, Lexicons, PolarityClass};
use emoaug::operators::{augmentable_length, replay_edits, tokenize, OpKind, TokenKind};
use emoaug::strategies::{cosine_native, AugmentationConfig, AugmentationOutput, AugmentedInstance, Strategy};
use emoaug::taxonomy::BasicEmotion;

fn word_counts(text: &str) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for t in tokenize(text).tokens.iter().filter(|t| t.is_word()) {
        *out.entry(t.text.to_lowercase()).or_insert(0) += 1;
    }
    out
}

fn placeholders(text: &str) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for t in tokenize(text)
        .tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Placeholder)
    {
        *out.entry(t.text.clone()).or_insert(0) += 1;
    }
    out
}

fn pos_neg(text: &str, lex: &Lexicons) -> (usize, usize) {
    let (mut p, mut n) = (0, 0);
    for t in tokenize(text).tokens.iter().filter(|t| t.is_word()) {
        match word_polarity(&t.text, lex.polarity()) {
            PolarityClass::Positive => p += 1,
            PolarityClass::Negative => n += 1,
            PolarityClass::Neutral => {}
        }
    }
    (p, n)
}

fn polarity_holds(
    labels: &std::collections::BTreeSet<BasicEmotion>,
    before: (usize, usize),
    after: (usize, usize),
) -> bool {
    use BasicEmotion::*;
    let positive_only = !labels.is_empty() && labels.iter().all(|e| matches!(e, Joy | Love));
    let negative_only = !labels.is_empty() && labels.iter().all(|e| matches!(e, Anger | Fear | Sadness));
    if positive_only {
        after.0 >= before.0
    } else if negative_only {
        after.1 >= before.1
    } else {
        (before.0 as i64 - before.1 as i64).signum() == (after.0 as i64 - after.1 as i64).signum()
    }
}

/// Violations found in one variant, empty when it satisfies the contract.
pub fn check_variant(
    parent: &Utterance,
    v: &AugmentedInstance,
    cfg: &AugmentationConfig,
    lex: &Lexicons,
) -> Vec<String> {
    let mut bad = Vec::new();
    let mut fail = |what: String| bad.push(format!("{}: {what}", v.id));
    if v.labels != parent.labels {
        fail("label set changed".into());
    }
    if v.similarity < cfg.similarity_threshold {
        fail(format!("similarity {} below threshold", v.similarity));
    }
    let sim = cosine_native(&parent.masked_text, &v.text);
    if (sim - v.similarity).abs() > 1e-12 {
        fail(format!("recorded similarity {} but recomputed {sim}", v.similarity));
    }
    let len = augmentable_length(&tokenize(&parent.masked_text));
    let required = ((len as f64 * cfg.ops_fraction + 1e-9).floor() as usize).max(cfg.ops_min);
    let primary = v.edits.iter().filter(|e| e.repairs.is_none()).count();
    if primary < required {
        fail(format!("{primary} edits, need at least {required}"));
    }
    if v.edits.iter().filter(|e| e.op == OpKind::Shuffle).count() > 1 {
        fail("more than one shuffle".into());
    }
    if v.edits.iter().any(|e| !e.is_well_formed()) {
        fail("malformed edit record".into());
    }
    if placeholders(&v.text) != placeholders(&parent.masked_text) {
        fail("placeholder tokens changed".into());
    }
    match replay_edits(&tokenize(&parent.masked_text), &v.edits) {
        Ok(tu) if tu.text() == v.text => {}
        Ok(tu) => fail(format!("edit trail replays to {:?}", tu.text())),
        Err(e) => fail(format!("edit trail does not replay: {e}")),
    }
    match cfg.strategy {
        Strategy::Lexicon => {
            let before = word_counts(&parent.masked_text);
            for (w, n) in word_counts(&v.text) {
                if n > before.get(&w).copied().unwrap_or(0) {
                    let em = word_emotions(&w, lex.emotion());
                    if !em.is_empty() && em.is_disjoint(&v.labels) {
                        fail(format!("introduced '{w}' {em:?} conflicts with labels"));
                    }
                }
            }
        }
        Strategy::Polarity => {
            if !polarity_holds(&v.labels, pos_neg(&parent.masked_text, lex), pos_neg(&v.text, lex)) {
                fail("polarity rule violated".into());
            }
            for e in v.edits.iter().filter(|e| e.op == OpKind::Delete) {
                let w = e.before.as_deref().unwrap_or_default();
                if word_polarity(w, lex.polarity()) != PolarityClass::Neutral {
                    fail(format!("deleted polar word '{w}'"));
                }
            }
        }
        Strategy::Unconstrained => {}
    }
    bad
}

/// Checks a whole augmentation run; returns every violation found.
pub fn check_output(ds: &Dataset, out: &AugmentationOutput, cfg: &AugmentationConfig, lex: &Lexicons) -> Vec<String> {
    let parents: BTreeMap<&str, &Utterance> = ds.iter().map(|u| (u.id.as_str(), u)).collect();
    let mut bad = Vec::new();
    let mut per_parent: BTreeMap<&str, usize> = BTreeMap::new();
    let mut ids = std::collections::BTreeSet::new();
    for v in &out.instances {
        let Some(parent) = parents.get(v.parent_id.as_str()) else {
            bad.push(format!("{}: unknown parent {}", v.id, v.parent_id));
            continue;
        };
        if !ids.insert(v.id.as_str()) {
            bad.push(format!("{}: duplicate id", v.id));
        }
        if v.strategy != cfg.strategy {
            bad.push(format!("{}: wrong strategy tag", v.id));
        }
        *per_parent.entry(parent.id.as_str()).or_insert(0) += 1;
        bad.extend(check_variant(parent, v, cfg, lex));
    }
    let r = &out.report;
    if r.instances != ds.len() || r.emitted != out.instances.len() {
        bad.push("report totals disagree with output".into());
    }
    if r.emitted + r.shortfall != ds.len() * cfg.variants_per_instance {
        bad.push("emitted + shortfall != instances x variants".into());
    }
    for ir in &r.per_instance {
        let got = per_parent.get(ir.id.as_str()).copied().unwrap_or(0);
        if got > cfg.variants_per_instance || got != ir.emitted {
            bad.push(format!("{}: {got} variants, report says {}", ir.id, ir.emitted));
        }
        if ir.emitted + ir.shortfalls.len() != cfg.variants_per_instance {
            bad.push(format!("{}: shortfalls not itemized", ir.id));
        }
        if ir.shortfalls.iter().any(|s| s.reasons.is_empty()) {
            bad.push(format!("{}: shortfall without a reason", ir.id));
        }
    }
    bad
}

/// SHA-256 over the JSONL serialization of the generated instances.
pub fn digest(out: &AugmentationOutput) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for v in &out.instances {
        h.update(serde_json::to_vec(v).unwrap());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}
