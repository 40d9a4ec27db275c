//! Seeded synthetic comment corpora for tests, examples and demos.
//!
//! Filler sentences use only vocabulary that is absent from the shipped
//! fixture lexicons, so emotion cues are exactly the words placed on purpose.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Dataset, Utterance};
use crate::taxonomy::BasicEmotion;

const NOUNS: &[&str] = &[
    "parser", "config", "pipeline", "module", "endpoint", "cache", "script", "schema", "handler", "runner",
    "migration", "plugin", "driver", "benchmark", "workflow", "installer", "linter", "formatter", "resolver",
    "scheduler",
];
const VERBS: &[&str] = &[
    "fails", "passes", "works", "runs", "compiles", "hangs", "stalls", "returns early", "times out", "loads",
];
/// Planted-cue filler shares one noun across all classes so filler n-grams
/// carry as little label evidence as possible.
const PLANTED_NOUNS: &[&str] = &["cache"];
const PEOPLE: &[&str] = &["alice", "bob-dev", "carol", "dmitri", "eve42"];
const SNIPPETS: &[&str] = &["cargo test", "npm run lint", "make all", "git rebase -i", "foo.unwrap()"];
const LINKS: &[&str] = &[
    "https://ci.example.org/job/12",
    "https://github.com/org/repo/pull/7",
    "http://docs.example.com/setup",
];

/// Cue words per emotion drawn from the fixture emotion lexicon, chosen so
/// each word's strongest association is the listed emotion.
pub fn lexicon_cues(e: BasicEmotion) -> &'static [&'static str] {
    match e {
        BasicEmotion::Anger => &["angry", "furious", "annoying", "irritating", "ridiculous", "gross"],
        BasicEmotion::Love => &["wonderful", "awesome", "lovely", "helpful", "kind"],
        BasicEmotion::Fear => &["afraid", "scary", "worried", "panic", "nervous", "dread"],
        BasicEmotion::Joy => &["happy", "glad", "delighted", "cheerful", "fun", "excited"],
        BasicEmotion::Sadness => &["sad", "sorry", "lonely", "regret", "worse", "disappointed"],
        BasicEmotion::Surprise => &["surprised", "unexpected", "wow", "shocked", "curious", "astonishing"],
    }
}

fn pick<'a, R: Rng>(rng: &mut R, xs: &'a [&'a str]) -> &'a str {
    xs.choose(rng).expect("nonempty word bank")
}

fn filler<R: Rng>(rng: &mut R, nouns: &[&str]) -> String {
    let (a, b) = (pick(rng, nouns), pick(rng, nouns));
    match rng.random_range(0..8) {
        0 => format!("The {a} {} after the last {b} update.", pick(rng, VERBS)),
        1 => format!("I looked at the {a} and the {b} in this branch."),
        2 => format!("Can you rebase this on main and rerun the {a} check?"),
        3 => format!("The {a} now {} when the {b} is empty.", pick(rng, VERBS)),
        4 => format!("We should move the {a} logic into the {b} before the release."),
        5 => format!("Please add a test for the {a} so the {b} stays covered."),
        6 => format!("This commit changes how the {a} talks to the {b}."),
        _ => format!("Once the {a} lands we can drop the old {b} flag."),
    }
}

fn cue_sentence<R: Rng>(rng: &mut R, cue: &str, nouns: &[&str]) -> String {
    let noun = pick(rng, nouns);
    match rng.random_range(0..5) {
        0 => format!("Honestly I am {cue} about this {noun}."),
        1 => format!("The {noun} change left me {cue}."),
        2 => format!("{} the {noun} again.", capitalize(cue)),
        3 => format!("Reading the {noun} diff felt {cue} to me."),
        _ => format!("That is {cue} news for the {noun}."),
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn decorate<R: Rng>(rng: &mut R, sentence: String) -> String {
    match rng.random_range(0..10) {
        0 => format!("@{} {sentence}", pick(rng, PEOPLE)),
        1 => format!("{sentence} See {}", pick(rng, LINKS)),
        2 => format!("{sentence} Running `{}` shows it.", pick(rng, SNIPPETS)),
        _ => sentence,
    }
}

/// A comment of `sentences` filler sentences with one cue sentence per cue
/// inserted at random positions.
pub fn comment<R: Rng>(rng: &mut R, sentences: usize, cues: &[&str], raw_spans: bool) -> String {
    comment_with(rng, NOUNS, sentences, cues, raw_spans)
}

fn comment_with<R: Rng>(rng: &mut R, nouns: &[&str], sentences: usize, cues: &[&str], raw_spans: bool) -> String {
    let mut parts: Vec<String> = (0..sentences).map(|_| filler(rng, nouns)).collect();
    for cue in cues {
        let at = rng.random_range(0..=parts.len());
        parts.insert(at, cue_sentence(rng, cue, nouns));
    }
    if raw_spans {
        parts = parts.into_iter().map(|p| decorate(rng, p)).collect();
    }
    parts.join(" ")
}

fn cues_for<R: Rng>(rng: &mut R, labels: &BTreeSet<BasicEmotion>) -> Vec<&'static str> {
    labels.iter().map(|e| pick(rng, lexicon_cues(*e))).collect()
}

/// Corpus with the given number of single-label instances per emotion plus
/// `neutral` unlabeled ones. Comments carry URLs, mentions and inline code.
pub fn labeled_corpus(counts: &[(BasicEmotion, usize)], neutral: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &(e, n) in counts {
        for _ in 0..n {
            let labels = BTreeSet::from([e]);
            let cues = cues_for(&mut rng, &labels);
            let sentences = rng.random_range(1..=3);
            let text = comment(&mut rng, sentences, &cues, true);
            out.push(Utterance::new(format!("c{:04}", out.len()), text, labels));
        }
    }
    for _ in 0..neutral {
        let sentences = rng.random_range(1..=3);
        let text = comment(&mut rng, sentences, &[], true);
        out.push(Utterance::new(format!("c{:04}", out.len()), text, []));
    }
    Dataset::new(out, format!("synthetic:labeled:{seed}")).expect("ids are unique")
}

/// 2000 comments whose label counts match a typical annotated sample:
/// 310 Anger, 220 Love, 198 Fear, 422 Joy, 274 Sadness, 328 Surprise and
/// 248 neutral.
pub fn reference_sized_corpus(seed: u64) -> Dataset {
    use BasicEmotion::*;
    labeled_corpus(
        &[(Anger, 310), (Love, 220), (Fear, 198), (Joy, 422), (Sadness, 274), (Surprise, 328)],
        248,
        seed,
    )
}

/// `n` comments with random label sets (about one in eight neutral, one in
/// five multi-label), one to four filler sentences and raw URLs, mentions
/// and code spans.
pub fn mixed_corpus(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut labels = BTreeSet::new();
        if rng.random_range(0..8) != 0 {
            labels.insert(BasicEmotion::ALL[rng.random_range(0..6)]);
            if rng.random_range(0..5) == 0 {
                labels.insert(BasicEmotion::ALL[rng.random_range(0..6)]);
            }
        }
        let cues = cues_for(&mut rng, &labels);
        let sentences = rng.random_range(1..=4);
        let text = comment(&mut rng, sentences, &cues, true);
        out.push(Utterance::new(format!("m{i:03}"), text, labels));
    }
    Dataset::new(out, format!("synthetic:mixed:{seed}")).expect("ids are unique")
}

/// Train/test pair where every emotion has `train_per` training and
/// `test_per` test comments. Training comments are plain filler, so their
/// labels have no lexical support; each test comment carries one
/// emotion-lexicon cue word. No cue word occurs in training.
pub fn planted_cue_corpus(train_per: usize, test_per: usize, seed: u64) -> (Dataset, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for e in BasicEmotion::ALL {
        for i in 0..train_per {
            let text = comment_with(&mut rng, PLANTED_NOUNS, 2, &[], false);
            train.push(Utterance::new(format!("train-{}-{i:02}", e.name().to_lowercase()), text, [e]));
        }
        for i in 0..test_per {
            let cue = pick(&mut rng, lexicon_cues(e));
            let text = comment_with(&mut rng, PLANTED_NOUNS, 2, &[cue], false);
            test.push(Utterance::new(format!("test-{}-{i:02}", e.name().to_lowercase()), text, [e]));
        }
    }
    (
        Dataset::new(train, format!("synthetic:planted:{seed}:train")).expect("ids are unique"),
        Dataset::new(test, format!("synthetic:planted:{seed}:test")).expect("ids are unique"),
    )
}
