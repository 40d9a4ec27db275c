//! Runs the three strategies over a small seeded corpus and prints a few
//! variants with their edit trails, plus the shortfall report.
//!
//! cargo run --release --example augment [WORKERS]

use std::path::Path;

use emoaug::lexicon::{Lexicons, DEFAULT_TAU};
use emoaug::operators::LexiconProposer;
use emoaug::strategies::{augment_dataset, AugmentationConfig, Strategy, TrigramEmbedder};
use emoaug::synth::mixed_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let workers: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let (lex, _) = Lexicons::build(
        &dir.join("nrc_emotion_lexicon.txt"),
        &dir.join("se_words.txt"),
        &dir.join("sentiwordnet.txt"),
        DEFAULT_TAU,
    )?;
    let ds = mixed_corpus(20, 11);
    let parent = &ds.instances[0];
    println!("parent {} {:?}\n  {}", parent.id, parent.labels, parent.masked_text);

    for strategy in Strategy::ALL {
        let cfg = AugmentationConfig {
            seed: 11,
            ..AugmentationConfig::default().with_strategy(strategy)
        };
        let out = augment_dataset(&ds, &cfg, &lex, &LexiconProposer::default(), &TrigramEmbedder, workers)?;
        println!("\n== {strategy}: {} emitted, {} short", out.report.emitted, out.report.shortfall);
        for (reason, n) in &out.report.reasons {
            println!("   rejected attempts, {}: {n}", serde_json::to_string(reason)?);
        }
        for a in out.instances.iter().filter(|a| a.parent_id == parent.id).take(3) {
            let trail: Vec<String> = a
                .edits
                .iter()
                .map(|e| match (&e.before, &e.after) {
                    (Some(b), Some(x)) => format!("{}({b}->{x})", e.op.name()),
                    (None, Some(x)) => format!("{}(+{x})", e.op.name()),
                    (Some(b), None) => format!("{}(-{b})", e.op.name()),
                    _ => e.op.name().to_string(),
                })
                .collect();
            println!("  {} sim={:.3} [{}]\n    {}", a.id, a.similarity, trail.join(" "), a.text);
        }
    }
    Ok(())
}
