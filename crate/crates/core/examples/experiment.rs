//! Planted-cue experiment: train on comments that contain no emotion words,
//! test on comments that each carry one lexicon cue word, and compare the
//! baseline trained with and without augmentation.
//!
//! cargo run --release --example experiment [SEED]

use std::path::Path;
use std::time::Instant;

use emoaug::eval::{run_experiment, ExperimentSetup, Hyper};
use emoaug::lexicon::{Lexicons, DEFAULT_TAU};
use emoaug::operators::LexiconProposer;
use emoaug::strategies::{AugmentationConfig, Strategy, TrigramEmbedder};
use emoaug::synth::planted_cue_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let (lexicons, _) = Lexicons::build(
        &fixtures.join("nrc_emotion_lexicon.txt"),
        &fixtures.join("se_words.txt"),
        &fixtures.join("sentiwordnet.txt"),
        DEFAULT_TAU,
    )?;
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let (train, test) = planted_cue_corpus(30, 10, seed);
    let configs: Vec<AugmentationConfig> = Strategy::ALL
        .iter()
        .map(|s| AugmentationConfig::default().with_strategy(*s))
        .collect();
    let setup = ExperimentSetup {
        lexicons: &lexicons,
        proposer: &LexiconProposer::default(),
        embedder: &TrigramEmbedder,
        workers: 4,
    };
    let start = Instant::now();
    let report = run_experiment(&train, &test, &configs, &Hyper::default(), &setup)?;
    print!("{}", report.render_table());
    for row in &report.rows {
        if let Some(g) = &row.generation {
            println!("{}: emitted {} shortfall {} {:?}", row.strategy, g.emitted, g.shortfall, g.reasons);
        }
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
