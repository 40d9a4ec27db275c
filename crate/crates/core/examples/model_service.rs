//! Asks a running model service for word proposals and embeddings. Without
//! a service the clients fall back to lexicon proposals and trigram
//! similarity.
//!
//! cargo run --example model_service -- [http://127.0.0.1:8080]

use std::path::Path;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use emoaug::lexicon::{Lexicons, DEFAULT_TAU};
use emoaug::operators::{
    tokenize, ExternalProposer, ExternalProposerConfig, ProposalContext, ProposeMode, Proposer,
};
use emoaug::strategies::{Embedder, ExternalEmbedder, ExternalEmbedderConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let url = std::env::args().nth(1).unwrap_or_else(|| "http://127.0.0.1:8080".into());
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let (lex, _) = Lexicons::build(
        &dir.join("nrc_emotion_lexicon.txt"),
        &dir.join("se_words.txt"),
        &dir.join("sentiwordnet.txt"),
        DEFAULT_TAU,
    )?;
    let proposer = ExternalProposer::new(ExternalProposerConfig {
        url: url.clone(),
        timeout: Duration::from_secs(5),
        ..ExternalProposerConfig::default()
    })?;
    let tu = tokenize("This fix is great, thanks!");
    let target = 3;
    println!("masked: {}", ExternalProposer::masked_context(&tu, target, ProposeMode::Substitute));
    let ctx = ProposalContext {
        constraint: None,
        lexicons: &lex,
        edit_index: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for p in proposer.propose(&tu, target, ProposeMode::Substitute, &ctx, &mut rng)?.iter().take(5) {
        println!("  {:<12} {:.3} {:?}", p.word, p.score, p.source);
    }

    let embedder = ExternalEmbedder::new(ExternalEmbedderConfig {
        url,
        timeout: Duration::from_secs(5),
        fallback: true,
    })?;
    let (a, b) = ("the build passes now", "the build finally passes now");
    println!("similarity {:.3}", embedder.similarity(a, b)?);
    Ok(())
}
