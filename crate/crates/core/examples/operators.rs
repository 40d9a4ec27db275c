//! The four edit operators on one comment, and replay of the edit trail.
//!
//! cargo run --example operators

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use emoaug::lexicon::{Lexicons, PolarityClass, DEFAULT_TAU};
use emoaug::operators::{
    augmentable_length, op_delete, op_insert, op_shuffle, op_substitute, replay_edits, tokenize, Constraint,
    LexiconProposer, ProposalContext,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let (lex, _) = Lexicons::build(
        &dir.join("nrc_emotion_lexicon.txt"),
        &dir.join("se_words.txt"),
        &dir.join("sentiwordnet.txt"),
        DEFAULT_TAU,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let proposer = LexiconProposer::default();

    let original = tokenize("Thanks for the patch, <username>! The build on <url> passes now.");
    println!("{} words, sentences {:?}", augmentable_length(&original), original.sentence_bounds);

    let mut edits = Vec::new();
    let ctx = |i| ProposalContext {
        constraint: Some(Constraint::Polarity(PolarityClass::Positive)),
        lexicons: &lex,
        edit_index: i,
    };
    let (tu, e) = op_insert(&original, 0, &proposer, &ctx(0), &mut rng)?;
    println!("insert:     {}", tu.text());
    edits.push(e);
    let target = tu.word_positions().into_iter().find(|&i| tu.tokens[i].text == "patch").expect("word present");
    let (tu, e) = op_substitute(&tu, target, &proposer, &ctx(1), &mut rng)?;
    println!("substitute: {}", tu.text());
    edits.push(e);
    let target = tu.word_positions().into_iter().find(|&i| tu.tokens[i].text == "now").expect("word present");
    let (tu, e) = op_delete(&tu, target)?;
    println!("delete:     {}", tu.text());
    edits.push(e);
    let (tu, e) = op_shuffle(&tu, &mut rng)?;
    println!("shuffle:    {}", tu.text());
    edits.push(e);

    println!("{}", serde_json::to_string_pretty(&edits)?);
    assert_eq!(replay_edits(&original, &edits)?.text(), tu.text());
    println!("replayed trail reproduces the variant");
    Ok(())
}
