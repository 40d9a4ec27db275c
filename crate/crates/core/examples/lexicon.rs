//! Builds the emotion and polarity lexicons from the bundled fixture files.
//!
//! cargo run --example lexicon

use std::path::Path;

use emoaug::lexicon::{word_emotions, word_polarity, Lexicons, DEFAULT_TAU};
use emoaug::taxonomy::BasicEmotion;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures");
    let (lex, log) = Lexicons::build(
        &dir.join("nrc_emotion_lexicon.txt"),
        &dir.join("se_words.txt"),
        &dir.join("sentiwordnet.txt"),
        DEFAULT_TAU,
    )?;
    println!("{}", serde_json::to_string_pretty(&log)?);
    for e in BasicEmotion::ALL {
        println!("{:<8} {}", e.name(), lex.emotion().bucket(e).join(" "));
    }
    for w in ["afraid", "awesome", "wow", "ridiculous", "merge"] {
        let emotions: Vec<_> = word_emotions(w, lex.emotion()).iter().map(|e| e.name()).collect();
        println!("{w}: {emotions:?} {:?}", word_polarity(w, lex.polarity()));
    }
    for tau in [0.0, 0.1, 0.3] {
        let l = lex.with_tau(tau);
        let sizes: Vec<_> = emoaug::lexicon::PolarityClass::ALL
            .iter()
            .map(|c| l.polarity().words_of(*c).count())
            .collect();
        println!("tau {tau}: positive/negative/neutral = {sizes:?}");
    }
    Ok(())
}
