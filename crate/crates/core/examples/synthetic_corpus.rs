//! Writes the seeded synthetic corpora as JSONL so the command-line tool
//! can be tried without annotated data.
//!
//! cargo run --example synthetic_corpus -- OUT_DIR [SEED]

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use emoaug::corpus::{write_jsonl, Dataset};
use emoaug::synth::{mixed_corpus, planted_cue_corpus, reference_sized_corpus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "synthetic".into()));
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    std::fs::create_dir_all(&dir)?;
    let (planted_train, planted_test) = planted_cue_corpus(30, 10, seed);
    let sets: [(&str, Dataset); 4] = [
        ("corpus.jsonl", reference_sized_corpus(seed)),
        ("mixed.jsonl", mixed_corpus(100, seed)),
        ("planted.train.jsonl", planted_train),
        ("planted.test.jsonl", planted_test),
    ];
    for (name, ds) in &sets {
        let path = dir.join(name);
        write_jsonl(ds, BufWriter::new(File::create(&path)?))?;
        println!("{}: {} instances", path.display(), ds.len());
    }
    Ok(())
}
