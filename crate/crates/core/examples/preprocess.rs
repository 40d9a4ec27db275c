//! Masks URLs, mentions and code spans, then loads a small JSONL corpus.
//!
//! cargo run --example preprocess

use emoaug::corpus::{ingest_reader, preprocess_text, Format};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let comments = [
        "see https://a.b/x and @bob `x=1`",
        "```\nfn main() {}\n```\nthanks @ann, this looks great!",
        "LGTM, merging once CI (https://ci.example.org/job/7) is green.",
    ];
    for c in comments {
        println!("{c:?}\n  -> {:?}", preprocess_text(c));
    }

    let jsonl = r#"{"id": "1", "text": "Why does `make` fail again?? @carol", "labels": ["anger"]}
{"id": "2", "text": "Wow, did not expect that to work", "labels": ["Surprise", "joy"]}
{"id": "3", "text": "Rebased on main.", "labels": []}
"#;
    let ds = ingest_reader(jsonl.as_bytes(), Format::Jsonl, "inline")?;
    for u in &ds {
        let labels: Vec<_> = u.labels.iter().map(|e| e.name()).collect();
        println!("{} {:?} {}", u.id, labels, u.masked_text);
    }
    println!("neutral: {}", ds.count_neutral());
    Ok(())
}
