//! Fetches recent comments from a repository and prints them masked.
//! Needs network access and a token in EMOAUG_TOKEN.
//!
//! cargo run --example fetch -- owner/name issues 20

use emoaug::corpus::{fetch_comments, CommentKind, TOKEN_ENV};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let repo = args.next().ok_or("usage: fetch OWNER/NAME [issues|pulls] [LIMIT]")?;
    let kind: CommentKind = args.next().as_deref().unwrap_or("issues").parse()?;
    let limit: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let token = std::env::var(TOKEN_ENV).map_err(|_| format!("set {TOKEN_ENV}"))?;
    let ds = fetch_comments(&repo, kind, limit, &token)?;
    for u in &ds {
        println!("{}\t{}", u.id, u.masked_text.replace('\n', " "));
    }
    Ok(())
}
