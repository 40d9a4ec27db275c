use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use super::LexiconError;
use crate::taxonomy::NrcCategory;

/// Word → NRC categories flagged for it.
pub type NrcLexicon = BTreeMap<String, BTreeSet<NrcCategory>>;

/// Parses the word-level NRC association file (`word<TAB>category<TAB>0|1`).
/// Only pairs flagged `1` are kept; words are lowercased.
pub fn parse_nrc<R: Read>(reader: R) -> Result<NrcLexicon, LexiconError> {
    let mut out = NrcLexicon::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|e| LexiconError::malformed("nrc", line_no, e.to_string()))?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        let [word, category, flag] = fields[..] else {
            return Err(LexiconError::malformed(
                "nrc",
                line_no,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        };
        let category: NrcCategory = category
            .parse()
            .map_err(|e: String| LexiconError::malformed("nrc", line_no, e))?;
        let word = word.trim().to_lowercase();
        if word.is_empty() {
            return Err(LexiconError::malformed("nrc", line_no, "empty word"));
        }
        match flag.trim() {
            "1" => {
                out.entry(word).or_default().insert(category);
            }
            "0" => {}
            other => {
                return Err(LexiconError::malformed(
                    "nrc",
                    line_no,
                    format!("association flag must be 0 or 1, found '{other}'"),
                ))
            }
        }
    }
    Ok(out)
}

pub fn load_nrc(path: impl AsRef<Path>) -> Result<NrcLexicon, LexiconError> {
    parse_nrc(super::open(path.as_ref())?)
}
