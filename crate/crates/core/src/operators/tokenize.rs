use std::ops::Range;

use serde::{Deserialize, Serialize};

pub const PLACEHOLDERS: [&str; 3] = ["<url>", "<username>", "<code>"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Punct,
    Placeholder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    /// No whitespace between this token and the previous one.
    pub glued: bool,
    /// Index of the edit that put this word here, if any.
    pub introduced_by: Option<usize>,
}

impl Token {
    pub fn word(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            kind: TokenKind::Word,
            glued: false,
            introduced_by: None,
        }
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedUtterance {
    pub tokens: Vec<Token>,
    /// Token ranges of each sentence, in order; they partition `tokens`.
    pub sentence_bounds: Vec<Range<usize>>,
}

impl TokenizedUtterance {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token indices of word tokens, in order.
    pub fn word_positions(&self) -> Vec<usize> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_word())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &[Token]> {
        self.sentence_bounds.iter().map(|r| &self.tokens[r.clone()])
    }

    pub fn sentence_of(&self, token: usize) -> Option<usize> {
        self.sentence_bounds.iter().position(|r| r.contains(&token))
    }

    pub fn text(&self) -> String {
        detokenize(self)
    }
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

fn placeholder_at(s: &str) -> Option<&'static str> {
    PLACEHOLDERS.into_iter().find(|p| s.starts_with(p))
}

fn push(tokens: &mut Vec<Token>, text: &str, kind: TokenKind, glued: bool) {
    tokens.push(Token {
        text: text.to_string(),
        kind,
        glued,
        introduced_by: None,
    });
}

/// Splits one whitespace-free chunk. Placeholders are cut out first; each
/// remaining piece loses its leading and trailing punctuation, one char per
/// punct token, and the core (if any) becomes a word.
fn split_chunk(chunk: &str, tokens: &mut Vec<Token>) {
    let mut glued = false;
    let mut rest = chunk;
    while !rest.is_empty() {
        let next_ph = (0..rest.len())
            .filter(|&i| rest.is_char_boundary(i))
            .find_map(|i| placeholder_at(&rest[i..]).map(|p| (i, p)));
        let (piece, ph) = match next_ph {
            Some((i, p)) => (&rest[..i], Some(p)),
            None => (rest, None),
        };
        if !piece.is_empty() {
            let core_start = piece.find(|c: char| !is_punct(c));
            match core_start {
                None => {
                    for c in piece.chars() {
                        push(tokens, c.encode_utf8(&mut [0; 4]), TokenKind::Punct, glued);
                        glued = true;
                    }
                }
                Some(start) => {
                    let end = piece.rfind(|c: char| !is_punct(c)).expect("core exists");
                    let end = end + piece[end..].chars().next().expect("char").len_utf8();
                    for c in piece[..start].chars() {
                        push(tokens, c.encode_utf8(&mut [0; 4]), TokenKind::Punct, glued);
                        glued = true;
                    }
                    push(tokens, &piece[start..end], TokenKind::Word, glued);
                    glued = true;
                    for c in piece[end..].chars() {
                        push(tokens, c.encode_utf8(&mut [0; 4]), TokenKind::Punct, true);
                    }
                }
            }
        }
        match ph {
            Some(p) => {
                push(tokens, p, TokenKind::Placeholder, glued || !piece.is_empty());
                glued = true;
                rest = &rest[piece.len() + p.len()..];
            }
            None => break,
        }
    }
}

fn is_terminator(t: &Token) -> bool {
    t.kind == TokenKind::Punct && matches!(t.text.as_str(), "." | "!" | "?")
}

/// Sentence ranges implied by terminators: a sentence ends after `.`, `!`
/// or `?` when followed by whitespace or the end of the text.
pub fn sentence_bounds(tokens: &[Token]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 0..tokens.len() {
        let at_end = i + 1 == tokens.len();
        if is_terminator(&tokens[i]) && (at_end || !tokens[i + 1].glued) {
            out.push(start..i + 1);
            start = i + 1;
        }
    }
    if start < tokens.len() {
        out.push(start..tokens.len());
    }
    out
}

pub fn tokenize(text: &str) -> TokenizedUtterance {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let first = tokens.len();
        split_chunk(chunk, &mut tokens);
        if let Some(t) = tokens.get_mut(first) {
            t.glued = false;
        }
    }
    let sentence_bounds = sentence_bounds(&tokens);
    TokenizedUtterance { tokens, sentence_bounds }
}

pub fn detokenize(tu: &TokenizedUtterance) -> String {
    let mut out = String::new();
    for (i, t) in tu.tokens.iter().enumerate() {
        if i > 0 && !t.glued {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}

/// Number of word tokens; punctuation and placeholders do not count.
pub fn augmentable_length(tu: &TokenizedUtterance) -> usize {
    tu.tokens.iter().filter(|t| t.is_word()).count()
}

/// Whether `word` would tokenize back to exactly one alphabetic word token.
/// Hyphens and apostrophes are allowed inside the word.
pub fn is_proposal_word(word: &str) -> bool {
    let (Some(first), Some(last)) = (word.chars().next(), word.chars().last()) else {
        return false;
    };
    first.is_alphabetic()
        && last.is_alphabetic()
        && word.chars().all(|c| c.is_alphabetic() || c == '-' || c == '\'')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(tu: &TokenizedUtterance) -> Vec<&str> {
        tu.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn exclamation_splits_sentences() {
        let tu = tokenize("It works! Thanks.");
        assert_eq!(texts(&tu), ["It", "works", "!", "Thanks", "."]);
        assert_eq!(tu.sentence_bounds, vec![0..3, 3..5]);
        assert_eq!(augmentable_length(&tu), 3);
        assert_eq!(augmentable_length(&tokenize("It works!")), 2);
    }

    #[test]
    fn placeholder_is_atomic() {
        let tu = tokenize("<code> fails");
        assert_eq!(texts(&tu), ["<code>", "fails"]);
        assert_eq!(tu.tokens[0].kind, TokenKind::Placeholder);
        let tu = tokenize("see <url>, (<code>)");
        assert_eq!(texts(&tu), ["see", "<url>", ",", "(", "<code>", ")"]);
        assert_eq!(detokenize(&tu), "see <url>, (<code>)");
    }

    #[test]
    fn inner_punctuation_stays_in_word() {
        let tu = tokenize("don't use e.g. this...");
        assert_eq!(texts(&tu), ["don't", "use", "e.g", ".", "this", ".", ".", "."]);
        assert_eq!(tu.sentence_bounds, vec![0..4, 4..8]);
    }

    #[test]
    fn terminator_needs_following_space() {
        let tu = tokenize("v1.2 is out.Now");
        assert_eq!(tu.sentence_bounds.len(), 1);
    }

    #[test]
    fn empty_and_placeholder_only() {
        let tu = tokenize("   ");
        assert!(tu.is_empty() && tu.sentence_bounds.is_empty());
        assert_eq!(augmentable_length(&tokenize("<url> <code>")), 0);
    }

    #[test]
    fn round_trip_modulo_whitespace() {
        for s in ["Hello,   world!", "a (b) c.", "x<code>y", "<<url>>", "why?? ok"] {
            let norm: String = s.split_whitespace().collect::<Vec<_>>().join(" ");
            assert_eq!(detokenize(&tokenize(s)), norm, "{s}");
        }
    }

    #[test]
    fn proposal_words() {
        assert!(is_proposal_word("great"));
        assert!(is_proposal_word("well-done"));
        for bad in ["", "a_cappella", "two words", "ok.", "<code>", "x1"] {
            assert!(!is_proposal_word(bad), "{bad}");
        }
    }
}
