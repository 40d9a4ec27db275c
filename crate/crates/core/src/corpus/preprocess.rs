use std::sync::LazyLock;

use regex::{Captures, Regex};

pub const URL: &str = "<url>";
pub const USERNAME: &str = "<username>";
pub const CODE: &str = "<code>";

static FENCED: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?s)```.*?```").unwrap());
static INLINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"`[^`]*`").unwrap());
static LINK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"https?://[^\s<>()\[\]"'`]+"#).unwrap());
static MENTION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(^|[^A-Za-z0-9_])@[A-Za-z0-9-]+").unwrap());
static SPACE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s+").unwrap());

/// Masks code spans, links and user mentions with placeholder tokens and
/// collapses whitespace runs to single spaces. Nothing else is touched.
///
/// Code is masked first so that links and mentions inside code vanish with
/// it; links before mentions so an `@` inside a URL is never read as a user.
pub fn preprocess_text(raw: &str) -> String {
    let text = FENCED.replace_all(raw, format!(" {CODE} "));
    let text = INLINE.replace_all(&text, CODE);
    let text = LINK.replace_all(&text, |caps: &Captures<'_>| {
        // Trailing sentence punctuation belongs to the prose, not the link.
        let m = &caps[0];
        let kept = m.trim_end_matches(['.', ',', ';', ':', '!', '?']);
        format!("{URL}{}", &m[kept.len()..])
    });
    // A replaced mention can expose a second one right behind it (`@a@b`).
    let mut text = text.into_owned();
    while MENTION.is_match(&text) {
        text = MENTION.replace_all(&text, format!("${{1}}{USERNAME}")).into_owned();
    }
    SPACE.replace_all(text.trim(), " ").into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_all_three_span_kinds() {
        assert_eq!(
            preprocess_text("see https://a.b/x and @bob `x=1`"),
            "see <url> and <username> <code>"
        );
    }

    #[test]
    fn plain_text_is_identity() {
        assert_eq!(preprocess_text("plain sentence"), "plain sentence");
    }

    #[test]
    fn fenced_block_then_mention() {
        assert_eq!(preprocess_text("```code block```\nthanks @ann"), "<code> thanks <username>");
    }

    #[test]
    fn keeps_stop_words_and_sentence_punctuation() {
        assert_eq!(
            preprocess_text("It is in the docs: https://x.io/a."),
            "It is in the docs: <url>."
        );
    }

    #[test]
    fn email_is_not_a_mention() {
        assert_eq!(preprocess_text("mail me at a@b.com"), "mail me at a@b.com");
    }

    #[test]
    fn unmatched_backtick_is_left_alone() {
        assert_eq!(preprocess_text("a ` b"), "a ` b");
    }

    #[test]
    fn idempotent_on_examples() {
        for s in [
            "see https://a.b/x and @bob `x=1`",
            "```rust\nfn main() {}\n``` then @x-y said (https://github.com/o/r/pull/1)",
            "`a` `b` ``",
            "@a@b",
        ] {
            let once = preprocess_text(s);
            assert_eq!(preprocess_text(&once), once);
        }
    }
}
