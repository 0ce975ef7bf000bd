//! Uncased BERT tokenization: basic pre-tokenizer plus greedy WordPiece.
//!
//! The basic tokenizer follows the reference pipeline step for step:
//!
//! 1. drop NUL, U+FFFD and control characters (general category `C*` other
//!    than `\t`, `\n`, `\r`); map whitespace to a plain space;
//! 2. surround CJK ideographs with spaces;
//! 3. NFC-normalize and split on whitespace;
//! 4. per word: lowercase, NFD-decompose and drop nonspacing marks (`Mn`),
//!    then split every punctuation character into its own word.
//!
//! WordPiece then segments each word by greedy longest-prefix matching,
//! marking continuation pieces with `##`, and falls back to `[UNK]` for
//! words that cannot be fully segmented or are longer than `max_chars`.

use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;

use crate::model_io::{Vocabulary, UNK_TOKEN};

pub const MAX_CHARS_PER_WORD: usize = 100;
pub const CONTINUATION_PREFIX: &str = "##";

/// Tokens of a text together with their vocabulary ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizationResult {
    pub tokens: Vec<String>,
    pub ids: Vec<u32>,
}

impl TokenizationResult {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

fn is_whitespace(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r') || get_general_category(c) == GeneralCategory::SpaceSeparator
}

fn is_control(c: char) -> bool {
    if matches!(c, '\t' | '\n' | '\r') {
        return false;
    }
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        Control | Format | Surrogate | PrivateUse | Unassigned
    )
}

/// ASCII non-alphanumerics count as punctuation even when Unicode files
/// them under symbols (`$`, `^`, `` ` ``...).
pub fn is_punctuation(c: char) -> bool {
    let cp = c as u32;
    if (33..=47).contains(&cp) || (58..=64).contains(&cp) || (91..=96).contains(&cp) || (123..=126).contains(&cp) {
        return true;
    }
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
    )
}

pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x4E00..=0x9FFF
        | 0x3400..=0x4DBF
        | 0x20000..=0x2A6DF
        | 0x2A700..=0x2B73F
        | 0x2B740..=0x2B81F
        | 0x2B820..=0x2CEAF
        | 0xF900..=0xFAFF
        | 0x2F800..=0x2FA1F)
}

fn clean(text: &str, isolate_cjk: bool) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if c == '\0' || c == '\u{FFFD}' || is_control(c) {
            continue;
        }
        if is_whitespace(c) {
            out.push(' ');
        } else if isolate_cjk && is_cjk(c) {
            out.push(' ');
            out.push(c);
            out.push(' ');
        } else {
            out.push(c);
        }
    }
    out
}

/// Lowercase, decompose, drop nonspacing marks.
fn fold_word(word: &str) -> String {
    word.to_lowercase()
        .nfd()
        .filter(|c| get_general_category(*c) != GeneralCategory::NonspacingMark)
        .collect()
}

/// Uncased normal form: control characters removed, NFC, lowercase, accents
/// stripped and whitespace collapsed to single spaces (no leading/trailing).
///
/// This is the form lexicon entries are stored in and the form added
/// vocabulary tokens take, so `basic_tokenize(w) == [w]` for any normalized
/// word without punctuation or CJK characters.
pub fn normalize(text: &str) -> String {
    let cleaned: String = clean(text, false).nfc().collect();
    let mut out = String::with_capacity(cleaned.len());
    for word in cleaned.split_whitespace() {
        let folded = fold_word(word);
        for piece in folded.split_whitespace() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(piece);
        }
    }
    out
}

fn split_punctuation(word: &str, out: &mut Vec<String>) {
    let mut current = String::new();
    for c in word.chars() {
        if is_punctuation(c) {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            out.push(c.to_string());
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
}

/// Split text into normalized words; punctuation and CJK ideographs become
/// single-character words.
pub fn basic_tokenize(text: &str) -> Vec<String> {
    let cleaned: String = clean(text, true).nfc().collect();
    let mut words = Vec::new();
    for word in cleaned.split_whitespace() {
        let folded = fold_word(word);
        for piece in folded.split_whitespace() {
            split_punctuation(piece, &mut words);
        }
    }
    words
}

/// Greedy longest-match-first segmentation of one word, appending ids to
/// `out`. Returns false (and appends the `[UNK]` id) if the word cannot be
/// segmented.
pub fn wordpiece_ids(word: &str, vocab: &Vocabulary, max_chars: usize, out: &mut Vec<u32>) -> bool {
    // byte offset of every char boundary, including the end
    let bounds: Vec<usize> = word
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(word.len()))
        .collect();
    let n_chars = bounds.len() - 1;
    if n_chars == 0 {
        return true;
    }
    if n_chars > max_chars {
        out.push(vocab.unk_id());
        return false;
    }

    let mark = out.len();
    let mut buf = String::with_capacity(word.len() + CONTINUATION_PREFIX.len());
    let mut start = 0;
    while start < n_chars {
        let mut end = n_chars;
        let mut found = None;
        while start < end {
            buf.clear();
            if start > 0 {
                buf.push_str(CONTINUATION_PREFIX);
            }
            buf.push_str(&word[bounds[start]..bounds[end]]);
            if let Some(id) = vocab.id(&buf) {
                found = Some(id);
                break;
            }
            end -= 1;
        }
        match found {
            Some(id) => {
                out.push(id);
                start = end;
            }
            None => {
                out.truncate(mark);
                out.push(vocab.unk_id());
                return false;
            }
        }
    }
    true
}

/// WordPiece segmentation of a single basic-tokenizer word.
pub fn wordpiece(word: &str, vocab: &Vocabulary, max_chars: usize) -> Vec<String> {
    let mut ids = Vec::new();
    wordpiece_ids(word, vocab, max_chars, &mut ids);
    ids.iter()
        .map(|&id| vocab.token(id).unwrap_or(UNK_TOKEN).to_string())
        .collect()
}

/// Token ids of `text` without any `[CLS]`/`[SEP]` framing.
pub fn tokenize_ids(text: &str, vocab: &Vocabulary) -> Vec<u32> {
    let mut ids = Vec::new();
    for word in basic_tokenize(text) {
        wordpiece_ids(&word, vocab, MAX_CHARS_PER_WORD, &mut ids);
    }
    ids
}

pub fn tokenize(text: &str, vocab: &Vocabulary) -> TokenizationResult {
    let ids = tokenize_ids(text, vocab);
    let tokens = ids
        .iter()
        .map(|&id| vocab.token(id).unwrap_or(UNK_TOKEN).to_string())
        .collect();
    TokenizationResult { tokens, ids }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_io::REQUIRED_SPECIALS;

    fn vocab(extra: &[&str]) -> Vocabulary {
        let mut t: Vec<String> = REQUIRED_SPECIALS.iter().map(|s| s.to_string()).collect();
        t.extend(extra.iter().map(|s| s.to_string()));
        Vocabulary::new(t).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Café"), "cafe");
        assert_eq!(normalize("HELLO"), "hello");
        assert_eq!(normalize("está"), "esta");
        assert_eq!(normalize("  hot \t\u{200b}dog\n"), "hot dog");
        assert_eq!(normalize("e\u{301}"), "e");
        assert_eq!(normalize(""), "");
    }

    #[test]
    fn basic_tokenize_examples() {
        assert_eq!(basic_tokenize("Hello, world!"), ["hello", ",", "world", "!"]);
        assert!(basic_tokenize("").is_empty());
        assert!(basic_tokenize(" \t\n").is_empty());
        // matches the reference tokenizer output for this input
        assert_eq!(
            basic_tokenize("state-of-the-art"),
            ["state", "-", "of", "-", "the", "-", "art"]
        );
        assert_eq!(basic_tokenize("北京abc"), ["北", "京", "abc"]);
        assert_eq!(basic_tokenize("$5^2`"), ["$", "5", "^", "2", "`"]);
    }

    #[test]
    fn unaffable() {
        // reference WordPiece on this vocabulary gives the same split
        let v = vocab(&["un", "##aff", "##able", "runn", "##ing"]);
        assert_eq!(wordpiece("unaffable", &v, 100), ["un", "##aff", "##able"]);
        assert_eq!(wordpiece("running", &v, 100), ["runn", "##ing"]);
        assert_eq!(wordpiece("unable", &v, 100), ["un", "##able"]);
        assert_eq!(wordpiece("unfit", &v, 100), ["[UNK]"]);
    }

    #[test]
    fn whole_word_and_length_limit() {
        let v = vocab(&["hello", "a", "##a"]);
        assert_eq!(wordpiece("hello", &v, 100), ["hello"]);
        let long = "a".repeat(101);
        assert_eq!(wordpiece(&long, &v, 100), ["[UNK]"]);
        let ok = "a".repeat(100);
        assert_eq!(wordpiece(&ok, &v, 100).len(), 100);
        assert!(wordpiece("", &v, 100).is_empty());
    }

    #[test]
    fn tokenize_resolves_ids() {
        let v = vocab(&["hot", "dog"]);
        let r = tokenize("Hot DOG", &v);
        assert_eq!(r.tokens, ["hot", "dog"]);
        assert_eq!(r.ids, [5, 6]);
        let r = tokenize("§¶ ☃", &v);
        assert!(r.tokens.iter().all(|t| t == "[UNK]"));
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn never_adds_framing_tokens() {
        let v = vocab(&["x"]);
        let r = tokenize("x", &v);
        assert_eq!(r.tokens, ["x"]);
    }
}
