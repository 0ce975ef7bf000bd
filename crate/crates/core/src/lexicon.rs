//! Bilingual lexicons: one `SOURCE<delim>TARGET` pair per line.
//!
//! Both sides are run through [`normalize`], so the stored entries are already
//! in the form the tokenizer sees. Lines that cannot yield a valid pair are
//! skipped and counted, and exact duplicate pairs keep their first occurrence.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::tokenizer::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelimiterMode {
    /// Tab mode for lines containing a tab, space mode otherwise.
    #[default]
    Auto,
    Tab,
    Space,
}

impl FromStr for DelimiterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "tab" => Ok(Self::Tab),
            "space" => Ok(Self::Space),
            other => Err(Error::InvalidArgument(format!(
                "unknown delimiter mode {other:?} (expected auto, tab or space)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// Normalized source word or phrase; phrases use single internal spaces.
    pub source_phrase: String,
    /// Normalized target word, never containing whitespace.
    pub target_word: String,
    /// 1-based line in the originating file (position for in-memory lexicons).
    pub line_no: usize,
}

/// Ordered, deduplicated list of entries plus parse accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilingualLexicon {
    entries: Vec<LexiconEntry>,
    sha256: String,
    skipped_lines: usize,
    duplicates: usize,
    accent_collisions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexiconStats {
    pub entries: usize,
    pub distinct_sources: usize,
    pub distinct_targets: usize,
    pub targets_with_multiple_sources: usize,
    pub multiword_sources: usize,
    pub max_sources_per_target: usize,
    pub skipped_lines: usize,
    pub duplicates: usize,
}

/// Split a raw line into (source, target) according to the delimiter mode.
fn split_line(line: &str, mode: DelimiterMode) -> Option<(String, &str)> {
    let tab = match mode {
        DelimiterMode::Tab => true,
        DelimiterMode::Space => false,
        DelimiterMode::Auto => line.contains('\t'),
    };
    if tab {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (target, sources) = fields.split_last()?;
        let source = sources
            .iter()
            .filter(|f| !f.is_empty())
            .copied()
            .collect::<Vec<_>>()
            .join(" ");
        Some((source, target))
    } else {
        let mut it = line.split_whitespace();
        let source = it.next()?;
        let target = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some((source.to_string(), target))
    }
}

/// Lowercased but not accent-stripped spelling, used to detect distinct
/// spellings that collapse onto one normalized target.
fn cased_form(s: &str) -> String {
    use unicode_normalization::UnicodeNormalization;
    s.trim().nfc().collect::<String>().to_lowercase()
}

impl BilingualLexicon {
    /// Parse lexicon file contents.
    pub fn parse_str(text: &str, mode: DelimiterMode) -> Self {
        let mut builder = Builder::default();
        if !text.is_empty() {
            let body = text.strip_suffix('\n').unwrap_or(text);
            for (i, line) in body.split('\n').enumerate() {
                builder.line(i + 1, Some(line), mode);
            }
        }
        builder.finish()
    }

    /// Parse a lexicon file. Lines that are not valid UTF-8 are skipped.
    pub fn parse_file(path: impl AsRef<Path>, mode: DelimiterMode) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let mut builder = Builder::default();
        if !bytes.is_empty() {
            let body = bytes.strip_suffix(b"\n").unwrap_or(&bytes);
            for (i, raw) in body.split(|b| *b == b'\n').enumerate() {
                builder.line(i + 1, std::str::from_utf8(raw).ok(), mode);
            }
        }
        let lex = builder.finish();
        if lex.entries.is_empty() {
            return Err(Error::EmptyLexicon {
                path: path.to_path_buf(),
                skipped: lex.skipped_lines + lex.duplicates,
            });
        }
        Ok(lex)
    }

    /// Build from in-memory pairs, normalizing and filtering them exactly as
    /// the file parser does. May be empty.
    pub fn from_pairs<S: AsRef<str>, T: AsRef<str>>(pairs: impl IntoIterator<Item = (S, T)>) -> Self {
        let mut builder = Builder::default();
        for (i, (s, t)) in pairs.into_iter().enumerate() {
            builder.pair(i + 1, s.as_ref(), t.as_ref());
        }
        builder.finish()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Hex SHA-256 of `source\ttarget\n` over all entries in order.
    pub fn sha256(&self) -> &str {
        &self.sha256
    }

    pub fn skipped_lines(&self) -> usize {
        self.skipped_lines
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Normalized targets reached from two or more spellings that differ
    /// only by accents (e.g. "está" and "esta").
    pub fn accent_collisions(&self) -> usize {
        self.accent_collisions
    }

    /// First-listed target for each distinct source phrase.
    pub fn first_target_by_source(&self) -> HashMap<&str, &str> {
        let mut map = HashMap::new();
        for e in &self.entries {
            map.entry(e.source_phrase.as_str())
                .or_insert(e.target_word.as_str());
        }
        map
    }

    /// First-listed source phrase for each distinct target word.
    pub fn first_source_by_target(&self) -> HashMap<&str, &str> {
        let mut map = HashMap::new();
        for e in &self.entries {
            map.entry(e.target_word.as_str())
                .or_insert(e.source_phrase.as_str());
        }
        map
    }

    pub fn stats(&self) -> LexiconStats {
        let mut sources_per_target: HashMap<&str, HashSet<&str>> = HashMap::new();
        let mut sources = HashSet::new();
        for e in &self.entries {
            sources.insert(e.source_phrase.as_str());
            sources_per_target
                .entry(e.target_word.as_str())
                .or_default()
                .insert(e.source_phrase.as_str());
        }
        LexiconStats {
            entries: self.entries.len(),
            distinct_sources: sources.len(),
            distinct_targets: sources_per_target.len(),
            targets_with_multiple_sources: sources_per_target.values().filter(|s| s.len() >= 2).count(),
            multiword_sources: sources.iter().filter(|s| s.contains(' ')).count(),
            max_sources_per_target: sources_per_target.values().map(HashSet::len).max().unwrap_or(0),
            skipped_lines: self.skipped_lines,
            duplicates: self.duplicates,
        }
    }
}

/// SHA-256 over the canonical `source\ttarget\n` stream.
pub fn fingerprint(entries: &[LexiconEntry]) -> String {
    let mut h = Sha256::new();
    for e in entries {
        h.update(e.source_phrase.as_bytes());
        h.update(b"\t");
        h.update(e.target_word.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[derive(Default)]
struct Builder {
    entries: Vec<LexiconEntry>,
    seen: HashSet<(String, String)>,
    spellings: HashMap<String, HashSet<String>>,
    skipped: usize,
    duplicates: usize,
}

impl Builder {
    fn line(&mut self, line_no: usize, line: Option<&str>, mode: DelimiterMode) {
        let Some(line) = line else {
            self.skipped += 1;
            return;
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            self.skipped += 1;
            return;
        }
        match split_line(line, mode) {
            Some((source, target)) => self.pair(line_no, &source, target),
            None => self.skipped += 1,
        }
    }

    fn pair(&mut self, line_no: usize, source: &str, target: &str) {
        let source_phrase = normalize(source);
        let target_word = normalize(target);
        if source_phrase.is_empty() || target_word.is_empty() || target_word.contains(char::is_whitespace) {
            self.skipped += 1;
            return;
        }
        self.spellings
            .entry(target_word.clone())
            .or_default()
            .insert(cased_form(target));
        if !self.seen.insert((source_phrase.clone(), target_word.clone())) {
            self.duplicates += 1;
            return;
        }
        self.entries.push(LexiconEntry {
            source_phrase,
            target_word,
            line_no,
        });
    }

    fn finish(self) -> BilingualLexicon {
        let sha256 = fingerprint(&self.entries);
        let accent_collisions = self
            .spellings
            .values()
            .filter(|forms| forms.len() >= 2)
            .count();
        BilingualLexicon {
            entries: self.entries,
            sha256,
            skipped_lines: self.skipped,
            duplicates: self.duplicates,
            accent_collisions,
        }
    }
}
