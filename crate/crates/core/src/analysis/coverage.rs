use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_io::Vocabulary;
use crate::tokenizer::{basic_tokenize, wordpiece_ids, MAX_CHARS_PER_WORD};

/// How well a vocabulary covers a corpus at the word level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageStats {
    pub total_words: u64,
    pub in_vocab_words: u64,
    pub unk_words: u64,
    pub subword_tokens: u64,
    pub oov_rate: f64,
    pub mean_fertility: f64,
    pub unk_rate: f64,
}

#[derive(Default)]
struct Counter {
    words: u64,
    in_vocab: u64,
    unk: u64,
    pieces: u64,
    scratch: Vec<u32>,
}

impl Counter {
    fn feed(&mut self, text: &str, vocab: &Vocabulary) {
        for word in basic_tokenize(text) {
            self.scratch.clear();
            let ok = wordpiece_ids(&word, vocab, MAX_CHARS_PER_WORD, &mut self.scratch);
            self.words += 1;
            self.pieces += self.scratch.len() as u64;
            if !ok {
                self.unk += 1;
            } else if self.scratch.len() == 1 && self.scratch[0] != vocab.unk_id() {
                self.in_vocab += 1;
            }
        }
    }

    fn finish(self) -> CoverageStats {
        let ratio = |n: u64| if self.words == 0 { 0.0 } else { n as f64 / self.words as f64 };
        CoverageStats {
            total_words: self.words,
            in_vocab_words: self.in_vocab,
            unk_words: self.unk,
            subword_tokens: self.pieces,
            oov_rate: ratio(self.words - self.in_vocab),
            mean_fertility: ratio(self.pieces),
            unk_rate: ratio(self.unk),
        }
    }
}

/// Coverage of an in-memory text.
pub fn coverage_text(text: &str, vocab: &Vocabulary) -> CoverageStats {
    let mut c = Counter::default();
    c.feed(text, vocab);
    c.finish()
}

/// Coverage of a UTF-8 corpus file, streamed line by line.
pub fn coverage(corpus_path: impl AsRef<Path>, vocab: &Vocabulary) -> Result<CoverageStats> {
    let path = corpus_path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut c = Counter::default();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        c.feed(&line, vocab);
    }
    Ok(c.finish())
}
