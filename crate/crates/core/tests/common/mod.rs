#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use lexiport::model_io::{read_vocab, REQUIRED_SPECIALS};
use lexiport::{Artifact, BilingualLexicon, Embeddings, LexiconEntry, Vocabulary};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn bert_vocab() -> Vocabulary {
    read_vocab(data("bert-base-uncased-vocab.txt")).unwrap()
}

/// Rows drawn uniformly from [-1, 1).
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, dim: usize) -> Embeddings {
    let values = (0..rows * dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
    Embeddings::new(rows, dim, values).unwrap()
}

pub fn random_artifact_for<R: Rng>(rng: &mut R, vocab: Vocabulary, dim: usize) -> Artifact {
    let m = random_matrix(rng, vocab.len(), dim);
    Artifact::identity("random", vocab, m).unwrap()
}

/// Letters used for vocabulary pieces; `q` never appears so any word
/// containing it tokenizes to `[UNK]`.
pub const PIECE_LETTERS: &[u8] = b"abcdefgh";

fn random_word<R: Rng>(rng: &mut R, letters: &[u8], len: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.gen_range(len);
    (0..n).map(|_| *letters.choose(rng).unwrap() as char).collect()
}

/// Specials, all single letters (so most words segment), plus random whole
/// words and `##` pieces, `size` tokens in total.
pub fn random_vocab<R: Rng>(rng: &mut R, size: usize) -> Vocabulary {
    let mut tokens: Vec<String> = REQUIRED_SPECIALS.iter().map(|s| s.to_string()).collect();
    let mut seen: HashSet<String> = tokens.iter().cloned().collect();
    // two whole words are always present so one-to-many cases can be forced
    let mut letters = PIECE_LETTERS.to_vec();
    letters.shuffle(rng);
    for &c in &letters[..2] {
        let t = (c as char).to_string();
        seen.insert(t.clone());
        tokens.push(t);
    }
    let mut pool: Vec<String> = Vec::new();
    for &c in PIECE_LETTERS {
        pool.push((c as char).to_string());
        pool.push(format!("##{}", c as char));
    }
    pool.shuffle(rng);
    while tokens.len() < size {
        let t = match pool.pop() {
            Some(t) if rng.gen_bool(0.7) => t,
            _ => {
                let w = random_word(rng, PIECE_LETTERS, 2..=4);
                if rng.gen_bool(0.3) {
                    format!("##{w}")
                } else {
                    w
                }
            }
        };
        if seen.insert(t.clone()) {
            tokens.push(t);
        }
    }
    tokens[5..].shuffle(rng);
    Vocabulary::new(tokens).unwrap()
}

/// Up to `max_entries` pairs, always including one target shared by two
/// sources and one source made only of unknown words; some targets reuse
/// vocabulary tokens.
pub fn random_pairs<R: Rng>(rng: &mut R, vocab: &Vocabulary, max_entries: usize) -> Vec<(String, String)> {
    let whole: Vec<&String> = vocab
        .tokens()
        .iter()
        .filter(|t| !t.starts_with("##") && !t.starts_with('['))
        .collect();
    let phrase = |rng: &mut R| -> String {
        let n = rng.gen_range(1..=3);
        (0..n)
            .map(|_| random_word(rng, PIECE_LETTERS, 1..=6))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let target = |rng: &mut R| -> String {
        if rng.gen_bool(0.15) && !whole.is_empty() {
            whole.choose(rng).unwrap().to_string()
        } else {
            random_word(rng, b"stuvwxyz", 1..=3)
        }
    };
    let n = rng.gen_range(2..=max_entries.max(2));
    let mut pairs = Vec::with_capacity(n);
    let shared = target(rng);
    let mut known: Vec<&String> = whole.clone();
    known.shuffle(rng);
    for w in &known[..2] {
        let extra = if rng.gen_bool(0.5) { format!(" {}", phrase(rng)) } else { String::new() };
        pairs.push((format!("{w}{extra}"), shared.clone()));
    }
    pairs.push(("qq q".to_string(), target(rng)));
    while pairs.len() < n {
        let t = if rng.gen_bool(0.3) {
            pairs.choose(rng).unwrap().1.clone()
        } else {
            target(rng)
        };
        pairs.push((phrase(rng), t));
    }
    pairs.truncate(max_entries);
    pairs.shuffle(rng);
    pairs
}

/// Brute-force WordPiece over a plain token set: try every prefix from the
/// longest down, restart after each match.
pub fn oracle_wordpiece(word: &str, tokens: &HashSet<&str>) -> Option<Vec<String>> {
    let chars: Vec<char> = word.chars().collect();
    if chars.len() > 100 {
        return None;
    }
    let mut pieces = Vec::new();
    let mut start = 0;
    while start < chars.len() {
        let mut matched = None;
        for end in (start + 1..=chars.len()).rev() {
            let body: String = chars[start..end].iter().collect();
            let cand = if start == 0 { body } else { format!("##{body}") };
            if tokens.contains(cand.as_str()) {
                matched = Some((cand, end));
                break;
            }
        }
        let (piece, end) = matched?;
        pieces.push(piece);
        start = end;
    }
    Some(pieces)
}

/// Expected LWM output computed from scratch: tokens and rows of the
/// translated artifact, plus the number of appended targets.
///
/// Only valid for lowercase ASCII-letter phrases, where the basic tokenizer
/// reduces to whitespace splitting.
pub fn oracle_lwm(
    tokens: &[String],
    rows: &[Vec<f32>],
    entries: &[LexiconEntry],
) -> (Vec<String>, Vec<Vec<f32>>, usize) {
    let set: HashSet<&str> = tokens.iter().map(String::as_str).collect();
    let index: HashMap<&str, usize> = tokens.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let dim = rows.first().map_or(0, Vec::len);

    let mut order: Vec<String> = Vec::new();
    let mut means: HashMap<String, Vec<Vec<f64>>> = HashMap::new();
    for e in entries {
        let mut ids = Vec::new();
        for word in e.source_phrase.split_whitespace() {
            if let Some(pieces) = oracle_wordpiece(word, &set) {
                ids.extend(pieces.iter().map(|p| index[p.as_str()]));
            }
        }
        if ids.is_empty() {
            continue;
        }
        let mut sum: Vec<f64> = rows[ids[0]].iter().map(|&v| v as f64).collect();
        for &id in &ids[1..] {
            for (s, &v) in sum.iter_mut().zip(&rows[id]) {
                *s += v as f64;
            }
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / ids.len() as f64).collect();
        if !means.contains_key(&e.target_word) {
            order.push(e.target_word.clone());
        }
        means.entry(e.target_word.clone()).or_default().push(mean);
    }

    let mut out_tokens = tokens.to_vec();
    let mut out_rows = rows.to_vec();
    let mut added = 0;
    for t in order {
        if set.contains(t.as_str()) {
            continue;
        }
        let list = &means[&t];
        let mut acc = list[0].clone();
        for m in &list[1..] {
            for (a, v) in acc.iter_mut().zip(m) {
                *a += v;
            }
        }
        let row: Vec<f32> = (0..dim).map(|j| (acc[j] / list.len() as f64) as f32).collect();
        out_tokens.push(t);
        out_rows.push(row);
        added += 1;
    }
    (out_tokens, out_rows, added)
}

pub fn rows_of(m: &Embeddings) -> Vec<Vec<f32>> {
    m.iter_rows().map(<[f32]>::to_vec).collect()
}

pub fn bits(rows: &[Vec<f32>]) -> Vec<Vec<u32>> {
    rows.iter().map(|r| r.iter().map(|v| v.to_bits()).collect()).collect()
}

/// Synthetic lexicon of `n` entries whose sources are phrases of real
/// whole-word vocabulary tokens.
pub fn synthetic_large_pairs<R: Rng>(rng: &mut R, vocab: &Vocabulary, n: usize) -> Vec<(String, String)> {
    let words: Vec<&String> = vocab
        .tokens()
        .iter()
        .filter(|t| !t.starts_with("##") && !t.starts_with('[') && t.chars().all(|c| c.is_ascii_lowercase()))
        .collect();
    (0..n)
        .map(|i| {
            let k = if rng.gen_bool(0.8) { 1 } else { rng.gen_range(2..=3) };
            let src: Vec<&str> = (0..k).map(|_| words.choose(rng).unwrap().as_str()).collect();
            let tgt = format!("{}{}", random_word(rng, b"aeioulmnrst", 3..=7), i % 60_000);
            (src.join(" "), tgt)
        })
        .collect()
}

pub fn lexicon(pairs: &[(String, String)]) -> BilingualLexicon {
    BilingualLexicon::from_pairs(pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
}
