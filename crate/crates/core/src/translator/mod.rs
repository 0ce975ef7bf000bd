//! Strategies that carry a source-language model into a target language.
//!
//! * [`lwm_translate`] (lexicon walk mapping). Every lexicon entry
//!   contributes the mean embedding of its source phrase's tokens to its
//!   target word; repeated targets average those per-entry means.
//! * [`ve_translate`] (vocabulary expansion). Vocabulary tokens found
//!   verbatim as a source phrase lend their row to the first-listed target.
//! * [`vom_translate`] (one-on-one mapping). Matching tokens are renamed in
//!   place and the vocabulary size is unchanged.
//! * [`vtm_rewrite`] leaves the model alone and rewrites target-language
//!   text word by word into the source language.
//!
//! All arithmetic on embeddings accumulates in `f64` and rounds once into the
//! matrix scalar type. Source rows are never modified by LWM or VE.

use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lexicon::BilingualLexicon;
use crate::model_io::{ArtifactMetadata, EmbeddingMatrix, ModelArtifact, Strategy, Vocabulary};
use crate::scalar::Scalar;
use crate::tokenizer;

mod lwm;
mod ve;
mod vom;
mod vtm;

pub use lwm::lwm_translate;
pub use ve::ve_translate;
pub use vom::vom_translate;
pub use vtm::{vtm_rewrite, VtmRewriter};

/// Counters describing one translation run.
///
/// `elapsed` is wall-clock time and is not serialized.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TranslationReport {
    pub entries_total: u64,
    pub entries_used: u64,
    pub entries_skipped_all_unk: u64,
    pub entries_skipped_malformed: u64,
    pub targets_added: u64,
    pub targets_collided_existing: u64,
    pub targets_with_multiple_sources: u64,
    pub accent_strip_collisions: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl TranslationReport {
    pub(crate) fn for_lexicon(lexicon: &BilingualLexicon) -> Self {
        Self {
            entries_total: lexicon.len() as u64,
            entries_skipped_malformed: lexicon.skipped_lines() as u64,
            accent_strip_collisions: lexicon.accent_collisions() as u64,
            ..Self::default()
        }
    }

    pub fn elapsed_seconds(&self) -> f64 {
        self.elapsed.as_secs_f64()
    }

    /// Pretty JSON with a trailing newline, fields in declaration order.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}

/// Mean embedding of a source phrase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseEmbedding<T> {
    pub vector: Vec<T>,
    pub contributing_tokens: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TranslateOptions {
    /// Worker threads for per-entry work; `None` uses rayon's default.
    /// Output is identical for every value.
    pub threads: Option<usize>,
}

impl TranslateOptions {
    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads: Some(threads),
        }
    }

    pub(crate) fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R> {
        match self.threads {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Ids of the phrase's tokens with `[UNK]` removed.
pub(crate) fn known_token_ids(phrase: &str, vocab: &Vocabulary) -> Vec<u32> {
    let unk = vocab.unk_id();
    let mut ids = tokenizer::tokenize_ids(phrase, vocab);
    ids.retain(|&id| id != unk);
    ids
}

/// Overwrite `acc` with the `f64` mean of the given rows, summed in order.
/// A single row is reproduced exactly (including the sign of zero).
pub(crate) fn mean_rows_into<T: Scalar>(ids: &[u32], emb: &EmbeddingMatrix<T>, acc: &mut [f64]) {
    debug_assert!(!ids.is_empty());
    let (first, rest) = ids.split_first().expect("at least one row");
    for (a, v) in acc.iter_mut().zip(emb.row(*first as usize)) {
        *a = v.widen();
    }
    for &id in rest {
        for (a, v) in acc.iter_mut().zip(emb.row(id as usize)) {
            *a += v.widen();
        }
    }
    let n = ids.len() as f64;
    for a in acc.iter_mut() {
        *a /= n;
    }
}

/// Dimension-wise mean of the phrase's known token embeddings, or `None`
/// when every token is `[UNK]`.
pub fn embed_phrase<T: Scalar>(phrase: &str, artifact: &ModelArtifact<T>) -> Option<PhraseEmbedding<T>> {
    let ids = known_token_ids(phrase, artifact.vocabulary());
    if ids.is_empty() {
        return None;
    }
    let mut acc = vec![0.0f64; artifact.embeddings().dim()];
    mean_rows_into(&ids, artifact.embeddings(), &mut acc);
    Some(PhraseEmbedding {
        vector: acc.into_iter().map(T::from_f64_rounded).collect(),
        contributing_tokens: ids.len(),
    })
}

/// Dispatch on an artifact strategy. `Identity` returns the input unchanged.
pub fn translate<T: Scalar>(
    strategy: Strategy,
    artifact: &ModelArtifact<T>,
    lexicon: &BilingualLexicon,
    opts: &TranslateOptions,
) -> Result<(ModelArtifact<T>, TranslationReport)> {
    match strategy {
        Strategy::Lwm => lwm_translate(artifact, lexicon, opts),
        Strategy::Ve => ve_translate(artifact, lexicon, opts),
        Strategy::Vom => vom_translate(artifact, lexicon, opts),
        Strategy::Identity => Ok((artifact.clone(), TranslationReport::for_lexicon(lexicon))),
    }
}

pub(crate) fn output_metadata<T: Scalar>(
    input: &ModelArtifact<T>,
    strategy: Strategy,
    lexicon: &BilingualLexicon,
    report: &TranslationReport,
) -> ArtifactMetadata {
    ArtifactMetadata {
        source_model: input.metadata().source_model.clone(),
        strategy,
        lexicon_sha256: Some(lexicon.sha256().to_string()),
        original_vocab_size: input.vocabulary().len(),
        embedding_dim: input.embeddings().dim(),
        created_entries_used: report.entries_used,
        entries_skipped: report.entries_total - report.entries_used,
    }
}
