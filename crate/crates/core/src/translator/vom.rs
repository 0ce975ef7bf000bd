use std::collections::HashMap;
use std::time::Instant;

use super::{output_metadata, TranslateOptions, TranslationReport};
use crate::error::Result;
use crate::lexicon::BilingualLexicon;
use crate::model_io::{ModelArtifact, Strategy};
use crate::scalar::Scalar;

/// One-on-one mapping: each matching vocabulary token is renamed to its
/// first-listed target in place. Embeddings are untouched and the vocabulary
/// keeps its size.
///
/// Tokens are visited in id order. A target already present in the vocabulary
/// as it stands at that point (including earlier renames) leaves the token
/// unchanged and counts one collision.
pub fn vom_translate<T: Scalar>(
    artifact: &ModelArtifact<T>,
    lexicon: &BilingualLexicon,
    _opts: &TranslateOptions,
) -> Result<(ModelArtifact<T>, TranslationReport)> {
    let start = Instant::now();
    let vocab = artifact.vocabulary();
    let first_target = lexicon.first_target_by_source();
    let mut report = TranslationReport::for_lexicon(lexicon);

    let mut out_vocab = vocab.clone();
    let mut hits: HashMap<&str, usize> = HashMap::new();
    for (id, token) in vocab.tokens().iter().enumerate() {
        if vocab.is_special(token) {
            continue;
        }
        let Some(&target) = first_target.get(token.as_str()) else {
            continue;
        };
        *hits.entry(target).or_insert(0) += 1;
        if out_vocab.contains(target) {
            report.targets_collided_existing += 1;
            continue;
        }
        out_vocab.rename(id as u32, target.to_string())?;
        report.entries_used += 1;
    }

    report.targets_with_multiple_sources = hits.values().filter(|&&n| n > 1).count() as u64;
    report.elapsed = start.elapsed();
    let meta = output_metadata(artifact, Strategy::Vom, lexicon, &report);
    Ok((
        ModelArtifact::new(out_vocab, artifact.embeddings().clone(), meta)?,
        report,
    ))
}
