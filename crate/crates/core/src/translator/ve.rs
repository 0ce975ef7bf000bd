use std::collections::{HashMap, HashSet};
use std::time::Instant;

use super::{output_metadata, TranslateOptions, TranslationReport};
use crate::error::Result;
use crate::lexicon::BilingualLexicon;
use crate::model_io::{ModelArtifact, Strategy};
use crate::scalar::Scalar;

/// Vocabulary expansion: a vocabulary token that appears verbatim as a source
/// phrase lends its row, copied exactly, to that source's first-listed
/// target. When several tokens share a target the lowest id wins.
pub fn ve_translate<T: Scalar>(
    artifact: &ModelArtifact<T>,
    lexicon: &BilingualLexicon,
    _opts: &TranslateOptions,
) -> Result<(ModelArtifact<T>, TranslationReport)> {
    let start = Instant::now();
    let vocab = artifact.vocabulary();
    let emb = artifact.embeddings();
    let first_target = lexicon.first_target_by_source();
    let mut report = TranslationReport::for_lexicon(lexicon);

    let mut out_vocab = vocab.clone();
    let mut out_emb = emb.clone();
    let mut hits: HashMap<&str, usize> = HashMap::new();
    let mut collided: HashSet<&str> = HashSet::new();
    for (id, token) in vocab.tokens().iter().enumerate() {
        if vocab.is_special(token) {
            continue;
        }
        let Some(&target) = first_target.get(token.as_str()) else {
            continue;
        };
        let n = hits.entry(target).or_insert(0);
        *n += 1;
        if vocab.contains(target) {
            collided.insert(target);
        } else if *n == 1 {
            out_vocab.push(target.to_string())?;
            out_emb.push_row(emb.row(id))?;
            report.entries_used += 1;
        }
    }

    report.targets_added = (out_vocab.len() - vocab.len()) as u64;
    report.targets_collided_existing = collided.len() as u64;
    report.targets_with_multiple_sources = hits.values().filter(|&&n| n > 1).count() as u64;
    report.elapsed = start.elapsed();
    let meta = output_metadata(artifact, Strategy::Ve, lexicon, &report);
    Ok((ModelArtifact::new(out_vocab, out_emb, meta)?, report))
}
