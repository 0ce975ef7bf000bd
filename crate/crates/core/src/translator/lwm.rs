use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use super::{known_token_ids, mean_rows_into, output_metadata, TranslateOptions, TranslationReport};
use crate::error::Result;
use crate::lexicon::BilingualLexicon;
use crate::model_io::{ModelArtifact, Strategy};
use crate::scalar::Scalar;

/// Lexicon walk mapping.
///
/// Each entry's source phrase is tokenized with the source vocabulary and
/// its known-token rows are averaged. Targets collect one such mean per
/// entry (in lexicon order) and receive the mean of those means. Targets
/// already present in the source vocabulary keep their original row; new
/// targets are appended in order of first appearance.
pub fn lwm_translate<T: Scalar>(
    artifact: &ModelArtifact<T>,
    lexicon: &BilingualLexicon,
    opts: &TranslateOptions,
) -> Result<(ModelArtifact<T>, TranslationReport)> {
    let start = Instant::now();
    let vocab = artifact.vocabulary();
    let emb = artifact.embeddings();
    let dim = emb.dim();
    let entries = lexicon.entries();
    let mut report = TranslationReport::for_lexicon(lexicon);

    let token_ids: Vec<Vec<u32>> = opts.run(|| {
        entries
            .par_iter()
            .map(|e| known_token_ids(&e.source_phrase, vocab))
            .collect()
    })?;

    // group contributing entries by target, keeping first-occurrence order
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, (entry, ids)) in entries.iter().zip(&token_ids).enumerate() {
        if ids.is_empty() {
            report.entries_skipped_all_unk += 1;
            continue;
        }
        report.entries_used += 1;
        let target = entry.target_word.as_str();
        groups
            .entry(target)
            .or_insert_with(|| {
                order.push(target);
                Vec::new()
            })
            .push(i);
    }

    let mut new_targets: Vec<&str> = Vec::new();
    for target in &order {
        let members = &groups[target];
        if members.len() > 1 {
            report.targets_with_multiple_sources += 1;
        }
        if vocab.contains(target) {
            report.targets_collided_existing += 1;
        } else {
            new_targets.push(target);
        }
    }

    let mut new_rows = vec![T::zero(); new_targets.len() * dim];
    if dim > 0 {
        opts.run(|| {
            new_rows
                .par_chunks_mut(dim)
                .zip(new_targets.par_iter())
                .for_each(|(out, target)| {
                    let members = &groups[target];
                    let mut entry_mean = vec![0.0f64; dim];
                    let mut acc = vec![0.0f64; dim];
                    for (k, &i) in members.iter().enumerate() {
                        mean_rows_into(&token_ids[i], emb, &mut entry_mean);
                        if k == 0 {
                            acc.copy_from_slice(&entry_mean);
                        } else {
                            acc.iter_mut().zip(&entry_mean).for_each(|(a, m)| *a += m);
                        }
                    }
                    let n = members.len() as f64;
                    for (o, a) in out.iter_mut().zip(&acc) {
                        *o = T::from_f64_rounded(a / n);
                    }
                });
        })?;
    }

    let mut out_vocab = vocab.clone();
    for target in &new_targets {
        out_vocab.push(target.to_string())?;
    }
    let mut values = Vec::with_capacity(emb.values().len() + new_rows.len());
    values.extend_from_slice(emb.values());
    values.extend_from_slice(&new_rows);
    let out_emb = crate::model_io::EmbeddingMatrix::new(out_vocab.len(), dim, values)?;

    report.targets_added = new_targets.len() as u64;
    report.elapsed = start.elapsed();
    let meta = output_metadata(artifact, Strategy::Lwm, lexicon, &report);
    Ok((ModelArtifact::new(out_vocab, out_emb, meta)?, report))
}
