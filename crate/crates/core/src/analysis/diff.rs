use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_io::ModelArtifact;
use crate::scalar::{rows_bit_equal, Scalar};

/// Token-level comparison of two artifacts. Lists follow id order of the
/// artifact they come from (`shared_changed` follows `a`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VocabDiff {
    pub only_in_a: Vec<String>,
    pub only_in_b: Vec<String>,
    pub shared_identical: usize,
    pub shared_changed: Vec<String>,
}

pub fn vocab_diff<T: Scalar>(a: &ModelArtifact<T>, b: &ModelArtifact<T>) -> Result<VocabDiff> {
    let (da, db) = (a.embeddings().dim(), b.embeddings().dim());
    if da != db {
        return Err(Error::DimMismatch(da, db));
    }
    let mut diff = VocabDiff {
        only_in_a: Vec::new(),
        only_in_b: Vec::new(),
        shared_identical: 0,
        shared_changed: Vec::new(),
    };
    for (id, token) in a.vocabulary().tokens().iter().enumerate() {
        match b.embedding_of(token) {
            None => diff.only_in_a.push(token.clone()),
            Some(row) if rows_bit_equal(a.embeddings().row(id), row) => diff.shared_identical += 1,
            Some(_) => diff.shared_changed.push(token.clone()),
        }
    }
    diff.only_in_b = b
        .vocabulary()
        .tokens()
        .iter()
        .filter(|t| !a.vocabulary().contains(t))
        .cloned()
        .collect();
    Ok(diff)
}
