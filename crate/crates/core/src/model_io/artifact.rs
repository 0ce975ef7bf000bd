use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::embeddings::{read_embeddings, write_embeddings, EmbeddingMatrix};
use super::vocab::{read_vocab, write_vocab, Vocabulary};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const VOCAB_FILE: &str = "vocab.txt";
pub const EMBEDDINGS_FILE: &str = "embeddings.safetensors";
pub const METADATA_FILE: &str = "artifact.json";

/// How an artifact was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Identity,
    Lwm,
    Ve,
    Vom,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Identity => "identity",
            Strategy::Lwm => "lwm",
            Strategy::Ve => "ve",
            Strategy::Vom => "vom",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Contents of `artifact.json`. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtifactMetadata {
    pub source_model: String,
    pub strategy: Strategy,
    pub lexicon_sha256: Option<String>,
    pub original_vocab_size: usize,
    pub embedding_dim: usize,
    pub created_entries_used: u64,
    pub entries_skipped: u64,
}

impl ArtifactMetadata {
    pub fn identity(source_model: impl Into<String>, vocab_size: usize, dim: usize) -> Self {
        Self {
            source_model: source_model.into(),
            strategy: Strategy::Identity,
            lexicon_sha256: None,
            original_vocab_size: vocab_size,
            embedding_dim: dim,
            created_entries_used: 0,
            entries_skipped: 0,
        }
    }

    /// Pretty JSON with a trailing newline; byte-stable for equal values.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metadata is always serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let meta: Self = serde_json::from_str(text).map_err(|e| Error::Metadata(e.to_string()))?;
        if let Some(h) = &meta.lexicon_sha256 {
            if h.len() != 64 || !h.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
                return Err(Error::Metadata(format!(
                    "lexicon_sha256 must be 64 lowercase hex digits, got {h:?}"
                )));
            }
        }
        Ok(meta)
    }
}

/// Vocabulary, embedding matrix and provenance, validated together.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact<T> {
    vocabulary: Vocabulary,
    embeddings: EmbeddingMatrix<T>,
    metadata: ArtifactMetadata,
}

impl<T: Scalar> ModelArtifact<T> {
    pub fn new(
        vocabulary: Vocabulary,
        embeddings: EmbeddingMatrix<T>,
        metadata: ArtifactMetadata,
    ) -> Result<Self> {
        if vocabulary.len() != embeddings.rows() {
            return Err(Error::ShapeMismatch {
                vocab: vocabulary.len(),
                rows: embeddings.rows(),
            });
        }
        if metadata.embedding_dim != embeddings.dim() {
            return Err(Error::Metadata(format!(
                "embedding_dim is {} but the matrix has {} columns",
                metadata.embedding_dim,
                embeddings.dim()
            )));
        }
        if metadata.original_vocab_size > vocabulary.len() {
            return Err(Error::Metadata(format!(
                "original_vocab_size {} exceeds vocabulary size {}",
                metadata.original_vocab_size,
                vocabulary.len()
            )));
        }
        Ok(Self {
            vocabulary,
            embeddings,
            metadata,
        })
    }

    /// Wrap a plain vocabulary/matrix pair as an untranslated artifact.
    pub fn identity(
        source_model: impl Into<String>,
        vocabulary: Vocabulary,
        embeddings: EmbeddingMatrix<T>,
    ) -> Result<Self> {
        let meta = ArtifactMetadata::identity(source_model, vocabulary.len(), embeddings.dim());
        Self::new(vocabulary, embeddings, meta)
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn embeddings(&self) -> &EmbeddingMatrix<T> {
        &self.embeddings
    }

    pub fn metadata(&self) -> &ArtifactMetadata {
        &self.metadata
    }

    pub fn into_parts(self) -> (Vocabulary, EmbeddingMatrix<T>, ArtifactMetadata) {
        (self.vocabulary, self.embeddings, self.metadata)
    }

    /// Look up the embedding row of `token`.
    pub fn embedding_of(&self, token: &str) -> Option<&[T]> {
        self.vocabulary
            .id(token)
            .map(|id| self.embeddings.row(id as usize))
    }

    /// Bitwise equality of all three parts.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.vocabulary == other.vocabulary
            && self.metadata == other.metadata
            && self.embeddings.bit_eq(&other.embeddings)
    }
}

fn require(dir: &Path, name: &str) -> Result<std::path::PathBuf> {
    let p = dir.join(name);
    if !p.is_file() {
        return Err(Error::MissingFile(p));
    }
    Ok(p)
}

pub fn load_artifact(dir: impl AsRef<Path>) -> Result<ModelArtifact<f32>> {
    let dir = dir.as_ref();
    let vocab_path = require(dir, VOCAB_FILE)?;
    let emb_path = require(dir, EMBEDDINGS_FILE)?;
    let meta_path = require(dir, METADATA_FILE)?;

    let vocabulary = read_vocab(&vocab_path)?;
    let embeddings = read_embeddings(&emb_path)?;
    if vocabulary.len() != embeddings.rows() {
        return Err(Error::ShapeMismatch {
            vocab: vocabulary.len(),
            rows: embeddings.rows(),
        });
    }
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let metadata = ArtifactMetadata::from_json(&text)?;
    ModelArtifact::new(vocabulary, embeddings, metadata)
}

pub fn save_artifact(artifact: &ModelArtifact<f32>, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_vocab(&artifact.vocabulary, dir.join(VOCAB_FILE))?;
    write_embeddings(&artifact.embeddings, dir.join(EMBEDDINGS_FILE))?;
    let meta_path = dir.join(METADATA_FILE);
    fs::write(&meta_path, artifact.metadata.to_json()).map_err(|e| Error::io(&meta_path, e))
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
    fn size_mismatch_names_both_counts() {
        let v = vocab(&["a", "b", "c", "d", "e"]);
        let m = EmbeddingMatrix::<f32>::zeros(9, 2);
        let err = ModelArtifact::identity("m", v, m).unwrap_err();
        assert!(err.to_string().contains("10 vs 9"), "{err}");
    }

    #[test]
    fn strategy_survives_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let v = vocab(&["hola"]);
        let m = EmbeddingMatrix::new(6, 1, vec![0.5f32, 1.0, -2.0, 3.0, 4.0, 5.0]).unwrap();
        let mut meta = ArtifactMetadata::identity("bert-base-uncased", 5, 1);
        meta.strategy = Strategy::Lwm;
        meta.lexicon_sha256 = Some("ab".repeat(32));
        let a = ModelArtifact::new(v, m, meta).unwrap();
        save_artifact(&a, dir.path()).unwrap();
        let b = load_artifact(dir.path()).unwrap();
        assert!(a.bit_eq(&b));
        assert_eq!(b.metadata().strategy, Strategy::Lwm);
    }

    #[test]
    fn missing_file_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let a = ModelArtifact::identity("m", vocab(&[]), EmbeddingMatrix::<f32>::zeros(5, 2)).unwrap();
        save_artifact(&a, dir.path()).unwrap();
        fs::remove_file(dir.path().join(METADATA_FILE)).unwrap();
        let err = load_artifact(dir.path()).unwrap_err();
        assert!(err.to_string().contains(METADATA_FILE), "{err}");
    }

    #[test]
    fn metadata_keys_are_in_fixed_order() {
        let json = ArtifactMetadata::identity("m", 5, 2).to_json();
        let keys: Vec<usize> = [
            "source_model",
            "strategy",
            "lexicon_sha256",
            "original_vocab_size",
            "embedding_dim",
            "created_entries_used",
            "entries_skipped",
        ]
        .iter()
        .map(|k| json.find(&format!("\"{k}\"")).unwrap())
        .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(json.contains("\"identity\""));
    }

    #[test]
    fn bad_metadata_is_rejected() {
        assert!(ArtifactMetadata::from_json("{}").is_err());
        let mut meta = ArtifactMetadata::identity("m", 5, 2);
        meta.lexicon_sha256 = Some("XYZ".into());
        assert!(ArtifactMetadata::from_json(&meta.to_json()).is_err());
        let text = ArtifactMetadata::identity("m", 5, 2)
            .to_json()
            .replace("\"identity\"", "\"vtm\"");
        assert!(ArtifactMetadata::from_json(&text).is_err());
    }

    #[test]
    fn original_size_cannot_exceed_vocabulary() {
        let mut meta = ArtifactMetadata::identity("m", 6, 2);
        meta.original_vocab_size = 6;
        assert!(ModelArtifact::new(vocab(&[]), EmbeddingMatrix::<f32>::zeros(5, 2), meta).is_err());
    }
}
