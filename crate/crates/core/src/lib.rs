//! Translate a pretrained language model's vocabulary and token-embedding
//! layer from a source language into a target language through a bilingual
//! lexicon.
//!
//! The crate is organised around the artifact it rewrites:
//!
//! * [`model_io`] reads and writes vocabulary files, the embedding tensor
//!   container and the artifact metadata document.
//! * [`tokenizer`] is an uncased BERT basic tokenizer plus greedy WordPiece.
//! * [`lexicon`] parses and fingerprints bilingual word-pair files.
//! * [`translator`] holds the four strategies: lexicon walk mapping (LWM),
//!   vocabulary expansion (VE), one-on-one mapping (VOM) and input-side
//!   text rewriting (VTM).
//! * [`analysis`] covers corpus coverage, artifact diffs, norm statistics and
//!   the evaluation metrics (ERR, pre-training effort, rescaling).
//! * [`cli`] wires everything into the `lexiport` executable.
//!
//! Numeric code is generic over [`Scalar`] (`f32` and `f64`); the on-disk
//! container is always binary32, so the concrete aliases below are what most
//! callers want.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod lexicon;
pub mod model_io;
pub mod scalar;
pub mod tokenizer;
pub mod translator;

pub use error::{Error, Result};
pub use lexicon::{BilingualLexicon, DelimiterMode, LexiconEntry, LexiconStats};
pub use model_io::{ArtifactMetadata, EmbeddingMatrix, ModelArtifact, Strategy, Vocabulary};
pub use scalar::Scalar;
pub use tokenizer::TokenizationResult;
pub use translator::{PhraseEmbedding, TranslateOptions, TranslationReport};

/// Binary32 embedding matrix, the layout stored on disk.
pub type Embeddings = EmbeddingMatrix<f32>;
/// Binary64 embedding matrix, handy for analysis in higher precision.
pub type Embeddings64 = EmbeddingMatrix<f64>;
/// Artifact with binary32 embeddings.
pub type Artifact = ModelArtifact<f32>;
/// Artifact with binary64 embeddings (in-memory only).
pub type Artifact64 = ModelArtifact<f64>;
