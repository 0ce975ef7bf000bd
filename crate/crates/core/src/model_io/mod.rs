//! Reading and writing model artifacts.
//!
//! An artifact directory holds three files:
//!
//! * `vocab.txt`: one token per line, LF endings, id = line index.
//! * `embeddings.safetensors`: `u64` little-endian header length, a JSON
//!   header naming a single `"embedding"` tensor, then the row-major
//!   little-endian binary32 payload.
//! * `artifact.json`: provenance metadata.

mod artifact;
mod embeddings;
mod vocab;

pub use artifact::{
    load_artifact, save_artifact, ArtifactMetadata, ModelArtifact, Strategy, EMBEDDINGS_FILE,
    METADATA_FILE, VOCAB_FILE,
};
pub use embeddings::{
    decode_container, encode_container, read_embeddings, write_embeddings, EmbeddingMatrix,
};
pub use vocab::{read_vocab, write_vocab, Vocabulary, REQUIRED_SPECIALS, UNK_TOKEN};
