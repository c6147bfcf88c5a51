//! On-disk formats: embedding files, fitted PCA models and trained
//! classifiers.

mod embeddings;
pub mod logreg;
pub mod pcam;

pub use embeddings::{parse_embeddings, serialize_embeddings, serialize_to_vec, EmbeddingFormat};

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use wordpca_core::EmbeddingSet;

use crate::Result;

pub fn read_embeddings_file(path: &Path, format: EmbeddingFormat) -> Result<EmbeddingSet> {
    let reader = BufReader::with_capacity(1 << 20, File::open(path)?);
    parse_embeddings(reader, format)
}

pub fn write_embeddings_file(e: &EmbeddingSet, format: EmbeddingFormat, path: &Path) -> Result<()> {
    serialize_embeddings(e, format, BufWriter::new(File::create(path)?))
}
