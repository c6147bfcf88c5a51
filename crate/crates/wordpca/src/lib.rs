//! File formats, experiment harness and reports for principal-component
//! analysis of word embeddings. The algorithms themselves live in
//! [`wordpca_core`].

pub mod datasets;
mod error;
pub mod formats;
pub mod harness;
pub mod report;

pub use error::{Error, Result};
pub use formats::EmbeddingFormat;
pub use wordpca_core as core;
