//! Core algorithms for dissecting word embeddings through their principal
//! components.
//!
//! The crate is `no_std` and only needs `alloc`. Vectors are stored as `f32`;
//! every statistic (means, covariances, dot products, losses) is accumulated
//! in `f64`. File formats, experiment orchestration and the command line live
//! in the `wordpca` crate.

#![no_std]

extern crate alloc;

pub mod classifier;
pub mod embedding;
mod error;
pub mod linalg;
pub mod matrix;
pub mod pca;
pub mod postprocess;
pub mod text;

pub use classifier::{accuracy, predict, train_logreg, LogRegConfig, LogRegModel, TrainingSummary};
pub use embedding::EmbeddingSet;
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use pca::{explained_variance_ratio, fit_pca, project, project_matrix, ComponentRange, PcaModel};
pub use postprocess::{
    center, component_projection, component_values, ppa, ppa_pca_reduce, ppa_pca_reduce_with, split_projection,
    PpaConfig, PpaTransform, SplitBand,
};
pub use text::{
    compose_sentence, cosine, eval_word_similarity, spearman, SimilarityDataset, SimilarityPair, SimilarityResult,
};
