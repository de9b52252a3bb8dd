//! Unsupervised morphological segmentation.
//!
//! A log-linear model scores a word together with each of its candidate
//! parents. Candidates are generated recursively, so a word carrying several
//! suffixes exposes every intermediate stem. Weights are learned without
//! supervision by contrastive estimation against transposed neighbors of the
//! observed words, and a trained model segments words by repeatedly choosing
//! the most probable parent until it prefers to stop.
//!
//! ```no_run
//! use std::sync::Arc;
//! use morphchain::{load_embeddings, load_wordlist, segment, train, ResourceConfig, Resources, TrainConfig};
//!
//! let words = load_wordlist("words.tsv", 1)?;
//! let embeddings = load_embeddings("vectors.txt")?;
//! let resources = Arc::new(Resources::build(words, embeddings, ResourceConfig::default()));
//! let outcome = train(resources, TrainConfig::default())?;
//! println!("{}", segment(&outcome.model, "kitaplarda"));
//! # Ok::<(), morphchain::Error>(())
//! ```

pub mod candgen;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod model;
pub mod persist;
pub mod segmenter;

pub use candgen::{
    generate_candidates, generate_candidates_with, generate_neighbors, Candidate, Neighborhood,
    Side, Transformation,
};
pub use corpus::{cosine, load_embeddings, load_wordlist, EmbeddingTable, WordList};
pub use error::{Error, Result};
pub use eval::{evaluate, load_gold, EvalReport, GoldStandard};
pub use features::{
    build_affix_lexicon, build_correlation, AffixLexicon, CorrelationTable, FeatureExtractor,
    FeatureVector,
};
pub use model::{log_sum_exp, softmax, train, Model, ResourceConfig, Resources, TrainConfig, TrainOutcome};
pub use persist::{load_model, load_model_from, load_model_with, save_model, ModelFile};
pub use segmenter::{segment, segment_batch, Segmentation};
