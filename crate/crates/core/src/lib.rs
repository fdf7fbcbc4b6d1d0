//! Corpus-similarity toolkit for choosing which high-resource programming
//! languages to fine-tune on when the target language has little data.
//!
//! The pipeline is:
//!
//! 1. [`corpus`] loads CodeSearchNet-style JSONL files.
//! 2. [`token`] turns every function into a plaintext token stream.
//! 3. [`embed`] trains unigram/bigram/trigram embeddings on the combined
//!    corpus and scores each candidate language by mean pairwise cosine
//!    against the target.
//! 4. [`clone`] counts maximal cross-corpus token clones.
//! 5. [`select`] averages the two normalized scores and thresholds them.
//!
//! [`metrics`] and [`analyze`] carry the evaluation side: BLEU, METEOR, MRR,
//! Mann-Whitney U, performance-to-time ratios and code-length quartile bins.

pub mod analyze;
pub mod cli;
pub mod clone;
pub mod corpus;
pub mod embed;
mod error;
pub mod metrics;
pub mod select;
pub mod token;

pub use error::{Error, Result};

/// Version tag of the tokenizer rules; recorded in reports so scores can be
/// traced back to the exact token definition.
pub const TOKENIZER_VERSION: &str = "plaintext-v1";
