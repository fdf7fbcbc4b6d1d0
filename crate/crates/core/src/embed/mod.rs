//! Unigram/bigram/trigram code embeddings and corpus-level semantic
//! similarity.
//!
//! A document embedding is the average of the input vectors of every
//! in-vocabulary unigram, bigram and trigram of its plaintext tokens. The
//! similarity between two corpora is the mean cosine over all cross pairs of
//! embeddable documents, computed in O(n + m) as the dot product of the two
//! means of unit-normalized document vectors.

mod io;
mod train;
mod vocab;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::token;
use crate::{Error, Result};

pub use io::{read_model, read_text_export, write_model, write_text_export};
pub use train::train;
pub use vocab::{NgramKey, Vocab};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    pub dim: usize,
    pub epochs: usize,
    /// Negative samples per target token.
    pub negatives: usize,
    /// Initial learning rate; decays linearly to zero.
    pub lr: f64,
    /// Unigrams and n-grams seen fewer times are left out of the vocabulary.
    pub min_count: u64,
    /// Upper bound on bigram + trigram entries (most frequent kept).
    pub ngram_buckets: usize,
    /// Documents are cut to this many tokens for training and embedding.
    pub max_tokens: usize,
    /// Also train on docstrings (each as its own sentence).
    pub include_docstrings: bool,
    /// Worker threads. 1 is deterministic; more uses unsynchronized
    /// updates and is not reproducible.
    pub threads: usize,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            dim: 100,
            epochs: 5,
            negatives: 5,
            lr: 0.05,
            min_count: 5,
            ngram_buckets: 1 << 20,
            max_tokens: 1024,
            include_docstrings: false,
            threads: 1,
        }
    }
}

impl EmbedConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidArgument("embedding dim must be >= 2".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidArgument("threads must be >= 1".into()));
        }
        if self.lr.is_nan() || self.lr <= 0.0 {
            return Err(Error::InvalidArgument("learning rate must be > 0".into()));
        }
        if self.max_tokens == 0 {
            return Err(Error::InvalidArgument("max_tokens must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub dim: usize,
    pub vocab: Vocab,
    /// Row-major, one `dim`-length row per vocabulary entry.
    pub vectors: Vec<f32>,
    pub config: EmbedConfig,
}

impl EmbeddingModel {
    pub fn vector(&self, index: usize) -> &[f32] {
        &self.vectors[index * self.dim..(index + 1) * self.dim]
    }

    pub fn lookup(&self, key: &str) -> Option<&[f32]> {
        self.vocab.index_of(key).map(|i| self.vector(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocEmbedding {
    pub vector: Vec<f64>,
    /// Number of in-vocabulary n-grams averaged.
    pub features: usize,
}

impl DocEmbedding {
    /// False when no n-gram was in vocabulary; such documents are left out
    /// of similarity averages.
    pub fn embeddable(&self) -> bool {
        self.features > 0
    }
}

/// Averages the vectors of the in-vocabulary n-grams of `tokens`.
pub fn embed_tokens<S: AsRef<str>>(model: &EmbeddingModel, tokens: &[S]) -> DocEmbedding {
    let tokens = &tokens[..tokens.len().min(model.config.max_tokens)];
    let feats = model.vocab.features(tokens);
    let mut v = vec![0f64; model.dim];
    for f in &feats {
        for (acc, x) in v.iter_mut().zip(model.vector(f.index as usize)) {
            *acc += *x as f64;
        }
    }
    if !feats.is_empty() {
        let n = feats.len() as f64;
        v.iter_mut().for_each(|x| *x /= n);
    }
    DocEmbedding {
        vector: v,
        features: feats.len(),
    }
}

pub fn embed_document(model: &EmbeddingModel, stream: &token::TokenStream) -> DocEmbedding {
    if stream.tokens.len() > model.config.max_tokens {
        log::debug!(
            "document {} truncated from {} to {} tokens",
            stream.doc_id,
            stream.tokens.len(),
            model.config.max_tokens
        );
    }
    embed_tokens(model, &stream.tokens)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(u.len(), v.len()));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Mean of unit-normalized vectors, skipping zero vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitMean {
    pub mean: Vec<f64>,
    /// Number of non-zero vectors that went into the mean.
    pub count: usize,
}

impl UnitMean {
    pub fn of<'a>(dim: usize, vectors: impl IntoIterator<Item = &'a [f64]>) -> UnitMean {
        let mut mean = vec![0f64; dim];
        let mut count = 0;
        for v in vectors {
            let n = norm(v);
            if n == 0.0 {
                continue;
            }
            for (m, x) in mean.iter_mut().zip(v) {
                *m += x / n;
            }
            count += 1;
        }
        if count > 0 {
            mean.iter_mut().for_each(|m| *m /= count as f64);
        }
        UnitMean { mean, count }
    }
}

/// Mean cosine over all cross pairs of non-zero vectors, via
/// `mean_ij cos(a_i, b_j) = <mean_i a_i/|a_i|, mean_j b_j/|b_j|>`.
pub fn mean_pairwise_cosine(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let dim = a.first().or(b.first()).map_or(0, Vec::len);
    if let Some(v) = a.iter().chain(b).find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch(dim, v.len()));
    }
    let ma = UnitMean::of(dim, a.iter().map(Vec::as_slice));
    let mb = UnitMean::of(dim, b.iter().map(Vec::as_slice));
    unit_mean_similarity(&ma, &mb)
}

pub fn unit_mean_similarity(a: &UnitMean, b: &UnitMean) -> Result<f64> {
    if a.count == 0 {
        return Err(Error::NoEmbeddableDocuments("candidate"));
    }
    if b.count == 0 {
        return Err(Error::NoEmbeddableDocuments("target"));
    }
    if a.mean.len() != b.mean.len() {
        return Err(Error::DimensionMismatch(a.mean.len(), b.mean.len()));
    }
    Ok(a.mean.iter().zip(&b.mean).map(|(x, y)| x * y).sum())
}

/// Unit-mean embedding of a whole corpus; reused across candidate languages.
pub fn corpus_unit_mean(model: &EmbeddingModel, corpus: &Corpus) -> UnitMean {
    let mut mean = vec![0f64; model.dim];
    let mut count = 0;
    let mut skipped = 0;
    for doc in &corpus.documents {
        let toks: Vec<&str> = token::tokens(&doc.code).collect();
        let e = embed_tokens(model, &toks);
        let n = norm(&e.vector);
        if !e.embeddable() || n == 0.0 {
            skipped += 1;
            continue;
        }
        for (m, x) in mean.iter_mut().zip(&e.vector) {
            *m += x / n;
        }
        count += 1;
    }
    if skipped > 0 {
        log::info!(
            "{}: {skipped} of {} documents are unembeddable",
            corpus.language,
            corpus.len()
        );
    }
    if count > 0 {
        mean.iter_mut().for_each(|m| *m /= count as f64);
    }
    UnitMean { mean, count }
}

/// Average cosine between every embeddable candidate document and every
/// embeddable target document.
pub fn semantic_similarity(model: &EmbeddingModel, candidate: &Corpus, target: &Corpus) -> Result<f64> {
    let a = corpus_unit_mean(model, candidate);
    let b = corpus_unit_mean(model, target);
    unit_mean_similarity(&a, &b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScoreMap {
    pub raw: BTreeMap<String, f64>,
    pub normalized: BTreeMap<String, f64>,
}

/// Divides every score by the largest. Negative scores are clamped to 0 so
/// normalized values stay in `[0, 1]`.
pub fn normalize_scores(raw: &BTreeMap<String, f64>) -> Result<SimilarityScoreMap> {
    if raw.is_empty() {
        return Err(Error::EmptyInput("no scores to normalize"));
    }
    let max = raw.values().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_nan() || max <= 0.0 {
        return Err(Error::NonPositiveMaximum(max));
    }
    let normalized = raw
        .iter()
        .map(|(k, &v)| {
            let n = if v == max { 1.0 } else { (v / max).max(0.0) };
            (k.clone(), n)
        })
        .collect();
    Ok(SimilarityScoreMap {
        raw: raw.clone(),
        normalized,
    })
}
