//! Negative-sampling training of n-gram embeddings.
//!
//! Every in-vocabulary token of a sentence is a prediction target. Its
//! context is the average input vector of all sentence n-grams that do not
//! cover the target position; the target word's output vector is pulled
//! towards that average and `negatives` sampled words are pushed away.
//!
//! Input-vector updates are accumulated over a sentence and applied once at
//! its end, which keeps the cost linear in sentence length. Output vectors
//! are updated immediately.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vocab::Vocab;
use super::{EmbedConfig, EmbeddingModel};
use crate::corpus::Corpus;
use crate::token;
use crate::{Error, Result};

/// Row-major f32 matrix shared between workers without locks. Reads and
/// writes are individually atomic (relaxed); concurrent read-modify-write
/// races simply lose updates.
struct SharedMatrix {
    data: Vec<AtomicU32>,
    dim: usize,
}

impl SharedMatrix {
    fn from_vec(v: Vec<f32>, dim: usize) -> Self {
        SharedMatrix {
            data: v.into_iter().map(|x| AtomicU32::new(x.to_bits())).collect(),
            dim,
        }
    }

    fn row(&self, i: u32) -> &[AtomicU32] {
        let s = i as usize * self.dim;
        &self.data[s..s + self.dim]
    }

    fn read(&self, i: u32, out: &mut [f32]) {
        for (o, a) in out.iter_mut().zip(self.row(i)) {
            *o = f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    fn add_to(&self, i: u32, acc: &mut [f32]) {
        for (o, a) in acc.iter_mut().zip(self.row(i)) {
            *o += f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    fn dot(&self, i: u32, v: &[f32]) -> f32 {
        self.row(i)
            .iter()
            .zip(v)
            .map(|(a, x)| f32::from_bits(a.load(Ordering::Relaxed)) * x)
            .sum()
    }

    fn axpy(&self, i: u32, scale: f32, v: &[f32]) {
        for (a, x) in self.row(i).iter().zip(v) {
            let cur = f32::from_bits(a.load(Ordering::Relaxed));
            a.store((cur + scale * x).to_bits(), Ordering::Relaxed);
        }
    }

    fn into_vec(self) -> Vec<f32> {
        self.data
            .into_iter()
            .map(|a| f32::from_bits(a.into_inner()))
            .collect()
    }
}

fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

struct Trainer<'a> {
    vocab: &'a Vocab,
    input: SharedMatrix,
    output: SharedMatrix,
    negatives: usize,
    sampler: Option<WeightedIndex<f64>>,
    dim: usize,
}

/// Per-worker scratch space.
struct Scratch {
    sum: Vec<f32>,
    h: Vec<f32>,
    grad: Vec<f32>,
    tmp: Vec<f32>,
    total_grad: Vec<f32>,
    /// Scaled context gradient per sentence position (0 for non-targets).
    per_target: Vec<f32>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Scratch {
            sum: vec![0.0; dim],
            h: vec![0.0; dim],
            grad: vec![0.0; dim],
            tmp: vec![0.0; dim],
            total_grad: vec![0.0; dim],
            per_target: Vec::new(),
        }
    }
}

impl Trainer<'_> {
    fn sentence(&self, ids: &[u32], lr: f32, rng: &mut impl Rng, s: &mut Scratch) {
        let dim = self.dim;
        let feats = &self.vocab.features_of_ids(ids);
        if feats.len() < 2 {
            return;
        }
        // first feature index starting at each position
        let mut first = vec![feats.len(); ids.len() + 1];
        for (k, f) in feats.iter().enumerate().rev() {
            first[f.start as usize] = k;
        }
        for p in (0..ids.len()).rev() {
            if first[p] == feats.len() {
                first[p] = first[p + 1];
            }
        }

        s.sum.iter_mut().for_each(|x| *x = 0.0);
        for f in feats {
            self.input.add_to(f.index, &mut s.sum);
        }
        s.total_grad.iter_mut().for_each(|x| *x = 0.0);
        s.per_target.clear();
        s.per_target.resize(ids.len() * dim, 0.0);

        for t in 0..ids.len() {
            let target = ids[t];
            if target == Vocab::OOV {
                continue;
            }
            // features covering t start in t-2..=t
            let lo = first[t.saturating_sub(2)];
            let hi = first[t + 1];
            s.h.copy_from_slice(&s.sum);
            let mut covering = 0;
            for f in &feats[lo..hi] {
                if (f.start as usize) + f.len as usize > t {
                    covering += 1;
                    self.input.read(f.index, &mut s.tmp);
                    for (h, x) in s.h.iter_mut().zip(&s.tmp) {
                        *h -= x;
                    }
                }
            }
            let n_ctx = feats.len() - covering;
            if n_ctx == 0 {
                continue;
            }
            let inv = 1.0 / n_ctx as f32;
            s.h.iter_mut().for_each(|x| *x *= inv);

            s.grad.iter_mut().for_each(|x| *x = 0.0);
            self.update_output(target, 1.0, lr, s);
            if let Some(sampler) = &self.sampler {
                for _ in 0..self.negatives {
                    let neg = loop {
                        let n = sampler.sample(rng) as u32;
                        if n != target {
                            break n;
                        }
                    };
                    self.update_output(neg, 0.0, lr, s);
                }
            }
            let slot = &mut s.per_target[t * dim..(t + 1) * dim];
            for ((p, g), tot) in slot.iter_mut().zip(&s.grad).zip(s.total_grad.iter_mut()) {
                *p = g * inv;
                *tot += *p;
            }
        }

        // each feature receives the gradient of every target it did not cover
        for f in feats.iter() {
            s.tmp.copy_from_slice(&s.total_grad);
            for t in f.start as usize..f.start as usize + f.len as usize {
                for (x, p) in s.tmp.iter_mut().zip(&s.per_target[t * dim..(t + 1) * dim]) {
                    *x -= p;
                }
            }
            self.input.axpy(f.index, 1.0, &s.tmp);
        }
    }

    fn update_output(&self, word: u32, label: f32, lr: f32, s: &mut Scratch) {
        let score = sigmoid(self.output.dot(word, &s.h));
        let g = lr * (label - score);
        self.output.read(word, &mut s.tmp);
        for (acc, o) in s.grad.iter_mut().zip(&s.tmp) {
            *acc += g * o;
        }
        self.output.axpy(word, g, &s.h);
    }
}

fn sentences(corpus: &Corpus, cfg: &EmbedConfig) -> Vec<Vec<String>> {
    let mut out = Vec::with_capacity(corpus.len());
    for doc in &corpus.documents {
        let mut toks = token::normalize_plaintext(&doc.code);
        if toks.len() > cfg.max_tokens {
            log::debug!(
                "document {} truncated from {} to {} tokens",
                doc.id,
                toks.len(),
                cfg.max_tokens
            );
            toks.truncate(cfg.max_tokens);
        }
        out.push(toks);
        if cfg.include_docstrings {
            if let Some(d) = doc.docstring.as_deref().filter(|d| !d.trim().is_empty()) {
                let mut toks = token::normalize_plaintext(d);
                toks.truncate(cfg.max_tokens);
                out.push(toks);
            }
        }
    }
    out
}

fn worker_seed(seed: u64, epoch: usize, worker: usize) -> u64 {
    seed ^ (epoch as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (worker as u64 + 1).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
}

/// Trains an embedding model on every document of `corpus`.
///
/// With `config.threads == 1` the result depends only on the corpus, the
/// config and `seed`.
pub fn train(corpus: &Corpus, config: &EmbedConfig, seed: u64) -> Result<EmbeddingModel> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyInput("cannot train embeddings on an empty corpus"));
    }
    let sents = sentences(corpus, config);
    let (vocab, counts) = Vocab::build(
        sents.iter().map(Vec::as_slice),
        config.min_count,
        config.ngram_buckets,
    );
    if vocab.word_count() == 0 {
        return Err(Error::EmptyVocabulary);
    }
    log::info!(
        "embedding vocabulary: {} words, {} n-grams",
        vocab.word_count(),
        vocab.len() - vocab.word_count()
    );
    let id_sents: Vec<Vec<u32>> = sents.iter().map(|s| vocab.word_ids(s)).collect();
    drop(sents);

    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 1.0 / dim as f32;
    let init: Vec<f32> = (0..vocab.len() * dim)
        .map(|_| rng.gen_range(-bound..bound))
        .collect();
    let sampler = if vocab.word_count() > 1 {
        Some(
            WeightedIndex::new(counts.iter().map(|&c| (c as f64).sqrt()))
                .expect("positive word counts"),
        )
    } else {
        None
    };
    let trainer = Trainer {
        vocab: &vocab,
        input: SharedMatrix::from_vec(init, dim),
        output: SharedMatrix::from_vec(vec![0.0; vocab.word_count() * dim], dim),
        negatives: config.negatives,
        sampler,
        dim,
    };

    let targets_per_epoch: u64 = id_sents
        .iter()
        .map(|s| s.iter().filter(|&&w| w != Vocab::OOV).count() as u64)
        .sum();
    let total = (targets_per_epoch * config.epochs as u64).max(1);
    let processed = AtomicU64::new(0);
    let base_lr = config.lr as f32;
    let lr_at = |done: u64| base_lr * (1.0 - done as f32 / total as f32).max(1e-4);

    let mut order: Vec<usize> = (0..id_sents.len()).collect();
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let run_shard = |worker: usize, shard: &[usize]| {
            let mut wrng = ChaCha8Rng::seed_from_u64(worker_seed(seed, epoch, worker));
            let mut scratch = Scratch::new(dim);
            for &i in shard {
                let ids = &id_sents[i];
                let lr = lr_at(processed.load(Ordering::Relaxed));
                trainer.sentence(ids, lr, &mut wrng, &mut scratch);
                let n = ids.iter().filter(|&&w| w != Vocab::OOV).count() as u64;
                processed.fetch_add(n, Ordering::Relaxed);
            }
        };
        if config.threads == 1 {
            run_shard(0, &order);
        } else {
            let chunk = order.len().div_ceil(config.threads).max(1);
            std::thread::scope(|scope| {
                for (w, shard) in order.chunks(chunk).enumerate() {
                    let run = &run_shard;
                    scope.spawn(move || run(w, shard));
                }
            });
        }
    }

    Ok(EmbeddingModel {
        dim,
        vectors: trainer.input.into_vec(),
        vocab,
        config: config.clone(),
    })
}
