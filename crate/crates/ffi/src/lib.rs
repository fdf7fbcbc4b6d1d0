//! C ABI over `langsuit`.
//!
//! Conventions:
//! - Fallible functions return [`LsStatus`] and write results through out
//!   pointers, which are left untouched on failure.
//! - Strings are NUL-terminated UTF-8.
//! - Handles (`LsCorpus`, `LsModel`) are created by `*_load`/`*_train`/
//!   `*_combine` and released with the matching `*_free`. Freeing NULL is a
//!   no-op.
//! - Handles are immutable after creation and may be shared across threads.

mod status;

use std::collections::BTreeMap;
use std::ffi::{c_char, CStr};
use std::fs::File;
use std::io::{BufReader, BufWriter};

use langsuit::clone::{self, CloneParams};
use langsuit::corpus::{self, Corpus, LoadOptions, Split};
use langsuit::embed::{self, EmbedConfig, EmbeddingModel};
use langsuit::metrics::{self, EvalPair, MeteorConfig, PerfTimeRecord, RankedQuery};
use langsuit::{select, token};

pub use status::{ls_last_error_message, LsStatus};
use status::{guard, Fail, FfiResult};

/// A loaded corpus.
pub struct LsCorpus(Corpus);

/// A trained embedding model.
pub struct LsModel(EmbeddingModel);

/// Embedding hyperparameters; start from `ls_embed_config_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LsEmbedConfig {
    pub dim: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub lr: f64,
    pub min_count: u64,
    pub ngram_buckets: usize,
    pub max_tokens: usize,
    pub include_docstrings: bool,
    pub threads: usize,
}

impl From<&LsEmbedConfig> for EmbedConfig {
    fn from(c: &LsEmbedConfig) -> Self {
        EmbedConfig {
            dim: c.dim,
            epochs: c.epochs,
            negatives: c.negatives,
            lr: c.lr,
            min_count: c.min_count,
            ngram_buckets: c.ngram_buckets,
            max_tokens: c.max_tokens,
            include_docstrings: c.include_docstrings,
            threads: c.threads,
        }
    }
}

/// Two-sided Mann-Whitney U test result.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LsMannWhitney {
    pub u_a: f64,
    pub u_b: f64,
    pub z: f64,
    /// Normal approximation.
    pub p: f64,
    /// Exact permutation p; meaningful only when `has_exact`.
    pub p_exact: f64,
    pub has_exact: bool,
}

fn null(what: &str) -> Fail {
    Fail(LsStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, n: usize, what: &str) -> FfiResult<&'a [T]> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn strings<'a>(p: *const *const c_char, n: usize, what: &str) -> FfiResult<Vec<&'a str>> {
    slice_arg(p, n, what)?
        .iter()
        .map(|&s| str_arg(s, what))
        .collect()
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn ls_embed_config_default() -> LsEmbedConfig {
    let c = EmbedConfig::default();
    LsEmbedConfig {
        dim: c.dim,
        epochs: c.epochs,
        negatives: c.negatives,
        lr: c.lr,
        min_count: c.min_count,
        ngram_buckets: c.ngram_buckets,
        max_tokens: c.max_tokens,
        include_docstrings: c.include_docstrings,
        threads: c.threads,
    }
}

// ---------------------------------------------------------------------------
// Corpora

/// Loads a JSONL (or `.gz`) file. `split` is one of train, valid, test,
/// unsplit; NULL means unsplit.
///
/// # Safety
/// String arguments must be NULL or valid NUL-terminated strings; `out`
/// must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ls_corpus_load(
    path: *const c_char,
    language: *const c_char,
    split: *const c_char,
    lenient: bool,
    out: *mut *mut LsCorpus,
) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        let language = str_arg(language, "language")?;
        let split: Split = if split.is_null() {
            Split::Unsplit
        } else {
            str_arg(split, "split")?.parse()?
        };
        let c = corpus::load_jsonl(path, language, split, LoadOptions { lenient })?;
        *out = Box::into_raw(Box::new(LsCorpus(c)));
        Ok(())
    })
}

/// Number of documents; 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_corpus_len(corpus: *const LsCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.len())
}

/// Concatenates `n` corpora into a new "combined" corpus.
///
/// # Safety
/// `corpora` must point to `n` live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_corpus_combine(
    corpora: *const *const LsCorpus,
    n: usize,
    out: *mut *mut LsCorpus,
) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let refs = slice_arg(corpora, n, "corpora")?
            .iter()
            .map(|&c| ref_arg(c, "corpus").map(|c| &c.0))
            .collect::<FfiResult<Vec<&Corpus>>>()?;
        let c = corpus::combine(&refs)?;
        *out = Box::into_raw(Box::new(LsCorpus(c)));
        Ok(())
    })
}

/// # Safety
/// `corpus` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ls_corpus_free(corpus: *mut LsCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Number of plaintext tokens in `code`.
///
/// # Safety
/// `code` must be NULL or a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_token_count(code: *const c_char, out: *mut usize) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = token::token_count(str_arg(code, "code")?);
        Ok(())
    })
}

/// Number of maximal cross-corpus clone pairs of at least `min_tokens`
/// tokens.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_textual_similarity(
    candidate: *const LsCorpus,
    target: *const LsCorpus,
    min_tokens: usize,
    out: *mut u64,
) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let c = clone::textual_similarity(
            &ref_arg(candidate, "candidate")?.0,
            &ref_arg(target, "target")?.0,
            &CloneParams::with_min_tokens(min_tokens),
        )?;
        *out = c.count;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Embeddings

/// Trains a model; `config` NULL means defaults.
///
/// # Safety
/// `corpus` must be live; `config` NULL or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_model_train(
    corpus: *const LsCorpus,
    config: *const LsEmbedConfig,
    seed: u64,
    out: *mut *mut LsModel,
) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let corpus = &ref_arg(corpus, "corpus")?.0;
        let config = config.as_ref().map(EmbedConfig::from).unwrap_or_default();
        let m = embed::train(corpus, &config, seed)?;
        *out = Box::into_raw(Box::new(LsModel(m)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_model_load(path: *const c_char, out: *mut *mut LsModel) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        let f = File::open(path).map_err(|e| Fail(LsStatus::Io, format!("{path}: {e}")))?;
        let m = embed::read_model(BufReader::new(f))?;
        *out = Box::into_raw(Box::new(LsModel(m)));
        Ok(())
    })
}

/// # Safety
/// `model` must be live; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ls_model_save(model: *const LsModel, path: *const c_char) -> LsStatus {
    guard(|| {
        let model = &ref_arg(model, "model")?.0;
        let path = str_arg(path, "path")?;
        let f = File::create(path).map_err(|e| Fail(LsStatus::Io, format!("{path}: {e}")))?;
        embed::write_model(model, BufWriter::new(f))?;
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ls_model_free(model: *mut LsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Mean pairwise cosine between candidate and target document embeddings.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_semantic_similarity(
    model: *const LsModel,
    candidate: *const LsCorpus,
    target: *const LsCorpus,
    out: *mut f64,
) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = embed::semantic_similarity(
            &ref_arg(model, "model")?.0,
            &ref_arg(candidate, "candidate")?.0,
            &ref_arg(target, "target")?.0,
        )?;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Selection and metrics

/// Suitability `(sem + text) / 2` per language and whether it reaches
/// `theta`. Inputs are normalized scores in `[0, 1]`; outputs are written
/// in input order.
///
/// # Safety
/// Every array must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn ls_suitability(
    languages: *const *const c_char,
    sem_norm: *const f64,
    text_norm: *const f64,
    n: usize,
    theta: f64,
    out_suitability: *mut f64,
    out_selected: *mut bool,
) -> LsStatus {
    guard(|| {
        let langs = strings(languages, n, "languages")?;
        let sem = slice_arg(sem_norm, n, "sem_norm")?;
        let text = slice_arg(text_norm, n, "text_norm")?;
        if out_suitability.is_null() || out_selected.is_null() {
            return Err(null("output array"));
        }
        let mut s = BTreeMap::new();
        let mut t = BTreeMap::new();
        for (i, l) in langs.iter().enumerate() {
            if s.insert(l.to_string(), sem[i]).is_some() {
                return Err(Fail(LsStatus::InvalidArgument, format!("language {l:?} repeated")));
            }
            t.insert(l.to_string(), text[i]);
        }
        let report = select::suitability(&s, &t, theta)?;
        let suit = std::slice::from_raw_parts_mut(out_suitability, n);
        let sel = std::slice::from_raw_parts_mut(out_selected, n);
        for (i, l) in langs.iter().enumerate() {
            let row = report.row(l).expect("row per language");
            suit[i] = row.suitability;
            sel[i] = row.selected;
        }
        Ok(())
    })
}

unsafe fn pairs(hyps: *const *const c_char, refs: *const *const c_char, n: usize) -> FfiResult<Vec<EvalPair>> {
    let h = strings(hyps, n, "hypotheses")?;
    let r = strings(refs, n, "references")?;
    Ok(h.iter().zip(&r).map(|(h, r)| EvalPair::from_text(h, r)).collect())
}

/// Smoothed sentence BLEU averaged over `n` whitespace-tokenized pairs,
/// in percent.
///
/// # Safety
/// `hyps` and `refs` must each hold `n` strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_bleu(
    hyps: *const *const c_char,
    refs: *const *const c_char,
    n: usize,
    max_n: usize,
    out: *mut f64,
) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = metrics::bleu(&pairs(hyps, refs, n)?, max_n)?;
        Ok(())
    })
}

/// METEOR averaged over `n` pairs, lowercased, optional stem stage.
///
/// # Safety
/// `hyps` and `refs` must each hold `n` strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_meteor(
    hyps: *const *const c_char,
    refs: *const *const c_char,
    n: usize,
    stem: bool,
    out: *mut f64,
) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg = MeteorConfig {
            stem,
            ..Default::default()
        };
        *out = metrics::meteor(&pairs(hyps, refs, n)?, &cfg)?;
        Ok(())
    })
}

/// Mean reciprocal rank. `ranks[i]` is the 1-based rank of the correct
/// candidate among `candidates`, or 0 when it was not retrieved.
///
/// # Safety
/// `ranks` must hold `n` elements; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_mrr(ranks: *const usize, n: usize, candidates: usize, out: *mut f64) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let qs: Vec<RankedQuery> = slice_arg(ranks, n, "ranks")?
            .iter()
            .enumerate()
            .map(|(i, &r)| RankedQuery {
                qid: i.to_string(),
                candidates,
                rank: (r > 0).then_some(r),
            })
            .collect();
        *out = metrics::mrr(&qs)?;
        Ok(())
    })
}

/// # Safety
/// `a` and `b` must hold `na` and `nb` elements; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_mann_whitney_u(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    out: *mut LsMannWhitney,
) -> LsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = metrics::mann_whitney_u(slice_arg(a, na, "a")?, slice_arg(b, nb, "b")?)?;
        *out = LsMannWhitney {
            u_a: r.u_a,
            u_b: r.u_b,
            z: r.z,
            p: r.p,
            p_exact: r.p_exact.unwrap_or(f64::NAN),
            has_exact: r.p_exact.is_some(),
        };
        Ok(())
    })
}

/// Performance-to-time ratio per record, written in input order.
///
/// # Safety
/// All arrays must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn ls_ptr(
    performance: *const f64,
    fine_tune_time: *const f64,
    n: usize,
    out: *mut f64,
) -> LsStatus {
    guard(|| {
        let perf = slice_arg(performance, n, "performance")?;
        let time = slice_arg(fine_tune_time, n, "fine_tune_time")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let records: Vec<PerfTimeRecord> = (0..n)
            .map(|i| PerfTimeRecord {
                model: i.to_string(),
                performance: perf[i],
                fine_tune_time: time[i],
            })
            .collect();
        let map = metrics::ptr(&records)?;
        let out = std::slice::from_raw_parts_mut(out, n);
        for (i, o) in out.iter_mut().enumerate() {
            *o = map[&i.to_string()];
        }
        Ok(())
    })
}
