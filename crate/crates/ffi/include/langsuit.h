#ifndef LANGSUIT_H
#define LANGSUIT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call. On anything but `LS_STATUS_OK`,
// `ls_last_error_message` describes the failure.
typedef enum {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_POINTER = 1,
  LS_STATUS_INVALID_UTF8 = 2,
  LS_STATUS_INVALID_ARGUMENT = 3,
  LS_STATUS_IO = 4,
  LS_STATUS_PARSE = 5,
  LS_STATUS_EMPTY_INPUT = 6,
  // A score could not be computed: zero norms, no embeddable documents,
  // a non-positive maximum, or no clone pairs at all.
  LS_STATUS_DEGENERATE = 7,
  LS_STATUS_MODEL_FORMAT = 8,
  LS_STATUS_PANIC = 9,
} LsStatus;

// A loaded corpus.
typedef struct LsCorpus LsCorpus;

// A trained embedding model.
typedef struct LsModel LsModel;

// Embedding hyperparameters; start from `ls_embed_config_default`.
typedef struct {
  size_t dim;
  size_t epochs;
  size_t negatives;
  double lr;
  uint64_t min_count;
  size_t ngram_buckets;
  size_t max_tokens;
  bool include_docstrings;
  size_t threads;
} LsEmbedConfig;

// Two-sided Mann-Whitney U test result.
typedef struct {
  double u_a;
  double u_b;
  double z;
  // Normal approximation.
  double p;
  // Exact permutation p; meaningful only when `has_exact`.
  double p_exact;
  bool has_exact;
} LsMannWhitney;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *ls_version(void);

LsEmbedConfig ls_embed_config_default(void);

// Loads a JSONL (or `.gz`) file. `split` is one of train, valid, test,
// unsplit; NULL means unsplit.
//
// # Safety
// String arguments must be NULL or valid NUL-terminated strings; `out`
// must be NULL or writable.
LsStatus ls_corpus_load(const char *path,
                        const char *language,
                        const char *split,
                        bool lenient,
                        LsCorpus **out);

// Number of documents; 0 for NULL.
//
// # Safety
// `corpus` must be NULL or a live handle.
size_t ls_corpus_len(const LsCorpus *corpus);

// Concatenates `n` corpora into a new "combined" corpus.
//
// # Safety
// `corpora` must point to `n` live handles; `out` must be writable.
LsStatus ls_corpus_combine(const LsCorpus *const *corpora, size_t n, LsCorpus **out);

// # Safety
// `corpus` must be NULL or a handle not yet freed.
void ls_corpus_free(LsCorpus *corpus);

// Number of plaintext tokens in `code`.
//
// # Safety
// `code` must be NULL or a NUL-terminated string; `out` writable.
LsStatus ls_token_count(const char *code, size_t *out);

// Number of maximal cross-corpus clone pairs of at least `min_tokens`
// tokens.
//
// # Safety
// Handles must be live; `out` writable.
LsStatus ls_textual_similarity(const LsCorpus *candidate,
                               const LsCorpus *target,
                               size_t min_tokens,
                               uint64_t *out);

// Trains a model; `config` NULL means defaults.
//
// # Safety
// `corpus` must be live; `config` NULL or valid; `out` writable.
LsStatus ls_model_train(const LsCorpus *corpus,
                        const LsEmbedConfig *config,
                        uint64_t seed,
                        LsModel **out);

// # Safety
// `path` must be a NUL-terminated string; `out` writable.
LsStatus ls_model_load(const char *path, LsModel **out);

// # Safety
// `model` must be live; `path` a NUL-terminated string.
LsStatus ls_model_save(const LsModel *model, const char *path);

// # Safety
// `model` must be NULL or a handle not yet freed.
void ls_model_free(LsModel *model);

// Mean pairwise cosine between candidate and target document embeddings.
//
// # Safety
// Handles must be live; `out` writable.
LsStatus ls_semantic_similarity(const LsModel *model,
                                const LsCorpus *candidate,
                                const LsCorpus *target,
                                double *out);

// Suitability `(sem + text) / 2` per language and whether it reaches
// `theta`. Inputs are normalized scores in `[0, 1]`; outputs are written
// in input order.
//
// # Safety
// Every array must hold `n` elements.
LsStatus ls_suitability(const char *const *languages,
                        const double *sem_norm,
                        const double *text_norm,
                        size_t n,
                        double theta,
                        double *out_suitability,
                        bool *out_selected);

// Smoothed sentence BLEU averaged over `n` whitespace-tokenized pairs,
// in percent.
//
// # Safety
// `hyps` and `refs` must each hold `n` strings; `out` writable.
LsStatus ls_bleu(const char *const *hyps,
                 const char *const *refs,
                 size_t n,
                 size_t max_n,
                 double *out);

// METEOR averaged over `n` pairs, lowercased, optional stem stage.
//
// # Safety
// `hyps` and `refs` must each hold `n` strings; `out` writable.
LsStatus ls_meteor(const char *const *hyps,
                   const char *const *refs,
                   size_t n,
                   bool stem,
                   double *out);

// Mean reciprocal rank. `ranks[i]` is the 1-based rank of the correct
// candidate among `candidates`, or 0 when it was not retrieved.
//
// # Safety
// `ranks` must hold `n` elements; `out` writable.
LsStatus ls_mrr(const size_t *ranks, size_t n, size_t candidates, double *out);

// # Safety
// `a` and `b` must hold `na` and `nb` elements; `out` writable.
LsStatus ls_mann_whitney_u(const double *a,
                           size_t na,
                           const double *b,
                           size_t nb,
                           LsMannWhitney *out);

// Performance-to-time ratio per record, written in input order.
//
// # Safety
// All arrays must hold `n` elements.
LsStatus ls_ptr(const double *performance, const double *fine_tune_time, size_t n, double *out);

// Message of the last failed call on this thread, or NULL when the last
// call succeeded. Valid until the next call into this library on the same
// thread.
const char *ls_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LANGSUIT_H */
