#ifndef TEXTBENCH_H
#define TEXTBENCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum TbStatus {
  TB_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  TB_STATUS_NULL_POINTER = 1,
  /*
   A string argument was not valid UTF-8.
   */
  TB_STATUS_INVALID_UTF8 = 2,
  /*
   An argument was out of range or inconsistent.
   */
  TB_STATUS_INVALID_ARGUMENT = 3,
  /*
   Invalid configuration (codes, hyperparameters, TOML).
   */
  TB_STATUS_CONFIG = 4,
  /*
   File system error.
   */
  TB_STATUS_IO = 5,
  /*
   Malformed or unusable data (corpus records, model files, training failure).
   */
  TB_STATUS_DATA = 6,
  /*
   The grid finished but at least one cell failed.
   */
  TB_STATUS_CELLS_FAILED = 7,
  /*
   Internal panic caught at the boundary.
   */
  TB_STATUS_PANIC = 8,
} TbStatus;

/*
 Embedding method.
 */
typedef enum TbEmbeddingKind {
  TB_EMBEDDING_KIND_ONE_HOT = 0,
  TB_EMBEDDING_KIND_TFIDF = 1,
  TB_EMBEDDING_KIND_WORD2_VEC = 2,
} TbEmbeddingKind;

/*
 Classifier, in table order.
 */
typedef enum TbModelKind {
  TB_MODEL_KIND_KNN = 0,
  TB_MODEL_KIND_NB = 1,
  TB_MODEL_KIND_RF = 2,
  TB_MODEL_KIND_DT = 3,
  TB_MODEL_KIND_SVM = 4,
  TB_MODEL_KIND_LR = 5,
  TB_MODEL_KIND_AB = 6,
} TbModelKind;

/*
 Averaging mode for [`tb_metrics`].
 */
typedef enum TbAveraging {
  TB_AVERAGING_MACRO = 0,
  TB_AVERAGING_WEIGHTED = 1,
} TbAveraging;

/*
 Opaque labelled corpus.
 */
typedef struct TbCorpus TbCorpus;

/*
 Opaque fitted embedding together with the preprocessing code it was fitted under.
 */
typedef struct TbEmbedding TbEmbedding;

/*
 Opaque fitted classifier.
 */
typedef struct TbModel TbModel;

/*
 Averaged metrics of a confusion matrix.
 */
typedef struct TbMetrics {
  double accuracy;
  double precision;
  double recall;
  double f1;
} TbMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the calling thread's most recent failure, or "" after a
 success. Owned by the library.
 */
const char *tb_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *tb_version(void);

/*
 Releases a string returned by this library. Null is ignored.
 */
void tb_string_free(char *s);

/*
 Applies a preprocessing code (e.g. "1111") to `text` with the bundled
 stopword list and stemmer. `*out` receives the space-joined tokens.
 */
enum TbStatus tb_preprocess(const char *code, const char *text, char **out);

/*
 Loads a corpus from a CSV or JSONL file (format guessed from the extension).
 */
enum TbStatus tb_corpus_load(const char *path, struct TbCorpus **out);

/*
 Generates the synthetic corpus.
 */
enum TbStatus tb_corpus_synth(size_t n_docs,
                              size_t n_labels,
                              uint64_t seed,
                              bool morphology,
                              struct TbCorpus **out);

/*
 Number of documents; 0 for a null handle.
 */
size_t tb_corpus_len(const struct TbCorpus *corpus);

/*
 Number of distinct labels; 0 for a null handle.
 */
size_t tb_corpus_label_count(const struct TbCorpus *corpus);

void tb_corpus_free(struct TbCorpus *corpus);

/*
 Fits an embedding with default hyperparameters on every document of
 `corpus` after preprocessing with `code`.
 */
enum TbStatus tb_embedding_fit(const struct TbCorpus *corpus,
                               const char *code,
                               enum TbEmbeddingKind kind,
                               uint64_t seed,
                               struct TbEmbedding **out);

/*
 Feature dimension; 0 for a null handle.
 */
size_t tb_embedding_dim(const struct TbEmbedding *embedding);

/*
 Writes the dense feature vector of `text` into `buf`, which must hold
 `len == tb_embedding_dim(embedding)` doubles.
 */
enum TbStatus tb_embedding_transform(const struct TbEmbedding *embedding,
                                     const char *text,
                                     double *buf,
                                     size_t len);

void tb_embedding_free(struct TbEmbedding *embedding);

/*
 Fits a classifier with default hyperparameters on `corpus` embedded by `embedding`.
 */
enum TbStatus tb_model_fit(const struct TbEmbedding *embedding,
                           const struct TbCorpus *corpus,
                           enum TbModelKind kind,
                           uint64_t seed,
                           struct TbModel **out);

/*
 Predicts the label of `text`; `*out_label` must be released with [`tb_string_free`].
 */
enum TbStatus tb_model_predict(const struct TbModel *model,
                               const struct TbEmbedding *embedding,
                               const char *text,
                               char **out_label);

void tb_model_free(struct TbModel *model);

/*
 Averaged metrics of an `n_labels × n_labels` row-major confusion matrix
 (rows = true class, columns = predicted class).
 */
enum TbStatus tb_metrics(const uint64_t *counts,
                         size_t n_labels,
                         enum TbAveraging averaging,
                         struct TbMetrics *out);

/*
 Runs the grid described by a TOML configuration string (may be empty for
 all defaults) and writes results and tables into `out_dir`.
 `*out_cells` (optional) receives the number of cells run. Returns
 `TB_STATUS_CELLS_FAILED` when some cells failed; their errors are in the
 results file.
 */
enum TbStatus tb_run_grid(const char *config_toml, const char *out_dir, size_t *out_cells);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEXTBENCH_H */
