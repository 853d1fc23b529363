//! C ABI over the textbench library.
//!
//! Conventions:
//! * Every fallible function returns a [`TbStatus`]; outputs go through
//!   out-pointers that are written only on `TB_STATUS_OK`.
//! * On failure, [`tb_last_error`] returns a message for the calling thread,
//!   valid until that thread's next call into this library.
//! * Objects are opaque handles created by `tb_corpus_load`, `tb_corpus_synth`
//!   and the `*_fit` functions, and released with the matching `*_free`.
//!   Strings returned to the caller are released with [`tb_string_free`].
//! * Panics never cross the boundary; they surface as `TB_STATUS_PANIC`.
//!
//! Safety (all `unsafe extern` functions): pointer arguments must be null or
//! point to valid objects of the stated type; strings must be NUL-terminated;
//! handles must come from this library and not be used after being freed.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use textbench::corpus::{load_corpus, synth_corpus, CategoryLabel, CorpusFormat, LabeledCorpus};
use textbench::evaluate::{metrics, Averaging, ConfusionMatrix};
use textbench::harness::{run_grid, RunConfig};
use textbench::models::{ClassifierSpec, ModelKind, TrainedModel};
use textbench::preprocess::{apply_all, apply_pipeline, PipelineResources, PreprocessConfig};
use textbench::vectorize::{Embedding, EmbeddingKind, EmbeddingSpec};
use textbench::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An argument was out of range or inconsistent.
    InvalidArgument = 3,
    /// Invalid configuration (codes, hyperparameters, TOML).
    Config = 4,
    /// File system error.
    Io = 5,
    /// Malformed or unusable data (corpus records, model files, training failure).
    Data = 6,
    /// The grid finished but at least one cell failed.
    CellsFailed = 7,
    /// Internal panic caught at the boundary.
    Panic = 8,
}

/// Embedding method.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbEmbeddingKind {
    OneHot = 0,
    Tfidf = 1,
    Word2Vec = 2,
}

/// Classifier, in table order.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbModelKind {
    Knn = 0,
    Nb = 1,
    Rf = 2,
    Dt = 3,
    Svm = 4,
    Lr = 5,
    Ab = 6,
}

/// Averaging mode for [`tb_metrics`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbAveraging {
    Macro = 0,
    Weighted = 1,
}

/// Averaged metrics of a confusion matrix.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TbMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Opaque labelled corpus.
pub struct TbCorpus {
    inner: LabeledCorpus,
}

/// Opaque fitted embedding together with the preprocessing code it was fitted under.
pub struct TbEmbedding {
    inner: Embedding,
    code: PreprocessConfig,
    resources: PipelineResources,
}

/// Opaque fitted classifier.
pub struct TbModel {
    inner: TrainedModel,
}

impl From<TbEmbeddingKind> for EmbeddingKind {
    fn from(k: TbEmbeddingKind) -> Self {
        match k {
            TbEmbeddingKind::OneHot => EmbeddingKind::OneHot,
            TbEmbeddingKind::Tfidf => EmbeddingKind::Tfidf,
            TbEmbeddingKind::Word2Vec => EmbeddingKind::Word2Vec,
        }
    }
}

impl From<TbModelKind> for ModelKind {
    fn from(k: TbModelKind) -> Self {
        ModelKind::TABLE_ORDER[k as usize]
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Failure carried to the boundary.
struct Fail(TbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config(_) => TbStatus::Config,
            Error::Io(_) => TbStatus::Io,
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::FeatureKindMismatch { .. } => {
                TbStatus::InvalidArgument
            }
            _ => TbStatus::Data,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TbStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            TbStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(TbStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(TbStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(TbStatus::NullPointer, format!("{name} is null")))
}

fn out_arg<T>(p: *mut T, name: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(TbStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn code_arg(s: &str) -> Result<PreprocessConfig, Fail> {
    Ok(s.parse::<PreprocessConfig>()?)
}

fn to_c_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

/// Message describing the calling thread's most recent failure, or "" after a
/// success. Owned by the library.
#[no_mangle]
pub extern "C" fn tb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Applies a preprocessing code (e.g. "1111") to `text` with the bundled
/// stopword list and stemmer. `*out` receives the space-joined tokens.
#[no_mangle]
pub unsafe extern "C" fn tb_preprocess(code: *const c_char, text: *const c_char, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        let code = code_arg(str_arg(code, "code")?)?;
        let text = str_arg(text, "text")?;
        out_arg(out, "out")?;
        let tokens = apply_pipeline(text, code, &PipelineResources::bundled())?;
        *out = to_c_string(&tokens.tokens().join(" "));
        Ok(())
    })
}

/// Loads a corpus from a CSV or JSONL file (format guessed from the extension).
#[no_mangle]
pub unsafe extern "C" fn tb_corpus_load(path: *const c_char, out: *mut *mut TbCorpus) -> TbStatus {
    guard(|| {
        let path = PathBuf::from(str_arg(path, "path")?);
        out_arg(out, "out")?;
        let corpus = load_corpus(&path, CorpusFormat::from_path(&path))?;
        *out = Box::into_raw(Box::new(TbCorpus { inner: corpus }));
        Ok(())
    })
}

/// Generates the synthetic corpus.
#[no_mangle]
pub unsafe extern "C" fn tb_corpus_synth(
    n_docs: usize,
    n_labels: usize,
    seed: u64,
    morphology: bool,
    out: *mut *mut TbCorpus,
) -> TbStatus {
    guard(|| {
        out_arg(out, "out")?;
        let corpus = synth_corpus(n_docs, n_labels, seed, morphology)?;
        *out = Box::into_raw(Box::new(TbCorpus { inner: corpus }));
        Ok(())
    })
}

/// Number of documents; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn tb_corpus_len(corpus: *const TbCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.len())
}

/// Number of distinct labels; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn tb_corpus_label_count(corpus: *const TbCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.labels().len())
}

#[no_mangle]
pub unsafe extern "C" fn tb_corpus_free(corpus: *mut TbCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Fits an embedding with default hyperparameters on every document of
/// `corpus` after preprocessing with `code`.
#[no_mangle]
pub unsafe extern "C" fn tb_embedding_fit(
    corpus: *const TbCorpus,
    code: *const c_char,
    kind: TbEmbeddingKind,
    seed: u64,
    out: *mut *mut TbEmbedding,
) -> TbStatus {
    guard(|| {
        let corpus = ref_arg(corpus, "corpus")?;
        let code = code_arg(str_arg(code, "code")?)?;
        out_arg(out, "out")?;
        let resources = PipelineResources::bundled();
        let docs = apply_all(corpus.inner.texts(), code, &resources)?;
        let embedding = EmbeddingSpec::default_for(kind.into()).with_seed(seed).fit(&docs)?;
        *out = Box::into_raw(Box::new(TbEmbedding { inner: embedding, code, resources }));
        Ok(())
    })
}

/// Feature dimension; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn tb_embedding_dim(embedding: *const TbEmbedding) -> usize {
    embedding.as_ref().map_or(0, |e| e.inner.dim())
}

/// Writes the dense feature vector of `text` into `buf`, which must hold
/// `len == tb_embedding_dim(embedding)` doubles.
#[no_mangle]
pub unsafe extern "C" fn tb_embedding_transform(
    embedding: *const TbEmbedding,
    text: *const c_char,
    buf: *mut f64,
    len: usize,
) -> TbStatus {
    guard(|| {
        let e = ref_arg(embedding, "embedding")?;
        let text = str_arg(text, "text")?;
        out_arg(buf, "buf")?;
        if len != e.inner.dim() {
            return Err(Fail(
                TbStatus::InvalidArgument,
                format!("buffer holds {len} values, dimension is {}", e.inner.dim()),
            ));
        }
        let v = e.inner.transform(&apply_pipeline(text, e.code, &e.resources)?).to_dense();
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(&v);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tb_embedding_free(embedding: *mut TbEmbedding) {
    if !embedding.is_null() {
        drop(Box::from_raw(embedding));
    }
}

/// Fits a classifier with default hyperparameters on `corpus` embedded by `embedding`.
#[no_mangle]
pub unsafe extern "C" fn tb_model_fit(
    embedding: *const TbEmbedding,
    corpus: *const TbCorpus,
    kind: TbModelKind,
    seed: u64,
    out: *mut *mut TbModel,
) -> TbStatus {
    guard(|| {
        let e = ref_arg(embedding, "embedding")?;
        let corpus = ref_arg(corpus, "corpus")?;
        out_arg(out, "out")?;
        let docs = apply_all(corpus.inner.texts(), e.code, &e.resources)?;
        let x = e.inner.transform_all(&docs);
        let model = TrainedModel::fit(&ClassifierSpec::default_for(kind.into(), seed), &x, &corpus.inner.targets())?;
        *out = Box::into_raw(Box::new(TbModel { inner: model }));
        Ok(())
    })
}

/// Predicts the label of `text`; `*out_label` must be released with [`tb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn tb_model_predict(
    model: *const TbModel,
    embedding: *const TbEmbedding,
    text: *const c_char,
    out_label: *mut *mut c_char,
) -> TbStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        let e = ref_arg(embedding, "embedding")?;
        let text = str_arg(text, "text")?;
        out_arg(out_label, "out_label")?;
        let x = e.inner.transform(&apply_pipeline(text, e.code, &e.resources)?);
        let label: CategoryLabel = m.inner.predict_one(&x)?;
        *out_label = to_c_string(label.as_str());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tb_model_free(model: *mut TbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Averaged metrics of an `n_labels × n_labels` row-major confusion matrix
/// (rows = true class, columns = predicted class).
#[no_mangle]
pub unsafe extern "C" fn tb_metrics(
    counts: *const u64,
    n_labels: usize,
    averaging: TbAveraging,
    out: *mut TbMetrics,
) -> TbStatus {
    guard(|| {
        if counts.is_null() {
            return Err(Fail(TbStatus::NullPointer, "counts is null".into()));
        }
        out_arg(out, "out")?;
        if n_labels == 0 {
            return Err(Fail(TbStatus::InvalidArgument, "n_labels must be >= 1".into()));
        }
        let flat = std::slice::from_raw_parts(counts, n_labels * n_labels);
        let rows = flat.chunks(n_labels).map(<[u64]>::to_vec).collect();
        let labels = (0..n_labels).map(|i| CategoryLabel::new(format!("{i}"))).collect();
        let cm = ConfusionMatrix::from_counts(labels, rows)?;
        let avg = match averaging {
            TbAveraging::Macro => Averaging::Macro,
            TbAveraging::Weighted => Averaging::Weighted,
        };
        let r = metrics(&cm, avg);
        *out = TbMetrics { accuracy: r.accuracy, precision: r.precision, recall: r.recall, f1: r.f1 };
        Ok(())
    })
}

/// Runs the grid described by a TOML configuration string (may be empty for
/// all defaults) and writes results and tables into `out_dir`.
/// `*out_cells` (optional) receives the number of cells run. Returns
/// `TB_STATUS_CELLS_FAILED` when some cells failed; their errors are in the
/// results file.
#[no_mangle]
pub unsafe extern "C" fn tb_run_grid(
    config_toml: *const c_char,
    out_dir: *const c_char,
    out_cells: *mut usize,
) -> TbStatus {
    guard(|| {
        let mut cfg = RunConfig::from_toml_str(str_arg(config_toml, "config_toml")?)?;
        cfg.run.out = PathBuf::from(str_arg(out_dir, "out_dir")?);
        let (outcome, _) = run_grid(&cfg)?;
        if !out_cells.is_null() {
            *out_cells = outcome.rows.len();
        }
        let failed = outcome.failed().count();
        if failed > 0 {
            return Err(Fail(TbStatus::CellsFailed, format!("{failed} of {} cells failed", outcome.rows.len())));
        }
        Ok(())
    })
}
