//! Grid execution: preprocess → embed → classify → evaluate for every cell.
//!
//! Every random choice is seeded from `run.seed` and the cell's identity, so
//! results do not depend on thread count or scheduling. A failing cell is
//! recorded with status `failed` and does not stop the grid.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use super::results::{read_results_file, sort_rows, write_results_file, CellStatus, ResultRow};
use super::tables::{emit_full, emit_summary, write_table};
use crate::corpus::{stratified_split, CategoryLabel, LabeledCorpus};
use crate::error::{Error, Result};
use crate::evaluate::evaluate;
use crate::models::{ClassifierSpec, ModelKind, TrainedModel};
use crate::preprocess::{apply_all, PipelineResources, PreprocessConfig, TokenStream};
use crate::vectorize::{EmbeddingKind, FeatureVector};

/// Seed for one component of a cell: first 8 bytes (little-endian) of
/// `sha256("{root}/{code}/{embedding}/{component}")`.
pub fn derive_seed(root: u64, code: PreprocessConfig, embedding: EmbeddingKind, component: &str) -> u64 {
    let digest = Sha256::digest(format!("{root}/{code}/{}/{component}", embedding.name()).as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Wall-clock time of one cell (classifier fit + predict), or of an embedding
/// fit when `model` is `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub code: PreprocessConfig,
    pub embedding: EmbeddingKind,
    pub model: Option<ModelKind>,
    pub seconds: f64,
}

/// Rows in canonical order plus timings.
#[derive(Clone, Debug, Default)]
pub struct GridOutcome {
    pub rows: Vec<ResultRow>,
    pub timings: Vec<Timing>,
}

impl GridOutcome {
    pub fn failed(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| !r.is_ok())
    }
}

struct Split<'a> {
    train_texts: Vec<&'a str>,
    test_texts: Vec<&'a str>,
    train_y: Vec<CategoryLabel>,
    test_y: Vec<CategoryLabel>,
    labels: Vec<CategoryLabel>,
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

fn guarded<T>(f: impl FnOnce() -> Result<T>) -> std::result::Result<T, String> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => Ok(v),
        Ok(Err(e)) => Err(e.to_string()),
        Err(p) => Err(format!("panic: {}", panic_message(p))),
    }
}

struct CellContext<'a> {
    cfg: &'a RunConfig,
    split: &'a Split<'a>,
    code: PreprocessConfig,
    embedding: EmbeddingKind,
}

impl CellContext<'_> {
    fn row(&self, model: ModelKind, seed: u64) -> ResultRow {
        ResultRow {
            code: self.code,
            embedding: self.embedding,
            model,
            fs_macro: f64::NAN,
            acc: f64::NAN,
            prc_macro: f64::NAN,
            rc_macro: f64::NAN,
            fs_weighted: f64::NAN,
            prc_weighted: f64::NAN,
            rc_weighted: f64::NAN,
            n_train: self.split.train_y.len(),
            n_test: self.split.test_y.len(),
            seconds: 0.0,
            seed,
            status: CellStatus::Failed,
            metadata_json: String::new(),
        }
    }

    fn failed(&self, model: ModelKind, seed: u64, message: &str) -> ResultRow {
        let mut r = self.row(model, seed);
        r.metadata_json = json!({ "error": message }).to_string();
        r
    }

    fn classify(&self, model: ModelKind, x_train: &[FeatureVector], x_test: &[FeatureVector]) -> (ResultRow, Timing) {
        let seed = derive_seed(self.cfg.run.seed, self.code, self.embedding, model.name());
        let spec = ClassifierSpec::new(self.cfg.models.params(model), seed);
        let start = Instant::now();
        let outcome = guarded(|| {
            let m = TrainedModel::fit(&spec, x_train, &self.split.train_y)?;
            let pred = m.predict(x_test)?;
            let (_, macro_, weighted) = evaluate(&self.split.labels, &self.split.test_y, &pred)?;
            Ok((m.metadata(), macro_, weighted))
        });
        let seconds = start.elapsed().as_secs_f64();
        let timing = Timing { code: self.code, embedding: self.embedding, model: Some(model), seconds };
        let mut row = match outcome {
            Ok((meta, m, w)) => {
                let mut r = self.row(model, seed);
                r.fs_macro = m.f1;
                r.acc = m.accuracy;
                r.prc_macro = m.precision;
                r.rc_macro = m.recall;
                r.fs_weighted = w.f1;
                r.prc_weighted = w.precision;
                r.rc_weighted = w.recall;
                r.status = CellStatus::Ok;
                r.metadata_json = meta.to_string();
                r
            }
            Err(msg) => self.failed(model, seed, &msg),
        };
        if self.cfg.run.record_seconds {
            row.seconds = seconds;
        }
        (row, timing)
    }
}

/// All cells of one embedding under one code.
fn run_embedding(
    cfg: &RunConfig,
    split: &Split<'_>,
    code: PreprocessConfig,
    embedding: EmbeddingKind,
    train: &[TokenStream],
    test: &[TokenStream],
) -> (Vec<ResultRow>, Vec<Timing>) {
    let ctx = CellContext { cfg, split, code, embedding };
    let seed = derive_seed(cfg.run.seed, code, embedding, "embedding");
    let spec = cfg.embeddings.spec(embedding).with_seed(seed);
    let start = Instant::now();
    let fitted = guarded(|| {
        let e = spec.fit(train)?;
        Ok((e.transform_all(train), e.transform_all(test)))
    });
    let mut timings = vec![Timing { code, embedding, model: None, seconds: start.elapsed().as_secs_f64() }];
    let models = cfg.models();
    match fitted {
        Ok((x_train, x_test)) => {
            let cells: Vec<(ResultRow, Timing)> =
                models.par_iter().map(|&m| ctx.classify(m, &x_train, &x_test)).collect();
            let (rows, t): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
            timings.extend(t);
            (rows, timings)
        }
        Err(msg) => {
            let msg = format!("embedding failed: {msg}");
            let rows = models
                .iter()
                .map(|&m| ctx.failed(m, derive_seed(cfg.run.seed, code, embedding, m.name()), &msg))
                .collect();
            (rows, timings)
        }
    }
}

/// Every cell under one preprocessing code.
fn run_code(
    cfg: &RunConfig,
    split: &Split<'_>,
    resources: &PipelineResources,
    code: PreprocessConfig,
) -> (Vec<ResultRow>, Vec<Timing>) {
    let streams = apply_all(split.train_texts.iter().copied(), code, resources)
        .and_then(|tr| Ok((tr, apply_all(split.test_texts.iter().copied(), code, resources)?)));
    let (train, test) = match streams {
        Ok(s) => s,
        Err(e) => {
            let mut rows = Vec::new();
            for embedding in cfg.embeddings() {
                let ctx = CellContext { cfg, split, code, embedding };
                for m in cfg.models() {
                    rows.push(ctx.failed(m, derive_seed(cfg.run.seed, code, embedding, m.name()), &e.to_string()));
                }
            }
            return (rows, Vec::new());
        }
    };
    let parts: Vec<(Vec<ResultRow>, Vec<Timing>)> =
        cfg.embeddings().par_iter().map(|&e| run_embedding(cfg, split, code, e, &train, &test)).collect();
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for (r, t) in parts {
        rows.extend(r);
        timings.extend(t);
    }
    (rows, timings)
}

fn make_split<'a>(train: &'a LabeledCorpus, test: &'a LabeledCorpus) -> Split<'a> {
    Split {
        train_texts: train.texts().collect(),
        test_texts: test.texts().collect(),
        train_y: train.targets(),
        test_y: test.targets(),
        labels: train.labels().to_vec(),
    }
}

fn with_pool<T: Send>(cfg: &RunConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    match cfg.run.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Runs the configured grid in memory on an already loaded corpus.
/// `on_code` is called after each code finishes, with that code's rows.
pub fn evaluate_grid(
    cfg: &RunConfig,
    corpus: &LabeledCorpus,
    on_code: &(dyn Fn(PreprocessConfig, &[ResultRow]) -> Result<()> + Sync),
    skip: &(dyn Fn(PreprocessConfig) -> Option<Vec<ResultRow>> + Sync),
) -> Result<GridOutcome> {
    cfg.validate()?;
    let (train, test) = stratified_split(corpus, &cfg.split.spec())?;
    let split = make_split(&train, &test);
    let resources = cfg.resources()?;
    let codes = cfg.codes();
    let parts = with_pool(cfg, || {
        codes
            .par_iter()
            .map(|&code| {
                if let Some(rows) = skip(code) {
                    return Ok((rows, Vec::new()));
                }
                let (rows, timings) = run_code(cfg, &split, &resources, code);
                on_code(code, &rows)?;
                Ok((rows, timings))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut out = GridOutcome::default();
    for (r, t) in parts {
        out.rows.extend(r);
        out.timings.extend(t);
    }
    sort_rows(&mut out.rows);
    Ok(out)
}

/// In-memory grid with no callbacks.
pub fn evaluate_grid_simple(cfg: &RunConfig, corpus: &LabeledCorpus) -> Result<GridOutcome> {
    evaluate_grid(cfg, corpus, &|_, _| Ok(()), &|_| None)
}

/// Files written by [`run_grid`].
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub results: PathBuf,
    pub timings: PathBuf,
    pub summary_csv: PathBuf,
    pub summary_md: PathBuf,
    pub full_csv: PathBuf,
    pub full_md: PathBuf,
}

impl RunArtifacts {
    pub fn in_dir(dir: &Path) -> Self {
        RunArtifacts {
            dir: dir.to_path_buf(),
            results: dir.join("results.csv"),
            timings: dir.join("timings.csv"),
            summary_csv: dir.join("summary.csv"),
            summary_md: dir.join("summary.md"),
            full_csv: dir.join("full.csv"),
            full_md: dir.join("full.md"),
        }
    }
}

pub fn write_timings(timings: &[Timing], path: &Path) -> Result<()> {
    let mut sorted = timings.to_vec();
    sorted.sort_by_key(|t| {
        (t.code.index(), t.embedding, t.model.map(|m| ModelKind::TABLE_ORDER.iter().position(|&k| k == m)))
    });
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["code", "embedding", "model", "seconds"])?;
    for t in &sorted {
        w.write_record([
            t.code.code(),
            t.embedding.name().to_string(),
            t.model.map(|m| m.name().to_string()).unwrap_or_else(|| "embedding".into()),
            format!("{:.6}", t.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Loads the corpus, runs the grid and writes results, timings and both tables
/// into `cfg.run.out`. Rows of each finished code are persisted under
/// `partial/` as the run progresses so an interrupted run can resume.
pub fn run_grid(cfg: &RunConfig) -> Result<(GridOutcome, RunArtifacts)> {
    cfg.validate()?;
    let corpus = cfg.load_corpus()?;
    let art = RunArtifacts::in_dir(&cfg.run.out);
    fs::create_dir_all(&art.dir)?;
    let partial = art.dir.join("partial");
    let fingerprint = cfg.to_toml_string();
    let fp_path = partial.join("config.toml");
    let reusable = cfg.run.resume && fs::read_to_string(&fp_path).is_ok_and(|s| s == fingerprint);
    if !reusable && partial.exists() {
        fs::remove_dir_all(&partial)?;
    }
    fs::create_dir_all(&partial)?;
    fs::write(&fp_path, &fingerprint)?;

    let partial_path = |code: PreprocessConfig| partial.join(format!("{}.csv", code.code()));
    let on_code = |code: PreprocessConfig, rows: &[ResultRow]| write_results_file(rows, &partial_path(code));
    let skip = |code: PreprocessConfig| {
        if !reusable {
            return None;
        }
        read_results_file(&partial_path(code)).ok()
    };
    let outcome = evaluate_grid(cfg, &corpus, &on_code, &skip)?;

    write_results_file(&outcome.rows, &art.results)?;
    write_timings(&outcome.timings, &art.timings)?;
    let summary = emit_summary(&outcome.rows)?;
    let full = emit_full(&outcome.rows, &cfg.models)?;
    write_table(&summary, &art.summary_csv, &art.summary_md)?;
    write_table(&full, &art.full_csv, &art.full_md)?;
    fs::remove_dir_all(&partial)?;
    Ok((outcome, art))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_per_component_and_are_stable() {
        let c: PreprocessConfig = "1010".parse().unwrap();
        let a = derive_seed(42, c, EmbeddingKind::Tfidf, "rf");
        assert_eq!(a, derive_seed(42, c, EmbeddingKind::Tfidf, "rf"));
        assert_ne!(a, derive_seed(42, c, EmbeddingKind::Tfidf, "svm"));
        assert_ne!(a, derive_seed(43, c, EmbeddingKind::Tfidf, "rf"));
        assert_ne!(a, derive_seed(42, c, EmbeddingKind::OneHot, "rf"));
    }

    #[test]
    fn small_grid_runs_and_isolates_failures() {
        let cfg = RunConfig::from_toml_str(
            r#"
            [corpus.synth]
            n_docs = 160
            morphology = false
            [preprocess]
            codes = ["0000", "1111"]
            [embeddings]
            enabled = ["onehot", "tfidf"]
            [models]
            enabled = ["nb", "knn"]
            [models.knn]
            k = 1000
            "#,
        )
        .unwrap();
        let corpus = cfg.load_corpus().unwrap();
        let out = evaluate_grid_simple(&cfg, &corpus).unwrap();
        assert_eq!(out.rows.len(), 2 * 2 * 2);
        // KNN with k > n_train fails, NB succeeds.
        for r in &out.rows {
            match r.model {
                ModelKind::Knn => assert!(!r.is_ok() && r.error_message().unwrap().contains("k=1000")),
                _ => assert!(r.is_ok() && r.fs_macro > 0.5, "{r:?}"),
            }
        }
        let again = evaluate_grid_simple(&cfg, &corpus).unwrap();
        let fmt = |o: &GridOutcome| format!("{:?}", o.rows);
        assert_eq!(fmt(&out), fmt(&again));
    }
}
