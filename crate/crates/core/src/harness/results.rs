//! One CSV row per grid cell.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::preprocess::PreprocessConfig;
use crate::vectorize::EmbeddingKind;

/// Column order of the results file.
pub const RESULTS_HEADER: [&str; 16] = [
    "code",
    "embedding",
    "model",
    "fs_macro",
    "acc",
    "prc_macro",
    "rc_macro",
    "fs_weighted",
    "prc_weighted",
    "rc_weighted",
    "n_train",
    "n_test",
    "seconds",
    "seed",
    "status",
    "metadata_json",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed,
}

/// Metrics of one (code, embedding, model) cell. Failed cells carry NaN metrics
/// and the error message under `"error"` in `metadata_json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub code: PreprocessConfig,
    pub embedding: EmbeddingKind,
    pub model: ModelKind,
    pub fs_macro: f64,
    pub acc: f64,
    pub prc_macro: f64,
    pub rc_macro: f64,
    pub fs_weighted: f64,
    pub prc_weighted: f64,
    pub rc_weighted: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub seconds: f64,
    pub seed: u64,
    pub status: CellStatus,
    pub metadata_json: String,
}

impl ResultRow {
    /// Canonical sort key: code index, embedding, table order of the model.
    pub fn key(&self) -> (usize, EmbeddingKind, usize) {
        (
            self.code.index(),
            self.embedding,
            ModelKind::TABLE_ORDER.iter().position(|&m| m == self.model).unwrap_or(usize::MAX),
        )
    }

    pub fn is_ok(&self) -> bool {
        self.status == CellStatus::Ok
    }

    /// Error message of a failed cell.
    pub fn error_message(&self) -> Option<String> {
        let v: serde_json::Value = serde_json::from_str(&self.metadata_json).ok()?;
        v.get("error")?.as_str().map(str::to_string)
    }
}

pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by_key(|r| r.key());
}

pub fn write_results<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(RESULTS_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_file(rows: &[ResultRow], path: &Path) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    write_results(rows, File::create(&tmp)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(Error::Format(format!("unexpected results header: {}", header.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize().enumerate() {
        let row: ResultRow = rec.map_err(|e| Error::Record { line: i + 2, message: e.to_string() })?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_results_file(path: &Path) -> Result<Vec<ResultRow>> {
    read_results(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn row(code: &str, e: EmbeddingKind, m: ModelKind, fs: f64, acc: f64) -> ResultRow {
        ResultRow {
            code: code.parse().unwrap(),
            embedding: e,
            model: m,
            fs_macro: fs,
            acc,
            prc_macro: 0.1 + 0.2,
            rc_macro: 1.0 / 3.0,
            fs_weighted: fs,
            prc_weighted: 0.0,
            rc_weighted: 1.0,
            n_train: 640,
            n_test: 160,
            seconds: 0.0,
            seed: u64::MAX,
            status: CellStatus::Ok,
            metadata_json: r#"{"k":15}"#.into(),
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut failed = row("1111", EmbeddingKind::Word2Vec, ModelKind::Ab, f64::NAN, f64::NAN);
        failed.status = CellStatus::Failed;
        failed.metadata_json = r#"{"error":"boom, \"quoted\""}"#.into();
        let rows = vec![row("0000", EmbeddingKind::OneHot, ModelKind::Knn, 0.123456789012345, 0.5), failed];
        let mut buf = Vec::new();
        write_results(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&RESULTS_HEADER.join(",")));
        let back = read_results(&buf[..]).unwrap();
        assert_eq!(back[0], rows[0]);
        assert!(back[1].fs_macro.is_nan());
        assert_eq!(back[1].error_message().unwrap(), "boom, \"quoted\"");
    }

    #[test]
    fn rows_sort_canonically() {
        let mut rows = vec![
            row("0001", EmbeddingKind::OneHot, ModelKind::Knn, 0.0, 0.0),
            row("0000", EmbeddingKind::Tfidf, ModelKind::Nb, 0.0, 0.0),
            row("0000", EmbeddingKind::Tfidf, ModelKind::Knn, 0.0, 0.0),
            row("0000", EmbeddingKind::OneHot, ModelKind::Ab, 0.0, 0.0),
        ];
        sort_rows(&mut rows);
        let keys: Vec<_> = rows.iter().map(|r| (r.code.code(), r.embedding, r.model)).collect();
        assert_eq!(keys[0], ("0000".into(), EmbeddingKind::OneHot, ModelKind::Ab));
        assert_eq!(keys[1], ("0000".into(), EmbeddingKind::Tfidf, ModelKind::Knn));
        assert_eq!(keys[3].0, "0001");
    }
}
