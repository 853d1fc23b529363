//! Summary and full result tables, as CSV and Markdown.
//!
//! * Summary: one row per preprocessing code; per embedding the best macro
//!   F-score, its accuracy and the model(s) achieving it.
//! * Full: one row per (code, model); per embedding FS, ACC, PRC and RC
//!   (macro-averaged).

use std::fs;
use std::path::Path;

use super::config::ModelsSection;
use super::results::ResultRow;
use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::preprocess::PreprocessConfig;
use crate::vectorize::EmbeddingKind;

/// A named group of columns sharing a super-header (one embedding).
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnGroup {
    pub name: String,
    pub columns: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// Leading row-identifying columns.
    pub key_columns: Vec<String>,
    pub groups: Vec<ColumnGroup>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Flat header: key columns, then `"{group} {column}"`.
    pub fn header(&self) -> Vec<String> {
        let mut h = self.key_columns.clone();
        for g in &self.groups {
            h.extend(g.columns.iter().map(|c| format!("{} {}", g.name, c)));
        }
        h
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header())?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("table cells are UTF-8"))
    }

    /// GitHub-style table. The first line names each group over its span.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let spans: Vec<String> = self.groups.iter().map(|g| format!("{} ({})", g.name, g.columns.join(", "))).collect();
        out.push_str(&format!("Column groups: {}\n\n", spans.join("; ")));
        let header = self.header();
        out.push_str(&format!("| {} |\n", header.join(" | ")));
        let align: Vec<&str> =
            header.iter().enumerate().map(|(i, _)| if i < self.key_columns.len() { ":---" } else { "---:" }).collect();
        out.push_str(&format!("| {} |\n", align.join(" | ")));
        for r in &self.rows {
            out.push_str(&format!("| {} |\n", r.join(" | ")));
        }
        out
    }
}

pub fn write_table(table: &Table, csv_path: &Path, md_path: &Path) -> Result<()> {
    fs::write(csv_path, table.to_csv()?)?;
    fs::write(md_path, table.to_markdown())?;
    Ok(())
}

/// Metric cell text: four decimals, `NA` for failed cells.
pub fn fmt_metric(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        "NA".into()
    }
}

fn present<T: Ord + Copy>(rows: &[ResultRow], f: impl Fn(&ResultRow) -> T) -> Vec<T> {
    let mut v: Vec<T> = rows.iter().map(f).collect();
    v.sort();
    v.dedup();
    v
}

/// Grid axes present in `rows`, after checking every combination has a row.
fn axes(rows: &[ResultRow]) -> Result<(Vec<PreprocessConfig>, Vec<EmbeddingKind>, Vec<ModelKind>)> {
    if rows.is_empty() {
        return Err(Error::InvalidInput("no results to tabulate".into()));
    }
    let mut codes = present(rows, |r| r.code);
    codes.sort_by_key(|c| c.index());
    let embeddings = present(rows, |r| r.embedding);
    let models: Vec<ModelKind> = {
        let p = present(rows, |r| r.model);
        ModelKind::TABLE_ORDER.into_iter().filter(|m| p.contains(m)).collect()
    };
    for &c in &codes {
        for &e in &embeddings {
            for &m in &models {
                if find(rows, c, e, m).is_none() {
                    return Err(Error::InvalidInput(format!("missing result cell ({c}, {}, {})", e.name(), m.name())));
                }
            }
        }
    }
    Ok((codes, embeddings, models))
}

fn find(rows: &[ResultRow], c: PreprocessConfig, e: EmbeddingKind, m: ModelKind) -> Option<&ResultRow> {
    rows.iter().find(|r| r.code == c && r.embedding == e && r.model == m)
}

/// Best successful cells of one (code, embedding): highest macro F-score, then
/// highest accuracy. Exact ties are all returned, in preference order.
pub fn best_cells(rows: &[ResultRow], code: PreprocessConfig, embedding: EmbeddingKind) -> Vec<&ResultRow> {
    let cands: Vec<&ResultRow> = rows
        .iter()
        .filter(|r| r.code == code && r.embedding == embedding && r.is_ok() && r.fs_macro.is_finite())
        .collect();
    let Some(best_fs) = cands.iter().map(|r| r.fs_macro).reduce(f64::max) else {
        return Vec::new();
    };
    let fs_best: Vec<&ResultRow> = cands.into_iter().filter(|r| r.fs_macro == best_fs).collect();
    let best_acc = fs_best.iter().map(|r| r.acc).fold(f64::NEG_INFINITY, f64::max);
    let mut best: Vec<&ResultRow> = fs_best.into_iter().filter(|r| r.acc == best_acc).collect();
    best.sort_by_key(|r| r.model.preference_rank());
    best
}

pub fn emit_summary(rows: &[ResultRow]) -> Result<Table> {
    let (codes, embeddings, _) = axes(rows)?;
    let groups = embeddings
        .iter()
        .map(|e| ColumnGroup {
            name: e.display_name().into(),
            columns: vec!["FS".into(), "ACC".into(), "Model".into()],
        })
        .collect();
    let table_rows = codes
        .iter()
        .map(|&c| {
            let mut row = vec![c.code()];
            for &e in &embeddings {
                let best = best_cells(rows, c, e);
                match best.first() {
                    Some(b) => {
                        row.push(fmt_metric(b.fs_macro));
                        row.push(fmt_metric(b.acc));
                        row.push(best.iter().map(|r| r.model.display_name()).collect::<Vec<_>>().join("-"));
                    }
                    None => row.extend(["NA".to_string(), "NA".to_string(), "NA".to_string()]),
                }
            }
            row
        })
        .collect();
    Ok(Table { key_columns: vec!["Code".into()], groups, rows: table_rows })
}

/// `models` supplies the row labels (e.g. `KNN(k=15)`).
pub fn emit_full(rows: &[ResultRow], models: &ModelsSection) -> Result<Table> {
    let (codes, embeddings, model_kinds) = axes(rows)?;
    let groups = embeddings
        .iter()
        .map(|e| ColumnGroup {
            name: e.display_name().into(),
            columns: vec!["FS".into(), "ACC".into(), "PRC".into(), "RC".into()],
        })
        .collect();
    let mut table_rows = Vec::new();
    for &c in &codes {
        for &m in &model_kinds {
            let mut row = vec![c.code(), models.params(m).display_label()];
            for &e in &embeddings {
                let r = find(rows, c, e, m).expect("checked by axes");
                for v in [r.fs_macro, r.acc, r.prc_macro, r.rc_macro] {
                    row.push(fmt_metric(v));
                }
            }
            table_rows.push(row);
        }
    }
    Ok(Table { key_columns: vec!["Code".into(), "Model".into()], groups, rows: table_rows })
}
