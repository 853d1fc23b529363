use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::preprocess::TokenStream;

/// Token <-> index map with per-token document frequency and total counts.
///
/// Indices are dense `0..len()` and follow sorted token order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    df: Vec<usize>,
    counts: Vec<u64>,
    n_docs: usize,
    min_df: usize,
}

struct Stats {
    df: BTreeMap<String, (usize, u64)>,
    n_docs: usize,
}

fn collect_stats(docs: &[TokenStream]) -> Result<Stats> {
    if docs.iter().all(|d| d.is_empty()) {
        return Err(Error::InvalidInput("cannot build a vocabulary from empty documents".into()));
    }
    let mut df: BTreeMap<String, (usize, u64)> = BTreeMap::new();
    for doc in docs {
        for token in doc.iter() {
            df.entry(token.to_string()).or_insert((0, 0)).1 += 1;
        }
        // df counts each document once per token.
        let mut seen: Vec<&str> = doc.iter().collect();
        seen.sort_unstable();
        seen.dedup();
        for token in seen {
            df.get_mut(token).expect("inserted above").0 += 1;
        }
    }
    Ok(Stats { df, n_docs: docs.len() })
}

impl Vocabulary {
    fn from_stats<F: Fn(usize, u64) -> bool>(stats: Stats, keep: F, min_df: usize) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut df = Vec::new();
        let mut counts = Vec::new();
        for (token, (d, c)) in stats.df {
            if keep(d, c) {
                tokens.push(token);
                df.push(d);
                counts.push(c);
            }
        }
        if tokens.is_empty() {
            return Err(Error::InvalidInput("vocabulary is empty after frequency filtering".into()));
        }
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Vocabulary { tokens, index, df, counts, n_docs: stats.n_docs, min_df })
    }

    /// Builds a vocabulary keeping tokens with document frequency `>= min_df`.
    pub fn build(docs: &[TokenStream], min_df: usize) -> Result<Self> {
        let stats = collect_stats(docs)?;
        Self::from_stats(stats, |d, _| d >= min_df, min_df)
    }

    /// Builds a vocabulary keeping tokens with total occurrence count `>= min_count`.
    pub fn build_by_count(docs: &[TokenStream], min_count: u64) -> Result<Self> {
        let stats = collect_stats(docs)?;
        Self::from_stats(stats, |_, c| c >= min_count, 1)
    }

    /// A vocabulary with no frequency information (df = count = 1, one document).
    /// Used when reloading persisted embeddings.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        let mut sorted = tokens.clone();
        sorted.sort();
        sorted.dedup();
        if sorted != tokens {
            return Err(Error::Format("vocabulary tokens must be unique and sorted".into()));
        }
        if tokens.is_empty() {
            return Err(Error::Format("empty vocabulary".into()));
        }
        let n = tokens.len();
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Vocabulary { tokens, index, df: vec![1; n], counts: vec![1; n], n_docs: 1, min_df: 1 })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn df(&self, index: usize) -> usize {
        self.df[index]
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    /// Writes `token<TAB>index<TAB>df` lines.
    pub fn export<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, token) in self.tokens.iter().enumerate() {
            writeln!(out, "{token}\t{i}\t{}", self.df[i])?;
        }
        Ok(())
    }

    /// Reads the [`export`](Self::export) format. `n_docs` is not part of the
    /// file and must be supplied.
    pub fn import<R: BufRead>(input: R, n_docs: usize) -> Result<Self> {
        let mut rows: Vec<(String, usize, usize)> = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Record { line: i + 1, message: "expected token<TAB>index<TAB>df".into() };
            let mut parts = line.split('\t');
            let (Some(tok), Some(idx), Some(df), None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad());
            };
            let idx: usize = idx.parse().map_err(|_| bad())?;
            let df: usize = df.parse().map_err(|_| bad())?;
            if df == 0 || df > n_docs {
                return Err(Error::Record { line: i + 1, message: format!("df {df} outside 1..={n_docs}") });
            }
            rows.push((tok.to_string(), idx, df));
        }
        if rows.iter().enumerate().any(|(i, r)| r.1 != i) {
            return Err(Error::Format("vocabulary indices must be dense and in order".into()));
        }
        let mut vocab = Self::from_tokens(rows.iter().map(|r| r.0.clone()).collect())?;
        vocab.df = rows.iter().map(|r| r.2).collect();
        vocab.counts = rows.iter().map(|r| r.2 as u64).collect();
        vocab.n_docs = n_docs;
        vocab.min_df = vocab.df.iter().copied().min().unwrap_or(1);
        Ok(vocab)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(raw: &[&[&str]]) -> Vec<TokenStream> {
        raw.iter().map(|d| TokenStream::from(*d)).collect()
    }

    #[test]
    fn hand_counted_df() {
        let d = docs(&[&["a", "a", "b"], &["b", "c"]]);
        let v = Vocabulary::build(&d, 1).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v.n_docs(), 2);
        assert_eq!(v.df(v.get("a").unwrap()), 1);
        assert_eq!(v.df(v.get("b").unwrap()), 2);
        assert_eq!(v.df(v.get("c").unwrap()), 1);
        assert_eq!(v.count(v.get("a").unwrap()), 2);
        assert_eq!(v.tokens(), ["a", "b", "c"]);

        let v2 = Vocabulary::build(&d, 2).unwrap();
        assert_eq!(v2.tokens(), ["b"]);
        assert_eq!(v2.get("b"), Some(0));
    }

    #[test]
    fn minimal_and_error_cases() {
        let v = Vocabulary::build(&docs(&[&["x"]]), 1).unwrap();
        assert_eq!((v.len(), v.df(0), v.n_docs()), (1, 1, 1));
        assert!(Vocabulary::build(&docs(&[&[]]), 1).is_err());
        assert!(Vocabulary::build(&docs(&[&["a"], &["b"]]), 2).is_err());
    }

    #[test]
    fn by_count_filters_on_occurrences() {
        let d = docs(&[&["a", "a", "b"], &["b", "c"]]);
        let v = Vocabulary::build_by_count(&d, 2).unwrap();
        assert_eq!(v.tokens(), ["a", "b"]);
    }

    #[test]
    fn export_import_round_trip() {
        let d = docs(&[&["a", "a", "b"], &["b", "c"], &["ç", "b"]]);
        let v = Vocabulary::build(&d, 1).unwrap();
        let mut buf = Vec::new();
        v.export(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("a\t0\t1\nb\t1\t3\n"));
        let back = Vocabulary::import(buf.as_slice(), 3).unwrap();
        assert_eq!(back.tokens(), v.tokens());
        assert_eq!(
            (0..v.len()).map(|i| back.df(i)).collect::<Vec<_>>(),
            (0..v.len()).map(|i| v.df(i)).collect::<Vec<_>>()
        );
        assert!(Vocabulary::import("a\t1\t1\n".as_bytes(), 1).is_err());
        assert!(Vocabulary::import("a\t0\n".as_bytes(), 1).is_err());
    }
}
