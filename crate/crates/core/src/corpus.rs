//! Labeled document collections: loading, writing, stratified splitting and
//! a deterministic synthetic generator.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::preprocess::{Stemmer, SuffixStemmer};

/// Upper bound on distinct labels accepted by the loader. Anything larger is
/// almost always a swapped text/label column.
pub const MAX_LABELS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoryLabel(String);

impl CategoryLabel {
    pub fn new(name: impl Into<String>) -> Self {
        CategoryLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CategoryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CategoryLabel {
    fn from(s: &str) -> Self {
        CategoryLabel(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: CategoryLabel,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        Document { id: id.into(), text: text.into(), label: CategoryLabel::new(label) }
    }
}

/// An ordered, immutable collection of labeled documents.
///
/// The label set is kept sorted; the position of a label in [`labels`](Self::labels)
/// is the label index used for every smallest-index tie break downstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledCorpus {
    documents: Vec<Document>,
    labels: Vec<CategoryLabel>,
    provenance: String,
}

impl LabeledCorpus {
    /// Builds a corpus, normalizing every text to NFC and checking that ids are
    /// unique and texts non-empty. The label set is derived from the documents.
    pub fn new(documents: Vec<Document>, provenance: impl Into<String>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::Corpus("corpus has no documents".into()));
        }
        let mut seen = HashSet::with_capacity(documents.len());
        let mut labels = BTreeSet::new();
        let mut out = Vec::with_capacity(documents.len());
        for (i, mut doc) in documents.into_iter().enumerate() {
            doc.text = doc.text.nfc().collect();
            if doc.text.trim().is_empty() {
                return Err(Error::Record { line: i + 1, message: format!("document '{}' has empty text", doc.id) });
            }
            if doc.label.as_str().is_empty() {
                return Err(Error::Record { line: i + 1, message: format!("document '{}' has empty label", doc.id) });
            }
            if !seen.insert(doc.id.clone()) {
                return Err(Error::Record { line: i + 1, message: format!("duplicate document id '{}'", doc.id) });
            }
            labels.insert(doc.label.clone());
            out.push(doc);
        }
        Ok(LabeledCorpus { documents: out, labels: labels.into_iter().collect(), provenance: provenance.into() })
    }

    /// Like [`new`](Self::new) but keeps a caller-supplied label set, which
    /// must contain every document label. Used for splits so that train and
    /// test share the parent's label indices.
    fn with_labels(documents: Vec<Document>, labels: Vec<CategoryLabel>, provenance: String) -> Self {
        LabeledCorpus { documents, labels, provenance }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn labels(&self) -> &[CategoryLabel] {
        &self.labels
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn label_index(&self, label: &CategoryLabel) -> Option<usize> {
        self.labels.binary_search(label).ok()
    }

    pub fn label_counts(&self) -> BTreeMap<CategoryLabel, usize> {
        let mut counts = BTreeMap::new();
        for doc in &self.documents {
            *counts.entry(doc.label.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.text.as_str())
    }

    pub fn targets(&self) -> Vec<CategoryLabel> {
        self.documents.iter().map(|d| d.label.clone()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

impl CorpusFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Csv,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(CorpusFormat::Csv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(Error::Config(format!("unknown corpus format '{other}' (expected csv or jsonl)"))),
        }
    }
}

/// Loads a corpus from CSV (`id,text,label` header) or JSONL (`{"id","text","label"}` per line).
///
/// The `id` field is optional; records without one get their 1-based record
/// number as id.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<LabeledCorpus> {
    let file = File::open(path)?;
    let documents = match format {
        CorpusFormat::Csv => read_csv(file)?,
        CorpusFormat::Jsonl => read_jsonl(file)?,
    };
    if documents.is_empty() {
        return Err(Error::Corpus(format!("{} contains no records", path.display())));
    }
    let distinct: BTreeSet<&CategoryLabel> = documents.iter().map(|d| &d.label).collect();
    if distinct.len() > MAX_LABELS {
        return Err(Error::Config(format!(
            "label column has {} distinct values (limit {MAX_LABELS}); are the text and label columns swapped?",
            distinct.len()
        )));
    }
    LabeledCorpus::new(documents, path.display().to_string())
}

fn read_csv(file: File) -> Result<Vec<Document>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(file);
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let id_col = column("id");
    let text_col =
        column("text").ok_or_else(|| Error::Record { line: 1, message: "header has no 'text' column".into() })?;
    let label_col =
        column("label").ok_or_else(|| Error::Record { line: 1, message: "header has no 'label' column".into() })?;

    let mut docs = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(n + 2);
        let field = |col: usize, name: &str| -> Result<String> {
            match record.get(col) {
                Some(v) if !v.trim().is_empty() => Ok(v.to_string()),
                _ => Err(Error::Record { line, message: format!("missing '{name}' field") }),
            }
        };
        let text = field(text_col, "text")?;
        let label = field(label_col, "label")?;
        let id = match id_col.and_then(|c| record.get(c)) {
            Some(v) if !v.is_empty() => v.to_string(),
            _ => (n + 1).to_string(),
        };
        docs.push(Document { id, text, label: CategoryLabel::new(label.trim()) });
    }
    Ok(docs)
}

fn read_jsonl(file: File) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| Error::Record { line: line_no, message: format!("invalid JSON: {e}") })?;
        let field = |name: &str| -> Result<String> {
            match value.get(name).and_then(|v| v.as_str()) {
                Some(s) if !s.trim().is_empty() => Ok(s.to_string()),
                _ => Err(Error::Record { line: line_no, message: format!("missing '{name}' field") }),
            }
        };
        let text = field("text")?;
        let label = field("label")?;
        let id = match value.get("id") {
            Some(serde_json::Value::String(s)) if !s.is_empty() => s.clone(),
            Some(serde_json::Value::Number(n)) => n.to_string(),
            _ => (docs.len() + 1).to_string(),
        };
        docs.push(Document { id, text, label: CategoryLabel::new(label.trim()) });
    }
    Ok(docs)
}

pub fn write_corpus(corpus: &LabeledCorpus, path: &Path, format: CorpusFormat) -> Result<()> {
    let file = File::create(path)?;
    match format {
        CorpusFormat::Csv => {
            let mut writer = csv::Writer::from_writer(file);
            writer.write_record(["id", "text", "label"])?;
            for doc in corpus.documents() {
                writer.write_record([doc.id.as_str(), doc.text.as_str(), doc.label.as_str()])?;
            }
            writer.flush()?;
        }
        CorpusFormat::Jsonl => {
            let mut out = BufWriter::new(file);
            for doc in corpus.documents() {
                serde_json::to_writer(&mut out, doc)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { test_fraction: 0.2, seed: 42, stratified: true }
    }
}

/// Splits into (train, test). Per label, `round(test_fraction * n)` documents
/// (clamped to `1..=n-1`) go to test. Both halves keep the parent's document
/// order and label set.
pub fn stratified_split(corpus: &LabeledCorpus, spec: &SplitSpec) -> Result<(LabeledCorpus, LabeledCorpus)> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::Config(format!("test_fraction must be in (0,1), got {}", spec.test_fraction)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut is_test = vec![false; corpus.len()];

    let groups: Vec<(String, Vec<usize>)> = if spec.stratified {
        corpus
            .labels()
            .iter()
            .map(|label| {
                let members =
                    corpus.documents().iter().enumerate().filter(|(_, d)| &d.label == label).map(|(i, _)| i).collect();
                (label.to_string(), members)
            })
            .collect()
    } else {
        vec![("<all>".to_string(), (0..corpus.len()).collect())]
    };

    for (name, mut members) in groups {
        let n = members.len();
        if n < 2 {
            return Err(Error::Corpus(format!("label '{name}' has {n} document(s); at least 2 are required to split")));
        }
        let n_test = ((spec.test_fraction * n as f64).round() as usize).clamp(1, n - 1);
        members.shuffle(&mut rng);
        for &i in &members[..n_test] {
            is_test[i] = true;
        }
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (doc, &t) in corpus.documents().iter().zip(&is_test) {
        if t {
            test.push(doc.clone())
        } else {
            train.push(doc.clone())
        }
    }
    let prov = corpus.provenance().to_string();
    Ok((
        LabeledCorpus::with_labels(train, corpus.labels().to_vec(), format!("{prov} [train]")),
        LabeledCorpus::with_labels(test, corpus.labels().to_vec(), format!("{prov} [test]")),
    ))
}

/// Category names used by the generator for the first eight labels.
pub const SYNTH_LABEL_NAMES: [&str; 8] =
    ["fantastik", "bilim-kurgu", "romantik", "tarih", "polisiye", "felsefe", "sinema", "korku-gerilim"];

/// Suffix chains attached to keyword stems when morphology is enabled. Every
/// chain is drawn from the bundled suffix table so the bundled stemmer maps
/// each surface form back to its stem.
pub const SYNTH_SUFFIXES: [&str; 14] =
    ["lar", "ler", "ı", "i", "da", "de", "dan", "den", "larda", "lerde", "lardan", "lerden", "ın", "in"];

const KEYWORDS_PER_LABEL: usize = 12;
const NOISE_WORDS: usize = 80;
const FUNCTION_WORDS: [&str; 12] =
    ["ve", "bir", "bu", "da", "için", "ile", "çok", "gibi", "daha", "ama", "olan", "her"];

/// Deterministically generates a corpus whose labels are separable by
/// disjoint keyword cores mixed with shared noise and function words.
///
/// Documents are assigned labels round-robin, so counts differ by at most one.
/// With `morphology`, keywords are emitted with suffix chains from
/// [`SYNTH_SUFFIXES`]; stemming then merges the surface forms.
pub fn synth_corpus(n_docs: usize, n_labels: usize, seed: u64, morphology: bool) -> Result<LabeledCorpus> {
    if n_labels < 2 {
        return Err(Error::Config("synthetic corpus needs at least 2 labels".into()));
    }
    if n_docs < 2 * n_labels {
        return Err(Error::Config(format!("n_docs ({n_docs}) must be at least 2 * n_labels ({})", 2 * n_labels)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stemmer = SuffixStemmer::bundled();

    let label_names: Vec<String> = (0..n_labels)
        .map(|i| SYNTH_LABEL_NAMES.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("kategori-{}", i + 1)))
        .collect();

    let mut used: HashSet<String> = FUNCTION_WORDS.iter().map(|s| s.to_string()).collect();
    let mut draw_words = |count: usize, rng: &mut ChaCha8Rng, need_stable: bool| -> Vec<String> {
        let mut words = Vec::with_capacity(count);
        while words.len() < count {
            let w = synth_word(rng);
            if used.contains(&w) {
                continue;
            }
            if need_stable && !is_stable_stem(&stemmer, &w) {
                continue;
            }
            used.insert(w.clone());
            words.push(w);
        }
        words
    };
    let cores: Vec<Vec<String>> = (0..n_labels).map(|_| draw_words(KEYWORDS_PER_LABEL, &mut rng, true)).collect();
    let noise = draw_words(NOISE_WORDS, &mut rng, false);

    let mut documents = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let label = i % n_labels;
        let len = rng.gen_range(25..=45);
        let mut tokens: Vec<String> = Vec::with_capacity(len + 1);
        for _ in 0..len {
            let roll: f64 = rng.gen();
            let mut word = if roll < 0.25 {
                let stem = cores[label].choose(&mut rng).expect("non-empty core");
                if morphology && rng.gen_bool(0.7) {
                    format!("{stem}{}", SYNTH_SUFFIXES.choose(&mut rng).expect("non-empty table"))
                } else {
                    stem.clone()
                }
            } else if roll < 0.45 {
                FUNCTION_WORDS.choose(&mut rng).expect("non-empty").to_string()
            } else if roll < 0.48 {
                rng.gen_range(1..=2024).to_string()
            } else {
                noise.choose(&mut rng).expect("non-empty").clone()
            };
            if tokens.is_empty() || rng.gen_bool(0.08) {
                word = turkish_capitalize(&word);
            }
            if rng.gen_bool(0.12) {
                word.push(if rng.gen_bool(0.5) { ',' } else { '.' });
            }
            tokens.push(word);
        }
        if let Some(last) = tokens.last_mut() {
            if !last.ends_with('.') {
                last.push('.');
            }
        }
        documents.push(Document::new(format!("synth-{i:05}"), tokens.join(" "), label_names[label].clone()));
    }
    LabeledCorpus::new(
        documents,
        format!("synthetic(n_docs={n_docs}, n_labels={n_labels}, seed={seed}, morphology={morphology})"),
    )
}

fn synth_word(rng: &mut ChaCha8Rng) -> String {
    const ONSETS: [&str; 16] = ["b", "d", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "y", "z", "ç", "ş"];
    const VOWELS: [&str; 8] = ["a", "e", "ı", "i", "o", "ö", "u", "ü"];
    const CODAS: [&str; 8] = ["k", "p", "t", "s", "ç", "ş", "f", "g"];
    let syllables = rng.gen_range(2..=3);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS.choose(rng).unwrap());
        w.push_str(VOWELS.choose(rng).unwrap());
    }
    w.push_str(CODAS.choose(rng).unwrap());
    w
}

/// A stem is usable when the stemmer leaves it alone and maps every suffixed
/// surface form back to it.
fn is_stable_stem(stemmer: &SuffixStemmer, stem: &str) -> bool {
    stemmer.stem(stem) == stem && SYNTH_SUFFIXES.iter().all(|s| stemmer.stem(&format!("{stem}{s}")) == stem)
}

fn turkish_capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some('i') => format!("İ{}", chars.as_str()),
        Some('ı') => format!("I{}", chars.as_str()),
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_label_corpus(per_label: usize) -> LabeledCorpus {
        let mut docs = Vec::new();
        for i in 0..per_label {
            docs.push(Document::new(format!("a{i}"), format!("text a {i}"), "a"));
            docs.push(Document::new(format!("b{i}"), format!("text b {i}"), "b"));
        }
        LabeledCorpus::new(docs, "test").unwrap()
    }

    #[test]
    fn split_ten_docs_gives_one_test_doc_per_label() {
        let corpus = two_label_corpus(5);
        let spec = SplitSpec::default();
        let (train, test) = stratified_split(&corpus, &spec).unwrap();
        assert_eq!(train.len(), 8);
        assert_eq!(test.len(), 2);
        let counts = test.label_counts();
        assert_eq!(counts[&CategoryLabel::from("a")], 1);
        assert_eq!(counts[&CategoryLabel::from("b")], 1);
    }

    #[test]
    fn split_rejects_singleton_label() {
        let corpus =
            LabeledCorpus::new(vec![Document::new("1", "x", "a"), Document::new("2", "y", "b")], "tiny").unwrap();
        let err = stratified_split(&corpus, &SplitSpec::default()).unwrap_err();
        assert!(err.to_string().contains("'a'"), "{err}");
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let corpus = two_label_corpus(5);
        let spec = SplitSpec { test_fraction: 1.0, ..SplitSpec::default() };
        assert!(stratified_split(&corpus, &spec).is_err());
    }

    #[test]
    fn unstratified_split_partitions() {
        let corpus = two_label_corpus(10);
        let spec = SplitSpec { stratified: false, ..SplitSpec::default() };
        let (train, test) = stratified_split(&corpus, &spec).unwrap();
        assert_eq!(train.len() + test.len(), 20);
        assert_eq!(test.len(), 4);
    }

    #[test]
    fn corpus_rejects_duplicate_ids_and_empty_text() {
        let dup = LabeledCorpus::new(vec![Document::new("1", "x", "a"), Document::new("1", "y", "b")], "t");
        assert!(matches!(dup, Err(Error::Record { line: 2, .. })));
        let empty = LabeledCorpus::new(vec![Document::new("1", "  ", "a")], "t");
        assert!(matches!(empty, Err(Error::Record { line: 1, .. })));
    }

    #[test]
    fn texts_are_nfc_normalized() {
        // "i" + combining dot above vs. precomposed forms; "ö" decomposed.
        let corpus = LabeledCorpus::new(vec![Document::new("1", "o\u{0308}zet", "a")], "t").unwrap();
        assert_eq!(corpus.documents()[0].text, "özet");
    }

    #[test]
    fn synth_uniform_allocation() {
        let corpus = synth_corpus(16, 8, 1, false).unwrap();
        assert_eq!(corpus.len(), 16);
        assert_eq!(corpus.labels().len(), 8);
        assert!(corpus.label_counts().values().all(|&c| c == 2));
    }

    #[test]
    fn synth_is_deterministic() {
        assert_eq!(synth_corpus(40, 4, 9, true).unwrap(), synth_corpus(40, 4, 9, true).unwrap());
        assert_ne!(synth_corpus(40, 4, 9, true).unwrap(), synth_corpus(40, 4, 10, true).unwrap());
    }

    #[test]
    fn synth_rejects_too_few_docs() {
        assert!(synth_corpus(15, 8, 1, false).is_err());
    }

    #[test]
    fn synth_keyword_stems_are_stemmer_fixed_points() {
        let stemmer = SuffixStemmer::bundled();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut stable = 0;
        for _ in 0..200 {
            let w = synth_word(&mut rng);
            if is_stable_stem(&stemmer, &w) {
                stable += 1;
                for s in SYNTH_SUFFIXES {
                    assert_eq!(stemmer.stem(&format!("{w}{s}")), w);
                }
            }
        }
        assert!(stable > 50, "too few stable stems: {stable}");
    }

    #[test]
    fn capitalize_is_turkish_aware() {
        assert_eq!(turkish_capitalize("ispanak"), "İspanak");
        assert_eq!(turkish_capitalize("ılık"), "Ilık");
        assert_eq!(turkish_capitalize("kitap"), "Kitap");
    }
}
