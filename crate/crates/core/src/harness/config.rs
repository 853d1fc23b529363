//! TOML run configuration. Every section and key is optional; an empty file
//! runs the full 16 × 3 × 7 grid on the default synthetic corpus.
//!
//! ```toml
//! [corpus]
//! path = "summaries.csv"      # or: [corpus.synth] n_docs = 800
//! [split]
//! test_fraction = 0.2
//! [preprocess]
//! codes = ["0000", "1111"]
//! [embeddings]
//! enabled = ["tfidf"]
//! [embeddings.word2vec]
//! dim = 50
//! [models]
//! enabled = ["nb", "lr"]
//! [models.knn]
//! k = 5
//! [run]
//! seed = 7
//! out = "results"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{load_corpus, synth_corpus, CorpusFormat, LabeledCorpus, SplitSpec};
use crate::error::{Error, Result};
use crate::models::{
    AdaBoostParams, ClassifierParams, ForestParams, KnnParams, LrParams, ModelKind, NbParams, SvmParams, TreeParams,
};
use crate::preprocess::{enumerate_configs, PipelineResources, PreprocessConfig};
use crate::vectorize::{EmbeddingKind, EmbeddingSpec, Word2VecParams};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: CorpusSection,
    pub split: SplitSection,
    pub preprocess: PreprocessSection,
    pub embeddings: EmbeddingsSection,
    pub models: ModelsSection,
    pub run: RunSection,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    /// Corpus file; when absent the synthetic corpus is generated.
    pub path: Option<PathBuf>,
    /// Defaults to a guess from the file extension.
    pub format: Option<CorpusFormat>,
    pub synth: SynthSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub n_docs: usize,
    pub n_labels: usize,
    pub seed: u64,
    pub morphology: bool,
}

impl Default for SynthSection {
    fn default() -> Self {
        SynthSection { n_docs: 3200, n_labels: 8, seed: 42, morphology: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSection {
    fn default() -> Self {
        let d = SplitSpec::default();
        SplitSection { test_fraction: d.test_fraction, seed: d.seed, stratified: d.stratified }
    }
}

impl SplitSection {
    pub fn spec(&self) -> SplitSpec {
        SplitSpec { test_fraction: self.test_fraction, seed: self.seed, stratified: self.stratified }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSection {
    pub codes: Vec<PreprocessConfig>,
    /// Stopword file replacing the bundled list.
    pub stopwords: Option<PathBuf>,
    /// Suffix file replacing the bundled stemmer table.
    pub suffixes: Option<PathBuf>,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        PreprocessSection { codes: enumerate_configs(), stopwords: None, suffixes: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BowSection {
    pub min_df: usize,
}

impl Default for BowSection {
    fn default() -> Self {
        BowSection { min_df: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingsSection {
    pub enabled: Vec<EmbeddingKind>,
    pub onehot: BowSection,
    pub tfidf: BowSection,
    pub word2vec: Word2VecParams,
}

impl Default for EmbeddingsSection {
    fn default() -> Self {
        EmbeddingsSection {
            enabled: EmbeddingKind::ALL.to_vec(),
            onehot: BowSection::default(),
            tfidf: BowSection::default(),
            word2vec: Word2VecParams::default(),
        }
    }
}

impl EmbeddingsSection {
    pub fn spec(&self, kind: EmbeddingKind) -> EmbeddingSpec {
        match kind {
            EmbeddingKind::OneHot => EmbeddingSpec::OneHot { min_df: self.onehot.min_df },
            EmbeddingKind::Tfidf => EmbeddingSpec::Tfidf { min_df: self.tfidf.min_df },
            EmbeddingKind::Word2Vec => EmbeddingSpec::Word2Vec(self.word2vec.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelsSection {
    pub enabled: Vec<ModelKind>,
    pub knn: KnnParams,
    pub nb: NbParams,
    pub rf: ForestParams,
    pub dt: TreeParams,
    pub svm: SvmParams,
    pub lr: LrParams,
    pub ab: AdaBoostParams,
}

impl Default for ModelsSection {
    fn default() -> Self {
        ModelsSection {
            enabled: ModelKind::TABLE_ORDER.to_vec(),
            knn: KnnParams::default(),
            nb: NbParams::default(),
            rf: ForestParams::default(),
            dt: TreeParams::default(),
            svm: SvmParams::default(),
            lr: LrParams::default(),
            ab: AdaBoostParams::default(),
        }
    }
}

impl ModelsSection {
    pub fn params(&self, kind: ModelKind) -> ClassifierParams {
        match kind {
            ModelKind::Knn => ClassifierParams::Knn(self.knn.clone()),
            ModelKind::Nb => ClassifierParams::Nb(self.nb.clone()),
            ModelKind::Rf => ClassifierParams::Rf(self.rf.clone()),
            ModelKind::Dt => ClassifierParams::Dt(self.dt.clone()),
            ModelKind::Svm => ClassifierParams::Svm(self.svm.clone()),
            ModelKind::Lr => ClassifierParams::Lr(self.lr.clone()),
            ModelKind::Ab => ClassifierParams::Ab(self.ab.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Root of every derived per-cell seed.
    pub seed: u64,
    /// Worker threads; `None` uses all cores. Results do not depend on it.
    pub workers: Option<usize>,
    pub out: PathBuf,
    /// Write wall-clock seconds into the results CSV. Off by default so the
    /// file is byte-identical across runs; timings always go to `timings.csv`.
    pub record_seconds: bool,
    /// Reuse per-code partial results left in the output directory by an
    /// interrupted run with the same configuration.
    pub resume: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { seed: 42, workers: None, out: PathBuf::from("results"), record_seconds: false, resume: false }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.preprocess.codes.is_empty() {
            return Err(Error::Config("preprocess.codes is empty".into()));
        }
        if self.embeddings.enabled.is_empty() {
            return Err(Error::Config("embeddings.enabled is empty".into()));
        }
        if self.models.enabled.is_empty() {
            return Err(Error::Config("models.enabled is empty".into()));
        }
        let dup = |n: usize, m: usize, what: &str| {
            if n != m {
                Err(Error::Config(format!("{what} lists a duplicate entry")))
            } else {
                Ok(())
            }
        };
        let mut codes = self.preprocess.codes.clone();
        codes.sort();
        codes.dedup();
        dup(codes.len(), self.preprocess.codes.len(), "preprocess.codes")?;
        let mut e = self.embeddings.enabled.clone();
        e.sort();
        e.dedup();
        dup(e.len(), self.embeddings.enabled.len(), "embeddings.enabled")?;
        let mut m = self.models.enabled.clone();
        m.sort();
        m.dedup();
        dup(m.len(), self.models.enabled.len(), "models.enabled")?;
        if self.embeddings.enabled.contains(&EmbeddingKind::Word2Vec) {
            self.embeddings.word2vec.validate()?;
        }
        if self.run.workers == Some(0) {
            return Err(Error::Config("run.workers must be >= 1".into()));
        }
        Ok(())
    }

    /// Codes in canonical (scenario) order.
    pub fn codes(&self) -> Vec<PreprocessConfig> {
        let mut c = self.preprocess.codes.clone();
        c.sort_by_key(|c| c.index());
        c
    }

    /// Enabled embeddings in canonical order.
    pub fn embeddings(&self) -> Vec<EmbeddingKind> {
        EmbeddingKind::ALL.into_iter().filter(|k| self.embeddings.enabled.contains(k)).collect()
    }

    /// Enabled models in table order.
    pub fn models(&self) -> Vec<ModelKind> {
        ModelKind::TABLE_ORDER.into_iter().filter(|k| self.models.enabled.contains(k)).collect()
    }

    /// Loads the configured corpus, or generates the synthetic one.
    pub fn load_corpus(&self) -> Result<LabeledCorpus> {
        match &self.corpus.path {
            Some(p) => load_corpus(p, self.corpus.format.unwrap_or_else(|| CorpusFormat::from_path(p))),
            None => {
                let s = &self.corpus.synth;
                synth_corpus(s.n_docs, s.n_labels, s.seed, s.morphology)
            }
        }
    }

    pub fn resources(&self) -> Result<PipelineResources> {
        PipelineResources::from_paths(self.preprocess.stopwords.as_deref(), self.preprocess.suffixes.as_deref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_full_grid() {
        let cfg = RunConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.codes().len(), 16);
        assert_eq!(cfg.embeddings().len(), 3);
        assert_eq!(cfg.models(), ModelKind::TABLE_ORDER.to_vec());
        assert_eq!(cfg.models.knn.k, 15);
    }

    #[test]
    fn sections_override_defaults() {
        let cfg = RunConfig::from_toml_str(
            r#"
            [corpus.synth]
            n_docs = 800
            [preprocess]
            codes = ["1111", "0000"]
            [embeddings]
            enabled = ["tfidf"]
            [embeddings.word2vec]
            dim = 16
            [models]
            enabled = ["lr", "nb"]
            [models.knn]
            k = 3
            [run]
            seed = 9
            "#,
        )
        .unwrap();
        assert_eq!(cfg.corpus.synth.n_docs, 800);
        assert_eq!(cfg.codes().iter().map(|c| c.code()).collect::<Vec<_>>(), ["0000", "1111"]);
        assert_eq!(cfg.models(), vec![ModelKind::Nb, ModelKind::Lr]);
        assert_eq!(cfg.embeddings.word2vec.dim, 16);
        assert_eq!(cfg.embeddings.word2vec.window, 5);
        assert_eq!(cfg.run.seed, 9);
    }

    #[test]
    fn bad_configs_are_config_errors() {
        for text in [
            "[preprocess]\ncodes = [\"012\"]",
            "[models]\nenabled = [\"xgb\"]",
            "[run]\nunknown_key = 1",
            "[models]\nenabled = [\"nb\", \"nb\"]",
            "[embeddings.word2vec]\ndim = 0",
        ] {
            assert!(RunConfig::from_toml_str(text).unwrap_err().is_config(), "{text}");
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
    }
}
