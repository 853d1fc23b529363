//! Document vectorization: one-hot (binary presence), TF-IDF and Word2Vec mean pooling.

mod bow;
mod vector;
mod vocab;
mod word2vec;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::TokenStream;

pub use bow::{OneHotModel, TfidfModel};
pub(crate) use vector::{cosine_from_parts, dot};
pub use vector::{cosine_similarity, sparse_cosine_similarity, DenseVector, FeatureKind, FeatureVector, SparseVector};
pub use vocab::Vocabulary;
pub use word2vec::{
    train_word2vec, W2vGradients, W2vVariant, Word2VecModel, Word2VecParams, MIN_LR_FRACTION, MODEL_MAGIC,
    MODEL_VERSION,
};

/// `build_vocab` under its operation name.
pub fn build_vocab(docs: &[TokenStream], min_df: usize) -> Result<Vocabulary> {
    Vocabulary::build(docs, min_df)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    OneHot,
    Tfidf,
    Word2Vec,
}

impl EmbeddingKind {
    /// Canonical order used for results and the full table.
    pub const ALL: [EmbeddingKind; 3] = [EmbeddingKind::OneHot, EmbeddingKind::Tfidf, EmbeddingKind::Word2Vec];

    pub fn name(self) -> &'static str {
        match self {
            EmbeddingKind::OneHot => "onehot",
            EmbeddingKind::Tfidf => "tfidf",
            EmbeddingKind::Word2Vec => "word2vec",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            EmbeddingKind::OneHot => "One-Hot",
            EmbeddingKind::Tfidf => "TF-IDF",
            EmbeddingKind::Word2Vec => "Word2Vec",
        }
    }
}

impl fmt::Display for EmbeddingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmbeddingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "onehot" => Ok(EmbeddingKind::OneHot),
            "tfidf" => Ok(EmbeddingKind::Tfidf),
            "word2vec" | "w2v" => Ok(EmbeddingKind::Word2Vec),
            other => Err(Error::Config(format!("unknown embedding '{other}'"))),
        }
    }
}

/// An embedding method with its hyperparameters, ready to fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EmbeddingSpec {
    OneHot { min_df: usize },
    Tfidf { min_df: usize },
    Word2Vec(Word2VecParams),
}

impl EmbeddingSpec {
    pub fn default_for(kind: EmbeddingKind) -> Self {
        match kind {
            EmbeddingKind::OneHot => EmbeddingSpec::OneHot { min_df: 1 },
            EmbeddingKind::Tfidf => EmbeddingSpec::Tfidf { min_df: 1 },
            EmbeddingKind::Word2Vec => EmbeddingSpec::Word2Vec(Word2VecParams::default()),
        }
    }

    pub fn kind(&self) -> EmbeddingKind {
        match self {
            EmbeddingSpec::OneHot { .. } => EmbeddingKind::OneHot,
            EmbeddingSpec::Tfidf { .. } => EmbeddingKind::Tfidf,
            EmbeddingSpec::Word2Vec(_) => EmbeddingKind::Word2Vec,
        }
    }

    /// Same spec with its seed replaced (only Word2Vec is seeded).
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            EmbeddingSpec::Word2Vec(p) => EmbeddingSpec::Word2Vec(Word2VecParams { seed, ..p.clone() }),
            other => other.clone(),
        }
    }

    /// Fits on training token streams only.
    pub fn fit(&self, docs: &[TokenStream]) -> Result<Embedding> {
        Ok(match self {
            EmbeddingSpec::OneHot { min_df } => Embedding::OneHot(OneHotModel::fit(docs, *min_df)?),
            EmbeddingSpec::Tfidf { min_df } => Embedding::Tfidf(TfidfModel::fit(docs, *min_df)?),
            EmbeddingSpec::Word2Vec(p) => Embedding::Word2Vec(train_word2vec(docs, p)?),
        })
    }
}

/// A fitted embedding.
#[derive(Clone, Debug, PartialEq)]
pub enum Embedding {
    OneHot(OneHotModel),
    Tfidf(TfidfModel),
    Word2Vec(Word2VecModel),
}

impl Embedding {
    pub fn kind(&self) -> EmbeddingKind {
        match self {
            Embedding::OneHot(_) => EmbeddingKind::OneHot,
            Embedding::Tfidf(_) => EmbeddingKind::Tfidf,
            Embedding::Word2Vec(_) => EmbeddingKind::Word2Vec,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Embedding::OneHot(m) => m.dim(),
            Embedding::Tfidf(m) => m.dim(),
            Embedding::Word2Vec(m) => m.dim(),
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        match self {
            Embedding::OneHot(m) => m.vocabulary(),
            Embedding::Tfidf(m) => m.vocabulary(),
            Embedding::Word2Vec(m) => m.vocabulary(),
        }
    }

    pub fn transform(&self, stream: &TokenStream) -> FeatureVector {
        match self {
            Embedding::OneHot(m) => m.transform(stream).into(),
            Embedding::Tfidf(m) => m.transform(stream).into(),
            Embedding::Word2Vec(m) => m.embed_document(stream).into(),
        }
    }

    pub fn transform_all(&self, streams: &[TokenStream]) -> Vec<FeatureVector> {
        streams.iter().map(|s| self.transform(s)).collect()
    }
}
