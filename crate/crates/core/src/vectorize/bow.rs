//! Bag-of-words encoders: binary presence (one-hot) and TF-IDF.

use crate::error::Result;
use crate::preprocess::TokenStream;

use super::vector::SparseVector;
use super::vocab::Vocabulary;

/// Multi-hot document encoder: weight 1 for every vocabulary token present.
#[derive(Clone, Debug, PartialEq)]
pub struct OneHotModel {
    vocab: Vocabulary,
}

impl OneHotModel {
    pub fn fit(docs: &[TokenStream], min_df: usize) -> Result<Self> {
        Ok(OneHotModel { vocab: Vocabulary::build(docs, min_df)? })
    }

    pub fn from_vocabulary(vocab: Vocabulary) -> Self {
        OneHotModel { vocab }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.vocab.len()
    }

    /// Out-of-vocabulary tokens are ignored.
    pub fn transform(&self, stream: &TokenStream) -> SparseVector {
        let pairs = present_indices(&self.vocab, stream).into_iter().map(|i| (i, 1.0)).collect();
        SparseVector::from_pairs(self.dim(), pairs).expect("indices come from the vocabulary")
    }
}

fn present_indices(vocab: &Vocabulary, stream: &TokenStream) -> Vec<usize> {
    let mut idx: Vec<usize> = stream.iter().filter_map(|t| vocab.get(t)).collect();
    idx.sort_unstable();
    idx.dedup();
    idx
}

/// TF-IDF encoder with relative term frequency and natural-log idf:
/// `w_i = count(i)/len * ln(N / df_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TfidfModel {
    vocab: Vocabulary,
    idf: Vec<f64>,
}

impl TfidfModel {
    pub fn fit(docs: &[TokenStream], min_df: usize) -> Result<Self> {
        Ok(Self::from_vocabulary(Vocabulary::build(docs, min_df)?))
    }

    pub fn from_vocabulary(vocab: Vocabulary) -> Self {
        let n = vocab.n_docs() as f64;
        let idf = (0..vocab.len()).map(|i| (n / vocab.df(i) as f64).ln()).collect();
        TfidfModel { vocab, idf }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn dim(&self) -> usize {
        self.vocab.len()
    }

    /// OOV tokens count toward neither the term count nor the document length.
    pub fn transform(&self, stream: &TokenStream) -> SparseVector {
        let ids: Vec<usize> = stream.iter().filter_map(|t| self.vocab.get(t)).collect();
        if ids.is_empty() {
            return SparseVector::zeros(self.dim());
        }
        let len = ids.len() as f64;
        let mut counts: Vec<(usize, usize)> = Vec::new();
        let mut sorted = ids;
        sorted.sort_unstable();
        for i in sorted {
            match counts.last_mut() {
                Some((j, c)) if *j == i => *c += 1,
                _ => counts.push((i, 1)),
            }
        }
        let pairs = counts.into_iter().map(|(i, c)| (i, (c as f64 / len) * self.idf[i])).collect();
        SparseVector::from_pairs(self.dim(), pairs).expect("indices come from the vocabulary")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(raw: &[&[&str]]) -> Vec<TokenStream> {
        raw.iter().map(|d| TokenStream::from(*d)).collect()
    }

    #[test]
    fn onehot_examples() {
        let model = OneHotModel::fit(&docs(&[&["a"], &["b"], &["c"]]), 1).unwrap();
        let v = model.transform(&TokenStream::from(["a", "a", "c"]));
        assert_eq!(v.entries(), &[(0, 1.0), (2, 1.0)]);
        let empty = model.transform(&TokenStream::default());
        assert_eq!((empty.dim(), empty.nnz()), (3, 0));
        assert_eq!(model.transform(&TokenStream::from(["zz", "qq"])).nnz(), 0);
    }

    #[test]
    fn tfidf_examples() {
        let model = TfidfModel::fit(&docs(&[&["a", "a", "b"], &["b", "c"]]), 1).unwrap();
        let v = model.transform(&TokenStream::from(["a", "a", "b"]));
        // (2/3) ln 2 for a; b occurs in every doc so its weight is 0 and omitted.
        let expected_a = (2.0 / 3.0) * 2f64.ln();
        assert_eq!(v.nnz(), 1);
        assert!((v.get(0) - expected_a).abs() < 1e-15);
        assert!((expected_a - 0.4621).abs() < 1e-4);
        assert_eq!(v.get(1), 0.0);
        assert_eq!(model.transform(&TokenStream::default()).nnz(), 0);
    }

    #[test]
    fn tfidf_oov_excluded_from_length() {
        let model = TfidfModel::fit(&docs(&[&["a"], &["b"]]), 1).unwrap();
        let with_oov = model.transform(&TokenStream::from(["a", "zzz", "zzz"]));
        let without = model.transform(&TokenStream::from(["a"]));
        assert_eq!(with_oov, without);
        assert!((without.get(0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn idf_zero_iff_df_equals_n() {
        let model = TfidfModel::fit(&docs(&[&["a", "b"], &["b"]]), 1).unwrap();
        assert_eq!(model.idf()[1], 0.0);
        assert!(model.idf()[0] > 0.0);
    }
}
