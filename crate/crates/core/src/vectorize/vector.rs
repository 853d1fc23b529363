use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector { dim, entries: Vec::new() }
    }

    /// Builds from (index, weight) pairs in any order. Duplicate indices are
    /// summed and zero weights dropped.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|&(i, _)| i);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (i, w) in pairs {
            if i >= dim {
                return Err(Error::InvalidInput(format!("index {i} out of range for dimension {dim}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite weight at index {i}")));
            }
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += w,
                _ => entries.push((i, w)),
            }
        }
        entries.retain(|&(_, w)| w != 0.0);
        Ok(SparseVector { dim, entries })
    }

    /// Dense slice to sparse, dropping zeros.
    pub fn from_dense(values: &[f64]) -> Self {
        let entries = values.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(i, &v)| (i, v)).collect();
        SparseVector { dim: values.len(), entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries.binary_search_by_key(&index, |&(i, _)| i).map(|p| self.entries[p].1).unwrap_or(0.0)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut sum = 0.0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    sum += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        sum
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * dense[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, w) in &self.entries {
            out[i] = w;
        }
        out
    }

    pub fn scaled(&self, c: f64) -> SparseVector {
        SparseVector::from_pairs(self.dim, self.entries.iter().map(|&(i, w)| (i, w * c)).collect())
            .expect("scaling keeps indices valid")
    }
}

/// Dense vector of finite components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite component at index {i}")));
        }
        Ok(DenseVector(values))
    }

    pub fn zeros(dim: usize) -> Self {
        DenseVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &DenseVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        dot(&self.0, &self.0).sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Either representation, as consumed by the classifiers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FeatureVector {
    Sparse(SparseVector),
    Dense(DenseVector),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Sparse,
    Dense,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Sparse => "sparse",
            FeatureKind::Dense => "dense",
        }
    }
}

impl FeatureVector {
    pub fn kind(&self) -> FeatureKind {
        match self {
            FeatureVector::Sparse(_) => FeatureKind::Sparse,
            FeatureVector::Dense(_) => FeatureKind::Dense,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeatureVector::Sparse(v) => v.dim(),
            FeatureVector::Dense(v) => v.dim(),
        }
    }

    /// Value at `index`, zero when not stored.
    pub fn get(&self, index: usize) -> f64 {
        match self {
            FeatureVector::Sparse(v) => v.get(index),
            FeatureVector::Dense(v) => v.as_slice()[index],
        }
    }

    /// Iterates (index, value) pairs that may be non-zero.
    pub fn iter_nonzero(&self) -> Box<dyn Iterator<Item = (usize, f64)> + '_> {
        match self {
            FeatureVector::Sparse(v) => Box::new(v.entries().iter().copied()),
            FeatureVector::Dense(v) => Box::new(v.as_slice().iter().copied().enumerate().filter(|&(_, x)| x != 0.0)),
        }
    }

    pub fn dot_dense(&self, weights: &[f64]) -> f64 {
        match self {
            FeatureVector::Sparse(v) => v.dot_dense(weights),
            FeatureVector::Dense(v) => dot(v.as_slice(), weights),
        }
    }

    /// `acc += c * self`
    pub fn axpy_into(&self, c: f64, acc: &mut [f64]) {
        match self {
            FeatureVector::Sparse(v) => {
                for &(i, w) in v.entries() {
                    acc[i] += c * w;
                }
            }
            FeatureVector::Dense(v) => {
                for (a, &x) in acc.iter_mut().zip(v.as_slice()) {
                    *a += c * x;
                }
            }
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            FeatureVector::Sparse(v) => v.norm(),
            FeatureVector::Dense(v) => v.norm(),
        }
    }

    pub fn scaled(&self, c: f64) -> FeatureVector {
        match self {
            FeatureVector::Sparse(v) => FeatureVector::Sparse(v.scaled(c)),
            FeatureVector::Dense(v) => FeatureVector::Dense(DenseVector(v.as_slice().iter().map(|x| x * c).collect())),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            FeatureVector::Sparse(v) => v.to_dense(),
            FeatureVector::Dense(v) => v.as_slice().to_vec(),
        }
    }
}

impl From<SparseVector> for FeatureVector {
    fn from(v: SparseVector) -> Self {
        FeatureVector::Sparse(v)
    }
}

impl From<DenseVector> for FeatureVector {
    fn from(v: DenseVector) -> Self {
        FeatureVector::Dense(v)
    }
}

/// `u·v / (|u||v|)`, defined as 0 when either vector is zero.
pub fn cosine_similarity(u: &DenseVector, v: &DenseVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: v.dim() });
    }
    Ok(cosine_from_parts(u.dot(v), u.norm(), v.norm()))
}

pub fn sparse_cosine_similarity(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: v.dim() });
    }
    Ok(cosine_from_parts(u.dot(v), u.norm(), v.norm()))
}

pub(crate) fn cosine_from_parts(dot: f64, nu: f64, nv: f64) -> f64 {
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}
