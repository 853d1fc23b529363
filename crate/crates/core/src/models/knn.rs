//! k-nearest neighbours.
//!
//! Dense inputs use Euclidean distance; sparse inputs use cosine distance
//! `1 - cos(u, v)` (with a zero vector at distance 1 from everything).
//! Distance ties are broken by training index, vote ties by smallest class.

use serde::{Deserialize, Serialize};

use super::tree::argmax;
use super::TrainSet;
use crate::vectorize::{FeatureVector, SparseVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 15 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    k: usize,
    x: Vec<FeatureVector>,
    norms: Vec<f64>,
    y: Vec<usize>,
    n_classes: usize,
}

/// Distance used by [`Knn`] for a pair of same-kind vectors.
pub fn knn_distance(a: &FeatureVector, b: &FeatureVector) -> f64 {
    match (a, b) {
        (FeatureVector::Sparse(u), FeatureVector::Sparse(v)) => cosine_distance(u, v, u.norm(), v.norm()),
        _ => euclidean(a, b),
    }
}

fn cosine_distance(u: &SparseVector, v: &SparseVector, nu: f64, nv: f64) -> f64 {
    1.0 - crate::vectorize::cosine_from_parts(u.dot(v), nu, nv)
}

fn euclidean(a: &FeatureVector, b: &FeatureVector) -> f64 {
    let (a, b) = (a.to_dense(), b.to_dense());
    a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Knn {
    pub(crate) fn fit(data: &TrainSet<'_>, params: &KnnParams) -> Self {
        Knn {
            k: params.k,
            x: data.x.to_vec(),
            norms: data.x.iter().map(|v| v.norm()).collect(),
            y: data.y.clone(),
            n_classes: data.n_classes,
        }
    }

    /// Training indices of the k nearest neighbours, nearest first.
    pub fn neighbours(&self, q: &FeatureVector) -> Vec<usize> {
        let qn = q.norm();
        let mut d: Vec<(f64, usize)> = match q {
            FeatureVector::Sparse(qs) => self
                .x
                .iter()
                .zip(&self.norms)
                .enumerate()
                .map(|(i, (x, &n))| match x {
                    FeatureVector::Sparse(xs) => (cosine_distance(qs, xs, qn, n), i),
                    _ => (knn_distance(q, x), i),
                })
                .collect(),
            FeatureVector::Dense(qd) => {
                let qd = qd.as_slice();
                self.x
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        let xd = x.to_dense();
                        (qd.iter().zip(&xd).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(), i)
                    })
                    .collect()
            }
        };
        let k = self.k.min(d.len());
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k, cmp);
            d.truncate(k);
        }
        d.sort_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }

    /// Fraction of the k neighbours in each class.
    pub fn votes(&self, q: &FeatureVector) -> Vec<f64> {
        let nb = self.neighbours(q);
        let mut votes = vec![0.0; self.n_classes];
        for &i in &nb {
            votes[self.y[i]] += 1.0;
        }
        let k = nb.len().max(1) as f64;
        votes.iter_mut().for_each(|v| *v /= k);
        votes
    }

    pub fn predict_index(&self, q: &FeatureVector) -> usize {
        argmax(&self.votes(q))
    }

    pub fn k(&self) -> usize {
        self.k
    }
}
