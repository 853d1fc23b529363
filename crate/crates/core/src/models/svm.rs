//! Linear SVM, one-vs-rest, trained with Pegasos.
//!
//! Each binary problem minimizes
//! `lambda/2 * (|w|^2 + b^2) + 1/n * sum_i max(0, 1 - y_i (w·x_i + b))`.
//! The bias is handled as an extra constant-1 feature so it is regularized
//! together with `w`; that keeps the step size schedule `1/(lambda t)` stable.
//! After each step the iterate is projected onto the ball of radius
//! `1/sqrt(lambda)`, which contains the optimum.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::argmax;
use super::TrainSet;
use crate::error::{Error, Result};
use crate::vectorize::FeatureVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { lambda: 1e-4, epochs: 20 }
    }
}

/// One binary hyperplane `w·x + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub w: Vec<f64>,
    pub b: f64,
}

impl Hyperplane {
    pub fn decision(&self, x: &FeatureVector) -> f64 {
        x.dot_dense(&self.w) + self.b
    }
}

/// Regularized hinge objective of one binary problem with targets `y_i = ±1`.
pub fn svm_objective(h: &Hyperplane, x: &[FeatureVector], y: &[f64], lambda: f64) -> f64 {
    let reg = 0.5 * lambda * (crate::vectorize::dot(&h.w, &h.w) + h.b * h.b);
    let hinge: f64 = x.iter().zip(y).map(|(xi, yi)| (1.0 - yi * h.decision(xi)).max(0.0)).sum();
    reg + hinge / x.len() as f64
}

/// A subgradient of [`svm_objective`]: samples exactly on the margin count as
/// satisfied.
pub fn svm_subgradient(h: &Hyperplane, x: &[FeatureVector], y: &[f64], lambda: f64) -> Hyperplane {
    let n = x.len() as f64;
    let mut gw: Vec<f64> = h.w.iter().map(|w| lambda * w).collect();
    let mut gb = lambda * h.b;
    for (xi, &yi) in x.iter().zip(y) {
        if yi * h.decision(xi) < 1.0 {
            xi.axpy_into(-yi / n, &mut gw);
            gb -= yi / n;
        }
    }
    Hyperplane { w: gw, b: gb }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    planes: Vec<Hyperplane>,
}

impl LinearSvm {
    pub(crate) fn fit(data: &TrainSet<'_>, params: &SvmParams, seed: u64) -> Result<Self> {
        if params.lambda.is_nan() || params.lambda <= 0.0 || params.epochs == 0 {
            return Err(Error::Config("svm needs lambda > 0 and epochs >= 1".into()));
        }
        let n = data.x.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // One visiting order shared by every binary problem.
        let orders: Vec<Vec<usize>> = (0..params.epochs)
            .map(|_| {
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut rng);
                o
            })
            .collect();
        let planes = (0..data.n_classes)
            .map(|c| {
                let y: Vec<f64> = data.y.iter().map(|&yi| if yi == c { 1.0 } else { -1.0 }).collect();
                pegasos(data.x, &y, data.dim, params.lambda, &orders)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearSvm { planes })
    }

    pub fn decision_scores(&self, x: &FeatureVector) -> Vec<f64> {
        self.planes.iter().map(|h| h.decision(x)).collect()
    }

    pub fn predict_index(&self, x: &FeatureVector) -> usize {
        argmax(&self.decision_scores(x))
    }

    pub fn planes(&self) -> &[Hyperplane] {
        &self.planes
    }
}

/// Pegasos on the augmented vector `[w, b]`, stored as `scale * v`.
fn pegasos(x: &[FeatureVector], y: &[f64], dim: usize, lambda: f64, orders: &[Vec<usize>]) -> Result<Hyperplane> {
    let mut v = vec![0.0; dim];
    let mut vb = 0.0;
    let mut scale = 1.0;
    let mut sq_norm = 0.0; // |[v, vb]|^2
    let radius_sq = 1.0 / lambda;
    let mut t = 0usize;
    for order in orders {
        for &i in order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let margin = y[i] * scale * (x[i].dot_dense(&v) + vb);
            let shrink = 1.0 - eta * lambda;
            if shrink <= 0.0 {
                v.iter_mut().for_each(|a| *a = 0.0);
                vb = 0.0;
                scale = 1.0;
                sq_norm = 0.0;
            } else {
                scale *= shrink;
            }
            if margin < 1.0 {
                let c = eta * y[i] / scale;
                // |v + c x|^2 = |v|^2 + 2c v·x + c^2 |x|^2, with the bias coordinate.
                let vx = x[i].dot_dense(&v) + vb;
                let xx = x[i].norm().powi(2) + 1.0;
                sq_norm += 2.0 * c * vx + c * c * xx;
                x[i].axpy_into(c, &mut v);
                vb += c;
            }
            let norm_sq = scale * scale * sq_norm.max(0.0);
            if norm_sq > radius_sq {
                scale *= (radius_sq / norm_sq).sqrt();
            }
            if scale < 1e-9 {
                // Fold the scale back in before it underflows.
                v.iter_mut().for_each(|a| *a *= scale);
                vb *= scale;
                sq_norm *= scale * scale;
                scale = 1.0;
            }
        }
    }
    let w: Vec<f64> = v.iter().map(|a| a * scale).collect();
    let b = vb * scale;
    if w.iter().any(|a| !a.is_finite()) || !b.is_finite() {
        return Err(Error::Diverged("svm weights became non-finite".into()));
    }
    Ok(Hyperplane { w, b })
}
