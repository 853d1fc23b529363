//! Multinomial (softmax) logistic regression, full-batch gradient descent.
//!
//! Minimizes `1/n * sum_i -ln softmax(W x_i + b)[y_i] + lambda/2 * |W|^2`
//! (the bias is not penalized). A step that increases the loss is rejected and
//! the learning rate halved; an accepted step grows it by `lr_growth`.

use serde::{Deserialize, Serialize};

use super::nb::softmax;
use super::tree::argmax;
use super::TrainSet;
use crate::error::{Error, Result};
use crate::vectorize::FeatureVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LrParams {
    pub lambda: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub lr_growth: f64,
    /// Stop once the relative loss decrease of an accepted step falls below this.
    pub tolerance: f64,
}

impl Default for LrParams {
    fn default() -> Self {
        LrParams { lambda: 1e-4, iterations: 300, learning_rate: 0.5, lr_growth: 1.1, tolerance: 1e-9 }
    }
}

/// Weights `W` (`n_classes × dim`, row-major) and biases `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrWeights {
    pub n_classes: usize,
    pub dim: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl LrWeights {
    pub fn zeros(n_classes: usize, dim: usize) -> Self {
        LrWeights { n_classes, dim, w: vec![0.0; n_classes * dim], b: vec![0.0; n_classes] }
    }

    pub fn logits(&self, x: &FeatureVector) -> Vec<f64> {
        (0..self.n_classes).map(|c| x.dot_dense(&self.w[c * self.dim..(c + 1) * self.dim]) + self.b[c]).collect()
    }

    /// Flat parameter vector `[W..., b...]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.w.iter().chain(&self.b).copied().collect()
    }

    pub fn from_flat(n_classes: usize, dim: usize, flat: &[f64]) -> Self {
        let (w, b) = flat.split_at(n_classes * dim);
        LrWeights { n_classes, dim, w: w.to_vec(), b: b.to_vec() }
    }
}

/// Loss and its gradient (same layout as the weights).
pub fn lr_loss_and_grad(p: &LrWeights, x: &[FeatureVector], y: &[usize], lambda: f64) -> (f64, LrWeights) {
    let n = x.len() as f64;
    let mut g = LrWeights::zeros(p.n_classes, p.dim);
    let mut loss = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let z = p.logits(xi);
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - z[yi];
        for (c, &zc) in z.iter().enumerate() {
            let r = ((zc - lse).exp() - if c == yi { 1.0 } else { 0.0 }) / n;
            if r != 0.0 {
                xi.axpy_into(r, &mut g.w[c * p.dim..(c + 1) * p.dim]);
                g.b[c] += r;
            }
        }
    }
    loss /= n;
    loss += 0.5 * lambda * crate::vectorize::dot(&p.w, &p.w);
    for (gw, w) in g.w.iter_mut().zip(&p.w) {
        *gw += lambda * w;
    }
    (loss, g)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    weights: LrWeights,
    losses: Vec<f64>,
    iterations: usize,
}

impl LogisticRegression {
    pub(crate) fn fit(data: &TrainSet<'_>, params: &LrParams) -> Result<Self> {
        if params.lambda < 0.0 || params.learning_rate.is_nan() || params.learning_rate <= 0.0 {
            return Err(Error::Config("logistic regression needs lambda >= 0 and learning_rate > 0".into()));
        }
        let mut p = LrWeights::zeros(data.n_classes, data.dim);
        let (mut loss, mut grad) = lr_loss_and_grad(&p, data.x, &data.y, params.lambda);
        let mut lr = params.learning_rate;
        let mut losses = vec![loss];
        let mut iterations = 0;
        for _ in 0..params.iterations {
            iterations += 1;
            let mut cand = p.clone();
            cand.w.iter_mut().zip(&grad.w).for_each(|(w, g)| *w -= lr * g);
            cand.b.iter_mut().zip(&grad.b).for_each(|(b, g)| *b -= lr * g);
            let (cl, cg) = lr_loss_and_grad(&cand, data.x, &data.y, params.lambda);
            if !cl.is_finite() && !loss.is_finite() {
                return Err(Error::Diverged("logistic regression loss is not finite".into()));
            }
            if cl.is_finite() && cl <= loss {
                let rel = (loss - cl) / loss.max(f64::MIN_POSITIVE);
                p = cand;
                loss = cl;
                grad = cg;
                losses.push(loss);
                lr *= params.lr_growth;
                if rel < params.tolerance {
                    break;
                }
            } else {
                lr *= 0.5;
                if lr < 1e-12 {
                    break;
                }
            }
        }
        Ok(LogisticRegression { weights: p, losses, iterations })
    }

    pub fn probabilities(&self, x: &FeatureVector) -> Vec<f64> {
        softmax(&self.weights.logits(x))
    }

    pub fn predict_index(&self, x: &FeatureVector) -> usize {
        argmax(&self.weights.logits(x))
    }

    pub fn weights(&self) -> &LrWeights {
        &self.weights
    }

    /// Loss after every accepted step, starting with the initial loss.
    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}
