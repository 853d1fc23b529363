//! Naive Bayes: multinomial with Laplace/Lidstone smoothing for sparse
//! (count-like, non-negative) features, Gaussian for dense embeddings.

use serde::{Deserialize, Serialize};

use super::TrainSet;
use crate::error::{Error, Result};
use crate::vectorize::{FeatureKind, FeatureVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbParams {
    /// Additive smoothing for the multinomial model.
    pub alpha: f64,
    /// Gaussian variance floor, as a fraction of the largest feature variance.
    pub var_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams { alpha: 1.0, var_floor: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NaiveBayes {
    Multinomial {
        log_prior: Vec<f64>,
        /// `log_theta[c][j] = ln((N_cj + alpha) / (N_c + alpha * V))`
        log_theta: Vec<Vec<f64>>,
    },
    Gaussian {
        log_prior: Vec<f64>,
        mean: Vec<Vec<f64>>,
        var: Vec<Vec<f64>>,
    },
}

fn log_priors(y: &[usize], n_classes: usize) -> Vec<f64> {
    let mut counts = vec![0.0; n_classes];
    for &c in y {
        counts[c] += 1.0;
    }
    counts.iter().map(|c| (c / y.len() as f64).ln()).collect()
}

impl NaiveBayes {
    pub(crate) fn fit(data: &TrainSet<'_>, params: &NbParams) -> Result<Self> {
        let l = data.n_classes;
        let log_prior = log_priors(&data.y, l);
        match data.kind {
            FeatureKind::Sparse => {
                if params.alpha <= 0.0 {
                    return Err(Error::Config("naive Bayes alpha must be positive".into()));
                }
                let mut counts = vec![vec![0.0; data.dim]; l];
                for (x, &c) in data.x.iter().zip(&data.y) {
                    for (j, v) in x.iter_nonzero() {
                        if v < 0.0 {
                            return Err(Error::InvalidInput(format!(
                                "multinomial naive Bayes needs non-negative features, got {v} at index {j}"
                            )));
                        }
                        counts[c][j] += v;
                    }
                }
                let v = data.dim as f64;
                let log_theta = counts
                    .into_iter()
                    .map(|row| {
                        let total: f64 = row.iter().sum();
                        let denom = (total + params.alpha * v).ln();
                        row.into_iter().map(|n| (n + params.alpha).ln() - denom).collect()
                    })
                    .collect();
                Ok(NaiveBayes::Multinomial { log_prior, log_theta })
            }
            FeatureKind::Dense => {
                let mut mean = vec![vec![0.0; data.dim]; l];
                let mut n = vec![0.0; l];
                for (x, &c) in data.x.iter().zip(&data.y) {
                    x.axpy_into(1.0, &mut mean[c]);
                    n[c] += 1.0;
                }
                for (m, &nc) in mean.iter_mut().zip(&n) {
                    m.iter_mut().for_each(|v| *v /= nc);
                }
                let mut var = vec![vec![0.0; data.dim]; l];
                for (x, &c) in data.x.iter().zip(&data.y) {
                    for (j, xv) in x.to_dense().into_iter().enumerate() {
                        let d = xv - mean[c][j];
                        var[c][j] += d * d;
                    }
                }
                for (v, &nc) in var.iter_mut().zip(&n) {
                    v.iter_mut().for_each(|s| *s /= nc);
                }
                // Floor relative to the largest overall feature variance.
                let mut global_max: f64 = 0.0;
                for j in 0..data.dim {
                    let mu = data.x.iter().map(|x| x.get(j)).sum::<f64>() / data.x.len() as f64;
                    let s = data.x.iter().map(|x| (x.get(j) - mu).powi(2)).sum::<f64>() / data.x.len() as f64;
                    global_max = global_max.max(s);
                }
                let eps = (params.var_floor * global_max).max(f64::MIN_POSITIVE);
                var.iter_mut().flatten().for_each(|s| *s += eps);
                Ok(NaiveBayes::Gaussian { log_prior, mean, var })
            }
        }
    }

    /// Unnormalized joint log-likelihood `ln P(c) + ln P(x | c)` per class.
    pub fn joint_log_likelihood(&self, x: &FeatureVector) -> Vec<f64> {
        match self {
            NaiveBayes::Multinomial { log_prior, log_theta } => log_prior
                .iter()
                .zip(log_theta)
                .map(|(lp, th)| lp + x.iter_nonzero().map(|(j, v)| v * th[j]).sum::<f64>())
                .collect(),
            NaiveBayes::Gaussian { log_prior, mean, var } => {
                let xd = x.to_dense();
                let ln2pi = (2.0 * std::f64::consts::PI).ln();
                log_prior
                    .iter()
                    .zip(mean.iter().zip(var))
                    .map(|(lp, (m, v))| {
                        lp - 0.5
                            * xd.iter()
                                .zip(m.iter().zip(v))
                                .map(|(xj, (mj, vj))| ln2pi + vj.ln() + (xj - mj) * (xj - mj) / vj)
                                .sum::<f64>()
                    })
                    .collect()
            }
        }
    }

    /// Posterior `P(c | x)` computed in log space.
    pub fn posterior(&self, x: &FeatureVector) -> Vec<f64> {
        softmax(&self.joint_log_likelihood(x))
    }
}

pub(crate) fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}
