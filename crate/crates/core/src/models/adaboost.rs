//! SAMME multiclass boosting over depth-1 stumps.
//!
//! Round m fits a stump on the current sample weights, with weighted error
//! `err_m` and vote weight `alpha_m = ln((1 - err_m)/err_m) + ln(L - 1)`.
//! Misclassified samples are up-weighted by `exp(alpha_m)`, then all weights
//! renormalized. Boosting stops once a stump is no better than chance
//! (`err_m >= 1 - 1/L`, that stump discarded) or is perfect (`err_m = 0`, kept).

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{argmax, Columns, DecisionTree, GrowConfig};
use super::TrainSet;
use crate::vectorize::FeatureVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaBoostParams {
    pub rounds: usize,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        AdaBoostParams { rounds: 50 }
    }
}

/// SAMME vote weight for a weighted error `err` over `n_classes` labels.
pub fn samme_alpha(err: f64, n_classes: usize) -> f64 {
    let err = err.max(f64::EPSILON);
    ((1.0 - err) / err).ln() + ((n_classes - 1) as f64).ln()
}

/// Per-round record of a fit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoostingTrace {
    /// Weighted error of every retained round.
    pub errors: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Sum of sample weights after each retained round's renormalization.
    pub weight_sums: Vec<f64>,
    /// Error of the stump that stopped boosting, if one was rejected.
    pub rejected_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    stumps: Vec<DecisionTree>,
    alphas: Vec<f64>,
    n_classes: usize,
    /// Used when no round was retained.
    majority: usize,
    trace: BoostingTrace,
}

impl AdaBoost {
    pub(crate) fn fit(data: &TrainSet<'_>, params: &AdaBoostParams) -> Self {
        let n = data.x.len();
        let l = data.n_classes;
        let chance = 1.0 - 1.0 / l as f64;
        let cols = Columns::new(data.x, data.dim);
        let cfg = GrowConfig { max_depth: Some(1), min_samples_split: 2, max_features: None };

        let mut class_counts = vec![0.0; l];
        for &c in &data.y {
            class_counts[c] += 1.0;
        }
        let majority = argmax(&class_counts);

        let mut w = vec![1.0 / n as f64; n];
        let mut stumps = Vec::new();
        let mut alphas = Vec::new();
        let mut trace = BoostingTrace::default();
        for _ in 0..params.rounds {
            let stump = DecisionTree::grow::<ChaCha8Rng>(&cols, &data.y, &w, l, &cfg, None);
            let wrong: Vec<bool> = data.x.iter().zip(&data.y).map(|(x, &y)| stump.predict_index(x) != y).collect();
            let total: f64 = w.iter().sum();
            let err = w.iter().zip(&wrong).filter(|(_, &bad)| bad).map(|(wi, _)| wi).sum::<f64>() / total;
            if err >= chance {
                trace.rejected_error = Some(err);
                break;
            }
            let alpha = samme_alpha(err, l);
            stumps.push(stump);
            alphas.push(alpha);
            trace.errors.push(err);
            trace.alphas.push(alpha);
            if err <= 0.0 {
                trace.weight_sums.push(w.iter().sum::<f64>() / total);
                break;
            }
            let boost = alpha.exp();
            for (wi, &bad) in w.iter_mut().zip(&wrong) {
                if bad {
                    *wi *= boost;
                }
            }
            let sum: f64 = w.iter().sum();
            w.iter_mut().for_each(|wi| *wi /= sum);
            trace.weight_sums.push(w.iter().sum());
        }
        AdaBoost { stumps, alphas, n_classes: l, majority, trace }
    }

    /// Alpha-weighted votes per class, normalized to sum to 1 when any round exists.
    pub fn votes(&self, x: &FeatureVector) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        if self.stumps.is_empty() {
            votes[self.majority] = 1.0;
            return votes;
        }
        for (s, a) in self.stumps.iter().zip(&self.alphas) {
            votes[s.predict_index(x)] += a;
        }
        let total: f64 = votes.iter().sum();
        votes.iter_mut().for_each(|v| *v /= total);
        votes
    }

    pub fn predict_index(&self, x: &FeatureVector) -> usize {
        argmax(&self.votes(x))
    }

    pub fn rounds(&self) -> usize {
        self.stumps.len()
    }

    /// True when the first stump was no better than chance.
    pub fn degenerate(&self) -> bool {
        self.stumps.is_empty()
    }

    pub fn trace(&self) -> &BoostingTrace {
        &self.trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_formula() {
        // L=2: classical ln((1-err)/err).
        assert!((samme_alpha(0.25, 2) - 3f64.ln()).abs() < 1e-15);
        // err=0.25, L=8: ln 3 + ln 7.
        let a = samme_alpha(0.25, 8);
        assert!((a - (3f64.ln() + 7f64.ln())).abs() < 1e-15);
        assert!((a - 3.0445).abs() < 1e-4);
    }
}
