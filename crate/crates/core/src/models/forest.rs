use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{argmax, Columns, DecisionTree, GrowConfig};
use super::TrainSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub trees: usize,
    /// Features examined per split; `None` means `ceil(sqrt(dim))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { trees: 100, max_features: None, bootstrap: true, max_depth: None, min_samples_split: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    n_classes: usize,
}

impl RandomForest {
    pub(crate) fn fit(data: &TrainSet<'_>, params: &ForestParams, seed: u64) -> Self {
        let n = data.x.len();
        let cols = Columns::new(data.x, data.dim);
        let max_features = params.max_features.unwrap_or_else(|| (data.dim as f64).sqrt().ceil() as usize).max(1);
        let cfg = GrowConfig {
            max_depth: params.max_depth,
            min_samples_split: params.min_samples_split,
            max_features: Some(max_features),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trees = (0..params.trees)
            .map(|_| {
                let weights = if params.bootstrap {
                    let mut w = vec![0.0; n];
                    for _ in 0..n {
                        w[rng.gen_range(0..n)] += 1.0;
                    }
                    w
                } else {
                    vec![1.0; n]
                };
                DecisionTree::grow(&cols, &data.y, &weights, data.n_classes, &cfg, Some(&mut rng))
            })
            .collect();
        RandomForest { trees, n_classes: data.n_classes }
    }

    /// Fraction of trees voting for each class.
    pub fn votes(&self, x: &crate::vectorize::FeatureVector) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        for t in &self.trees {
            votes[t.predict_index(x)] += 1.0;
        }
        let n = self.trees.len().max(1) as f64;
        votes.iter_mut().for_each(|v| *v /= n);
        votes
    }

    pub fn predict_index(&self, x: &crate::vectorize::FeatureVector) -> usize {
        argmax(&self.votes(x))
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}
