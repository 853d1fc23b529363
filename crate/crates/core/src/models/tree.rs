//! CART decision trees with weighted Gini impurity.
//!
//! Splits are `x[feature] <= threshold` (left) on single features, with
//! thresholds at midpoints between consecutive distinct values present in the
//! node. Features are stored column-wise as sorted non-zero entries so sparse
//! bag-of-words inputs never get densified; absent entries are zeros.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::vectorize::FeatureVector;

/// Minimum impurity decrease that counts as an improvement.
const GAIN_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: None, min_samples_split: 2 }
    }
}

/// Column-major view of a training matrix: per feature, the non-zero
/// `(value, row)` pairs sorted by value then row.
pub(crate) struct Columns {
    cols: Vec<Vec<(f64, u32)>>,
}

impl Columns {
    pub(crate) fn new(x: &[FeatureVector], dim: usize) -> Self {
        let mut cols: Vec<Vec<(f64, u32)>> = vec![Vec::new(); dim];
        for (row, v) in x.iter().enumerate() {
            for (f, val) in v.iter_nonzero() {
                cols[f].push((val, row as u32));
            }
        }
        for col in &mut cols {
            col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        Columns { cols }
    }

    pub(crate) fn dim(&self) -> usize {
        self.cols.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) enum Node {
    Leaf { class: usize, distribution: Vec<f64> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_classes: usize,
}

/// Growth settings for one tree.
pub(crate) struct GrowConfig {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features examined per split; `None` or `>= dim` means all, in index order.
    pub max_features: Option<usize>,
}

struct Builder<'a, R: Rng> {
    cols: &'a Columns,
    y: &'a [usize],
    weights: &'a [f64],
    n_classes: usize,
    cfg: &'a GrowConfig,
    rng: Option<&'a mut R>,
    nodes: Vec<Node>,
    mark: Vec<u32>,
    tag: u32,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn gini(class_w: &[f64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    1.0 - class_w.iter().map(|w| (w / total) * (w / total)).sum::<f64>()
}

/// Index of the largest entry; ties go to the smallest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

impl<'a, R: Rng> Builder<'a, R> {
    fn leaf(&mut self, class_w: Vec<f64>) -> usize {
        let class = argmax(&class_w);
        self.nodes.push(Node::Leaf { class, distribution: class_w });
        self.nodes.len() - 1
    }

    fn next_tag(&mut self) -> u32 {
        self.tag += 1;
        self.tag
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let mut class_w = vec![0.0; self.n_classes];
        let mut class_n = vec![0usize; self.n_classes];
        for &r in &rows {
            class_w[self.y[r]] += self.weights[r];
            class_n[self.y[r]] += 1;
        }
        let total: f64 = class_w.iter().sum();
        let pure = class_w.iter().filter(|&&w| w > 0.0).count() <= 1;
        let depth_capped = self.cfg.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || rows.len() < self.cfg.min_samples_split.max(2) {
            return self.leaf(class_w);
        }

        let tag = self.next_tag();
        for &r in &rows {
            self.mark[r] = tag;
        }
        let best = self.best_split(tag, &class_w, &class_n, total, rows.len());
        let Some(best) = best else {
            return self.leaf(class_w);
        };

        // Rows with value > threshold go right. Rows without an entry are zeros
        // and keep the node tag.
        let right_tag = self.next_tag();
        let left_tag = self.next_tag();
        for &(v, r) in &self.cols.cols[best.feature] {
            let r = r as usize;
            if self.mark[r] == tag {
                self.mark[r] = if v > best.threshold { right_tag } else { left_tag };
            }
        }
        let zeros_right = 0.0 > best.threshold;
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for &r in &rows {
            let goes_right = self.mark[r] == right_tag || (zeros_right && self.mark[r] == tag);
            if goes_right {
                right.push(r)
            } else {
                left.push(r)
            }
        }
        debug_assert!(!left.is_empty() && !right.is_empty());

        let id = self.nodes.len();
        self.nodes.push(Node::Split { feature: best.feature, threshold: best.threshold, left: 0, right: 0 });
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        if let Node::Split { left, right, .. } = &mut self.nodes[id] {
            *left = l;
            *right = r;
        }
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let dim = self.cols.dim();
        match (self.cfg.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < dim => {
                let mut f = sample(rng, dim, m.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..dim).collect(),
        }
    }

    fn best_split(
        &mut self,
        tag: u32,
        class_w: &[f64],
        class_n: &[usize],
        total: f64,
        n_rows: usize,
    ) -> Option<BestSplit> {
        let parent = gini(class_w, total);
        let mut best: Option<BestSplit> = None;
        let features = self.candidate_features();

        // (value, class, weight) groups in ascending value order; reused per feature.
        let mut entries: Vec<(f64, usize, f64)> = Vec::new();
        let mut left_w = vec![0.0; self.n_classes];
        let mut zero_w = vec![0.0; self.n_classes];
        let mut zero_n = vec![0usize; self.n_classes];
        for f in features {
            entries.clear();
            let mut nonzero_rows = 0usize;
            zero_w.copy_from_slice(class_w);
            zero_n.copy_from_slice(class_n);
            let mut first_positive = None;
            for &(v, r) in &self.cols.cols[f] {
                let r = r as usize;
                if self.mark[r] != tag {
                    continue;
                }
                nonzero_rows += 1;
                let (c, w) = (self.y[r], self.weights[r]);
                zero_w[c] -= w;
                zero_n[c] -= 1;
                if v > 0.0 && first_positive.is_none() {
                    first_positive = Some(entries.len());
                }
                entries.push((v, c, w));
            }
            if nonzero_rows == 0 {
                continue;
            }
            if nonzero_rows < n_rows {
                // Insert the implicit zero block between negatives and positives.
                let at = first_positive.unwrap_or(entries.len());
                let block: Vec<(f64, usize, f64)> =
                    (0..self.n_classes).filter(|&c| zero_n[c] > 0).map(|c| (0.0, c, zero_w[c].max(0.0))).collect();
                entries.splice(at..at, block);
            }

            left_w.iter_mut().for_each(|w| *w = 0.0);
            let mut left_total = 0.0;
            let mut i = 0;
            while i < entries.len() {
                let v = entries[i].0;
                while i < entries.len() && entries[i].0 == v {
                    left_w[entries[i].1] += entries[i].2;
                    left_total += entries[i].2;
                    i += 1;
                }
                if i == entries.len() {
                    break;
                }
                let right_total = total - left_total;
                if left_total <= 0.0 || right_total <= 0.0 {
                    continue;
                }
                let right_w: Vec<f64> = class_w.iter().zip(&left_w).map(|(t, l)| t - l).collect();
                let child = (left_total / total) * gini(&left_w, left_total)
                    + (right_total / total) * gini(&right_w, right_total);
                let gain = parent - child;
                let threshold = v + (entries[i].0 - v) / 2.0;
                if gain > GAIN_EPS && best.as_ref().is_none_or(|b| gain > b.gain + GAIN_EPS) {
                    best = Some(BestSplit { gain, feature: f, threshold });
                }
            }
        }
        best
    }
}

impl DecisionTree {
    /// Grows a tree on the rows with positive weight.
    pub(crate) fn grow<R: Rng>(
        cols: &Columns,
        y: &[usize],
        weights: &[f64],
        n_classes: usize,
        cfg: &GrowConfig,
        rng: Option<&mut R>,
    ) -> Self {
        let rows: Vec<usize> = (0..y.len()).filter(|&r| weights[r] > 0.0).collect();
        let mut b =
            Builder { cols, y, weights, n_classes, cfg, rng, nodes: Vec::new(), mark: vec![0; y.len()], tag: 0 };
        let root = b.grow(rows, 0);
        debug_assert_eq!(root, 0);
        DecisionTree { nodes: b.nodes, n_classes }
    }

    fn leaf_for(&self, x: &FeatureVector) -> &Node {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split { feature, threshold, left, right } => {
                    i = if x.get(*feature) <= *threshold { *left } else { *right };
                }
                leaf => return leaf,
            }
        }
    }

    pub fn predict_index(&self, x: &FeatureVector) -> usize {
        match self.leaf_for(x) {
            Node::Leaf { class, .. } => *class,
            Node::Split { .. } => unreachable!(),
        }
    }

    /// Normalized class weights at the leaf reached by `x`.
    pub fn leaf_distribution(&self, x: &FeatureVector) -> Vec<f64> {
        match self.leaf_for(x) {
            Node::Leaf { distribution, .. } => {
                let total: f64 = distribution.iter().sum();
                if total > 0.0 {
                    distribution.iter().map(|w| w / total).collect()
                } else {
                    vec![1.0 / self.n_classes as f64; self.n_classes]
                }
            }
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn depth(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + depth(nodes, *left).max(depth(nodes, *right)),
            }
        }
        depth(&self.nodes, 0)
    }

    /// (feature, threshold) of the root split, if the root is not a leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match &self.nodes[0] {
            Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::vectorize::{DenseVector, SparseVector};

    fn dense(rows: &[&[f64]]) -> Vec<FeatureVector> {
        rows.iter().map(|r| FeatureVector::Dense(DenseVector::new(r.to_vec()).unwrap())).collect()
    }

    fn grow(x: &[FeatureVector], y: &[usize], n_classes: usize, max_depth: Option<usize>) -> DecisionTree {
        let cols = Columns::new(x, x[0].dim());
        let cfg = GrowConfig { max_depth, min_samples_split: 2, max_features: None };
        DecisionTree::grow::<ChaCha8Rng>(&cols, y, &vec![1.0; y.len()], n_classes, &cfg, None)
    }

    #[test]
    fn one_dimensional_threshold() {
        let x = dense(&[&[-3.0], &[-1.0], &[-0.5], &[0.0], &[0.5], &[2.0]]);
        let y = [0, 0, 0, 1, 1, 1];
        let t = grow(&x, &y, 2, None);
        assert_eq!(t.depth(), 1);
        assert_eq!(t.root_split(), Some((0, -0.25)));
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(t.predict_index(xi), yi);
        }
    }

    #[test]
    fn pure_and_constant_inputs_are_single_leaves() {
        let x = dense(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let t = grow(&x, &[1, 1], 2, None);
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.predict_index(&x[0]), 1);

        let x = dense(&[&[1.0], &[1.0], &[1.0]]);
        let t = grow(&x, &[0, 1, 1], 2, None);
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.predict_index(&x[0]), 1);
    }

    #[test]
    fn split_ties_prefer_lowest_feature() {
        // Features 0 and 1 are identical; feature 0 must win.
        let x = dense(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]);
        let t = grow(&x, &[0, 0, 1, 1], 2, None);
        assert_eq!(t.root_split(), Some((0, 1.5)));
    }

    #[test]
    fn sparse_zero_block_splits() {
        // Presence of feature 2 separates the classes; zeros are implicit.
        let s = |pairs: Vec<(usize, f64)>| FeatureVector::Sparse(SparseVector::from_pairs(4, pairs).unwrap());
        let x = vec![
            s(vec![(0, 1.0)]),
            s(vec![(1, 0.5)]),
            s(vec![(2, 0.3)]),
            s(vec![(2, 0.7), (3, 1.0)]),
            s(vec![(0, -1.0), (2, 0.2)]),
        ];
        let y = [0, 0, 1, 1, 1];
        let t = grow(&x, &y, 2, None);
        assert_eq!(t.root_split(), Some((2, 0.1)));
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(t.predict_index(xi), yi);
        }
    }

    #[test]
    fn negative_values_and_zero_block_ordering() {
        let s = |pairs: Vec<(usize, f64)>| FeatureVector::Sparse(SparseVector::from_pairs(1, pairs).unwrap());
        let x = vec![s(vec![(0, -2.0)]), s(vec![(0, -1.0)]), s(vec![]), s(vec![]), s(vec![(0, 1.0)])];
        let y = [0, 0, 1, 1, 1];
        let t = grow(&x, &y, 2, None);
        assert_eq!(t.root_split(), Some((0, -0.5)));
        assert_eq!(t.predict_index(&s(vec![])), 1);
    }

    #[test]
    fn max_depth_limits_growth() {
        let x = dense(&[&[0.0], &[1.0], &[2.0], &[3.0]]);
        let t = grow(&x, &[0, 1, 0, 1], 2, Some(1));
        assert!(t.depth() <= 1);
        let full = grow(&x, &[0, 1, 0, 1], 2, None);
        for (xi, yi) in x.iter().zip([0, 1, 0, 1]) {
            assert_eq!(full.predict_index(xi), yi);
        }
    }

    #[test]
    fn weights_shift_the_leaf_majority() {
        let x = dense(&[&[0.0], &[0.0], &[0.0]]);
        let cols = Columns::new(&x, 1);
        let cfg = GrowConfig { max_depth: None, min_samples_split: 2, max_features: None };
        let t = DecisionTree::grow::<ChaCha8Rng>(&cols, &[0, 1, 1], &[0.8, 0.1, 0.1], 2, &cfg, None);
        assert_eq!(t.predict_index(&x[0]), 0);
    }
}
