//! The seven classifiers behind one fit/predict interface.

mod adaboost;
mod forest;
mod knn;
mod logistic;
mod nb;
mod svm;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corpus::CategoryLabel;
use crate::error::{Error, Result};
use crate::vectorize::{DenseVector, FeatureKind, FeatureVector};

pub use adaboost::{samme_alpha, AdaBoost, AdaBoostParams, BoostingTrace};
pub use forest::{ForestParams, RandomForest};
pub use knn::{knn_distance, Knn, KnnParams};
pub use logistic::{lr_loss_and_grad, LogisticRegression, LrParams, LrWeights};
pub use nb::{NaiveBayes, NbParams};
pub use svm::{svm_objective, svm_subgradient, Hyperplane, LinearSvm, SvmParams};
pub use tree::{DecisionTree, TreeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Knn,
    Nb,
    Rf,
    Dt,
    Svm,
    Lr,
    Ab,
}

impl ModelKind {
    /// Row order of the full table.
    pub const TABLE_ORDER: [ModelKind; 7] =
        [ModelKind::Knn, ModelKind::Nb, ModelKind::Rf, ModelKind::Dt, ModelKind::Svm, ModelKind::Lr, ModelKind::Ab];

    /// Tie-break order when picking a best model: earlier wins.
    pub const PREFERENCE_ORDER: [ModelKind; 7] =
        [ModelKind::Nb, ModelKind::Lr, ModelKind::Svm, ModelKind::Rf, ModelKind::Dt, ModelKind::Knn, ModelKind::Ab];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Knn => "knn",
            ModelKind::Nb => "nb",
            ModelKind::Rf => "rf",
            ModelKind::Dt => "dt",
            ModelKind::Svm => "svm",
            ModelKind::Lr => "lr",
            ModelKind::Ab => "ab",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Knn => "KNN",
            ModelKind::Nb => "NB",
            ModelKind::Rf => "RF",
            ModelKind::Dt => "DT",
            ModelKind::Svm => "SVM",
            ModelKind::Lr => "LR",
            ModelKind::Ab => "AB",
        }
    }

    pub fn preference_rank(self) -> usize {
        Self::PREFERENCE_ORDER.iter().position(|&k| k == self).expect("every kind is ranked")
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "knn" => Ok(ModelKind::Knn),
            "nb" => Ok(ModelKind::Nb),
            "rf" => Ok(ModelKind::Rf),
            "dt" => Ok(ModelKind::Dt),
            "svm" => Ok(ModelKind::Svm),
            "lr" => Ok(ModelKind::Lr),
            "ab" => Ok(ModelKind::Ab),
            other => Err(Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

/// Hyperparameters of one classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierParams {
    Knn(KnnParams),
    Nb(NbParams),
    Rf(ForestParams),
    Dt(TreeParams),
    Svm(SvmParams),
    Lr(LrParams),
    Ab(AdaBoostParams),
}

impl ClassifierParams {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Knn => ClassifierParams::Knn(KnnParams::default()),
            ModelKind::Nb => ClassifierParams::Nb(NbParams::default()),
            ModelKind::Rf => ClassifierParams::Rf(ForestParams::default()),
            ModelKind::Dt => ClassifierParams::Dt(TreeParams::default()),
            ModelKind::Svm => ClassifierParams::Svm(SvmParams::default()),
            ModelKind::Lr => ClassifierParams::Lr(LrParams::default()),
            ModelKind::Ab => ClassifierParams::Ab(AdaBoostParams::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ClassifierParams::Knn(_) => ModelKind::Knn,
            ClassifierParams::Nb(_) => ModelKind::Nb,
            ClassifierParams::Rf(_) => ModelKind::Rf,
            ClassifierParams::Dt(_) => ModelKind::Dt,
            ClassifierParams::Svm(_) => ModelKind::Svm,
            ClassifierParams::Lr(_) => ModelKind::Lr,
            ClassifierParams::Ab(_) => ModelKind::Ab,
        }
    }

    /// Table label, e.g. `KNN(k=15)` or `NB`.
    pub fn display_label(&self) -> String {
        match self {
            ClassifierParams::Knn(p) => format!("KNN(k={})", p.k),
            other => other.kind().display_name().to_string(),
        }
    }
}

/// A classifier with its hyperparameters and seed, ready to fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub params: ClassifierParams,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(params: ClassifierParams, seed: u64) -> Self {
        ClassifierSpec { params, seed }
    }

    pub fn default_for(kind: ModelKind, seed: u64) -> Self {
        ClassifierSpec { params: ClassifierParams::default_for(kind), seed }
    }

    pub fn kind(&self) -> ModelKind {
        self.params.kind()
    }
}

/// Validated training matrix with labels mapped to class indices.
pub(crate) struct TrainSet<'a> {
    pub x: &'a [FeatureVector],
    pub y: Vec<usize>,
    pub n_classes: usize,
    pub dim: usize,
    pub kind: FeatureKind,
}

/// Per-feature z-scoring of dense inputs, fitted on the training matrix.
/// Linear models are invariant to it in what they can express but their
/// optimizers are not: mean-pooled word vectors share a large common
/// component that otherwise swamps the class signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    inv_std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[FeatureVector], dim: usize) -> Self {
        let n = x.len().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for v in x {
            v.axpy_into(1.0 / n, &mut mean);
        }
        let mut var = vec![0.0; dim];
        for v in x {
            for (j, xv) in v.to_dense().into_iter().enumerate() {
                var[j] += (xv - mean[j]).powi(2) / n;
            }
        }
        // Constant features are centred but not scaled.
        let inv_std = var.into_iter().map(|s| if s > 0.0 { 1.0 / s.sqrt() } else { 1.0 }).collect();
        Standardizer { mean, inv_std }
    }

    pub fn apply(&self, x: &FeatureVector) -> FeatureVector {
        let v: Vec<f64> =
            x.to_dense().iter().zip(self.mean.iter().zip(&self.inv_std)).map(|(v, (m, s))| (v - m) * s).collect();
        FeatureVector::Dense(DenseVector::new(v).expect("finite inputs stay finite"))
    }
}

/// Applies `s` when present, borrowing otherwise.
fn scaled<'a>(s: &Option<Standardizer>, x: &'a FeatureVector) -> std::borrow::Cow<'a, FeatureVector> {
    match s {
        Some(s) => std::borrow::Cow::Owned(s.apply(x)),
        None => std::borrow::Cow::Borrowed(x),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum Fitted {
    Knn(Knn),
    Nb(NaiveBayes),
    Rf(RandomForest),
    Dt(DecisionTree),
    Svm(LinearSvm),
    Lr(LogisticRegression),
    Ab(AdaBoost),
}

/// A fitted classifier over a fixed label set and feature space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    spec: ClassifierSpec,
    labels: Vec<CategoryLabel>,
    feature_kind: FeatureKind,
    dim: usize,
    fitted: Fitted,
    /// Fitted for LR and SVM on dense inputs.
    standardizer: Option<Standardizer>,
}

fn check_matrix(x: &[FeatureVector]) -> Result<(FeatureKind, usize)> {
    let first = x.first().ok_or_else(|| Error::InvalidInput("training set is empty".into()))?;
    let (kind, dim) = (first.kind(), first.dim());
    for v in x {
        if v.kind() != kind {
            return Err(Error::FeatureKindMismatch { expected: kind.name(), got: v.kind().name() });
        }
        if v.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.dim() });
        }
    }
    Ok((kind, dim))
}

impl TrainedModel {
    /// Fits on `x` with string labels `y`. The label set is the sorted set of
    /// distinct labels in `y` and must contain at least two classes.
    pub fn fit(spec: &ClassifierSpec, x: &[FeatureVector], y: &[CategoryLabel]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!("{} feature vectors but {} labels", x.len(), y.len())));
        }
        let (feature_kind, dim) = check_matrix(x)?;
        let mut labels: Vec<CategoryLabel> = y.to_vec();
        labels.sort();
        labels.dedup();
        if labels.len() < 2 {
            return Err(Error::InvalidInput("training labels contain a single class".into()));
        }
        let yi: Vec<usize> = y.iter().map(|l| labels.binary_search(l).expect("label collected above")).collect();
        let standardizer = (feature_kind == FeatureKind::Dense
            && matches!(spec.params, ClassifierParams::Lr(_) | ClassifierParams::Svm(_)))
        .then(|| Standardizer::fit(x, dim));
        let x_std: Option<Vec<FeatureVector>> = standardizer.as_ref().map(|s| x.iter().map(|v| s.apply(v)).collect());
        let x_fit = x_std.as_deref().unwrap_or(x);
        let data = TrainSet { x: x_fit, y: yi, n_classes: labels.len(), dim, kind: feature_kind };
        let fitted = match &spec.params {
            ClassifierParams::Knn(p) => {
                if p.k == 0 || p.k > x.len() {
                    return Err(Error::InvalidInput(format!(
                        "knn needs 1 <= k <= n_train, got k={} with n_train={}",
                        p.k,
                        x.len()
                    )));
                }
                Fitted::Knn(Knn::fit(&data, p))
            }
            ClassifierParams::Nb(p) => Fitted::Nb(NaiveBayes::fit(&data, p)?),
            ClassifierParams::Rf(p) => {
                if p.trees == 0 {
                    return Err(Error::Config("random forest needs at least one tree".into()));
                }
                Fitted::Rf(RandomForest::fit(&data, p, spec.seed))
            }
            ClassifierParams::Dt(p) => {
                let cols = tree::Columns::new(x, dim);
                let cfg = tree::GrowConfig {
                    max_depth: p.max_depth,
                    min_samples_split: p.min_samples_split,
                    max_features: None,
                };
                Fitted::Dt(DecisionTree::grow::<rand_chacha::ChaCha8Rng>(
                    &cols,
                    &data.y,
                    &vec![1.0; x.len()],
                    data.n_classes,
                    &cfg,
                    None,
                ))
            }
            ClassifierParams::Svm(p) => Fitted::Svm(LinearSvm::fit(&data, p, spec.seed)?),
            ClassifierParams::Lr(p) => Fitted::Lr(LogisticRegression::fit(&data, p)?),
            ClassifierParams::Ab(p) => Fitted::Ab(AdaBoost::fit(&data, p)),
        };
        Ok(TrainedModel { spec: spec.clone(), labels, feature_kind, dim, fitted, standardizer })
    }

    fn check_input(&self, x: &FeatureVector) -> Result<()> {
        if x.kind() != self.feature_kind {
            return Err(Error::FeatureKindMismatch { expected: self.feature_kind.name(), got: x.kind().name() });
        }
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.dim() });
        }
        Ok(())
    }

    /// Per-class scores, higher is more likely; argmax (first on ties) is the
    /// prediction. Probabilities for NB and LR, vote fractions for KNN, RF and
    /// AB, leaf class fractions for DT, margins for SVM.
    pub fn scores(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let x = &*scaled(&self.standardizer, x);
        Ok(match &self.fitted {
            Fitted::Knn(m) => m.votes(x),
            Fitted::Nb(m) => m.posterior(x),
            Fitted::Rf(m) => m.votes(x),
            Fitted::Dt(m) => m.leaf_distribution(x),
            Fitted::Svm(m) => m.decision_scores(x),
            Fitted::Lr(m) => m.probabilities(x),
            Fitted::Ab(m) => m.votes(x),
        })
    }

    pub fn predict_index(&self, x: &FeatureVector) -> Result<usize> {
        self.check_input(x)?;
        let x = &*scaled(&self.standardizer, x);
        Ok(match &self.fitted {
            Fitted::Knn(m) => m.predict_index(x),
            Fitted::Nb(m) => tree::argmax(&m.joint_log_likelihood(x)),
            Fitted::Rf(m) => m.predict_index(x),
            Fitted::Dt(m) => m.predict_index(x),
            Fitted::Svm(m) => m.predict_index(x),
            Fitted::Lr(m) => m.predict_index(x),
            Fitted::Ab(m) => m.predict_index(x),
        })
    }

    pub fn predict_one(&self, x: &FeatureVector) -> Result<CategoryLabel> {
        Ok(self.labels[self.predict_index(x)?].clone())
    }

    pub fn predict(&self, x: &[FeatureVector]) -> Result<Vec<CategoryLabel>> {
        x.iter().map(|v| self.predict_one(v)).collect()
    }

    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind()
    }

    pub fn labels(&self) -> &[CategoryLabel] {
        &self.labels
    }

    pub fn feature_kind(&self) -> FeatureKind {
        self.feature_kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Input scaling applied before the fitted model, if any.
    pub fn standardizer(&self) -> Option<&Standardizer> {
        self.standardizer.as_ref()
    }

    pub fn as_knn(&self) -> Option<&Knn> {
        match &self.fitted {
            Fitted::Knn(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_naive_bayes(&self) -> Option<&NaiveBayes> {
        match &self.fitted {
            Fitted::Nb(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_forest(&self) -> Option<&RandomForest> {
        match &self.fitted {
            Fitted::Rf(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_tree(&self) -> Option<&DecisionTree> {
        match &self.fitted {
            Fitted::Dt(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_svm(&self) -> Option<&LinearSvm> {
        match &self.fitted {
            Fitted::Svm(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_logistic(&self) -> Option<&LogisticRegression> {
        match &self.fitted {
            Fitted::Lr(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_adaboost(&self) -> Option<&AdaBoost> {
        match &self.fitted {
            Fitted::Ab(m) => Some(m),
            _ => None,
        }
    }

    /// Training diagnostics recorded next to each result row.
    pub fn metadata(&self) -> serde_json::Value {
        match &self.fitted {
            Fitted::Knn(m) => json!({ "k": m.k() }),
            Fitted::Nb(m) => json!({
                "variant": match m { NaiveBayes::Multinomial { .. } => "multinomial", NaiveBayes::Gaussian { .. } => "gaussian" }
            }),
            Fitted::Rf(m) => json!({ "trees": m.n_trees() }),
            Fitted::Dt(m) => json!({ "nodes": m.node_count(), "depth": m.depth() }),
            Fitted::Svm(_) => json!({}),
            Fitted::Lr(m) => json!({
                "iterations": m.iterations(),
                "final_loss": m.losses().last().copied().unwrap_or(f64::NAN),
            }),
            Fitted::Ab(m) => json!({ "rounds": m.rounds(), "degenerate": m.degenerate() }),
        }
    }
}

#[cfg(test)]
mod tests;
