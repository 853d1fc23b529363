//! Confusion matrices and precision / recall / F-score / accuracy.
//!
//! Undefined ratios (0/0) are taken as 0 and flagged in the per-class record.

use serde::{Deserialize, Serialize};

use crate::corpus::CategoryLabel;
use crate::error::{Error, Result};

/// Counts with rows = true class, columns = predicted class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    labels: Vec<CategoryLabel>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    /// From raw counts; `counts` must be square with one row per label.
    pub fn from_counts(labels: Vec<CategoryLabel>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let l = labels.len();
        if l == 0 || counts.len() != l || counts.iter().any(|r| r.len() != l) {
            return Err(Error::InvalidInput(format!("confusion counts must be {l}x{l}")));
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    pub fn labels(&self) -> &[CategoryLabel] {
        &self.labels
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    /// True count of class `c` (row sum).
    pub fn support(&self, c: usize) -> u64 {
        self.counts[c].iter().sum()
    }

    /// Predicted count of class `c` (column sum).
    pub fn predicted(&self, c: usize) -> u64 {
        self.counts.iter().map(|r| r[c]).sum()
    }
}

/// Builds the confusion matrix over `labels`; any label outside the set errors.
pub fn confusion(
    labels: &[CategoryLabel],
    y_true: &[CategoryLabel],
    y_pred: &[CategoryLabel],
) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::InvalidInput(format!("{} true labels but {} predictions", y_true.len(), y_pred.len())));
    }
    let index = |l: &CategoryLabel| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| Error::InvalidInput(format!("label '{l}' is not in the label set")))
    };
    let n = labels.len();
    let mut counts = vec![vec![0u64; n]; n];
    for (t, p) in y_true.iter().zip(y_pred) {
        counts[index(t)?][index(p)?] += 1;
    }
    ConfusionMatrix::from_counts(labels.to_vec(), counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Unweighted mean over classes.
    Macro,
    /// Mean weighted by class support.
    Weighted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: CategoryLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// No predictions of this class, so precision was 0/0.
    pub precision_undefined: bool,
    /// No true instances of this class, so recall was 0/0.
    pub recall_undefined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub averaging: Averaging,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Vec<ClassMetrics>,
}

fn ratio(num: f64, den: f64) -> (f64, bool) {
    if den == 0.0 {
        (0.0, true)
    } else {
        (num / den, false)
    }
}

/// Per-class metrics, one entry per label.
pub fn per_class(cm: &ConfusionMatrix) -> Vec<ClassMetrics> {
    (0..cm.labels.len())
        .map(|c| {
            let tp = cm.get(c, c) as f64;
            let (precision, precision_undefined) = ratio(tp, cm.predicted(c) as f64);
            let (recall, recall_undefined) = ratio(tp, cm.support(c) as f64);
            let f1 = ratio(2.0 * precision * recall, precision + recall).0;
            ClassMetrics {
                label: cm.labels[c].clone(),
                precision,
                recall,
                f1,
                support: cm.support(c),
                precision_undefined,
                recall_undefined,
            }
        })
        .collect()
}

pub fn accuracy(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.correct() as f64, cm.total() as f64).0
}

/// Averaged metrics. The F-score is the average of per-class F1 values (not
/// the F1 of averaged precision and recall).
pub fn metrics(cm: &ConfusionMatrix, averaging: Averaging) -> EvalReport {
    let per = per_class(cm);
    let weights: Vec<f64> = match averaging {
        Averaging::Macro => vec![1.0 / per.len() as f64; per.len()],
        Averaging::Weighted => {
            let total = cm.total() as f64;
            per.iter().map(|m| if total > 0.0 { m.support as f64 / total } else { 0.0 }).collect()
        }
    };
    let avg = |f: fn(&ClassMetrics) -> f64| per.iter().zip(&weights).map(|(m, w)| w * f(m)).sum::<f64>();
    EvalReport {
        averaging,
        accuracy: accuracy(cm),
        precision: avg(|m| m.precision),
        recall: avg(|m| m.recall),
        f1: avg(|m| m.f1),
        per_class: per,
    }
}

/// Confusion matrix plus macro and weighted reports.
pub fn evaluate(
    labels: &[CategoryLabel],
    y_true: &[CategoryLabel],
    y_pred: &[CategoryLabel],
) -> Result<(ConfusionMatrix, EvalReport, EvalReport)> {
    let cm = confusion(labels, y_true, y_pred)?;
    let macro_ = metrics(&cm, Averaging::Macro);
    let weighted = metrics(&cm, Averaging::Weighted);
    Ok((cm, macro_, weighted))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(v: &[&str]) -> Vec<CategoryLabel> {
        v.iter().map(|s| CategoryLabel::new(*s)).collect()
    }

    #[test]
    fn two_class_example() {
        // truth a a a b b, predicted a a b b a
        let labels = ls(&["a", "b"]);
        let (cm, m, w) = evaluate(&labels, &ls(&["a", "a", "a", "b", "b"]), &ls(&["a", "a", "b", "b", "a"])).unwrap();
        assert_eq!(cm.counts(), &[vec![2, 1], vec![1, 1]]);
        assert!((m.accuracy - 0.6).abs() < 1e-15);
        // a: p=2/3 r=2/3; b: p=1/2 r=1/2
        assert!((m.precision - (2.0 / 3.0 + 0.5) / 2.0).abs() < 1e-15);
        assert!((m.f1 - (2.0 / 3.0 + 0.5) / 2.0).abs() < 1e-15);
        assert!((w.recall - 0.6).abs() < 1e-15);
    }

    #[test]
    fn undefined_ratios_are_zero_and_flagged() {
        let labels = ls(&["a", "b", "c"]);
        let (_, m, _) = evaluate(&labels, &ls(&["a", "b"]), &ls(&["a", "a"])).unwrap();
        let b = &m.per_class[1];
        assert!(b.precision_undefined && !b.recall_undefined);
        assert_eq!((b.precision, b.recall, b.f1), (0.0, 0.0, 0.0));
        let c = &m.per_class[2];
        assert!(c.precision_undefined && c.recall_undefined);
    }

    #[test]
    fn unknown_label_errors() {
        let labels = ls(&["a"]);
        assert!(confusion(&labels, &ls(&["a"]), &ls(&["z"])).is_err());
        assert!(confusion(&labels, &ls(&["a"]), &ls(&[])).is_err());
    }
}
