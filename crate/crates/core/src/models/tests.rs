use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::vectorize::{DenseVector, SparseVector};

fn labels(y: &[usize]) -> Vec<CategoryLabel> {
    y.iter().map(|i| CategoryLabel::new(format!("c{i}"))).collect()
}

fn dense(rows: &[Vec<f64>]) -> Vec<FeatureVector> {
    rows.iter().map(|r| FeatureVector::Dense(DenseVector::new(r.clone()).unwrap())).collect()
}

/// Three Gaussian-ish blobs in 2-D, well separated.
fn blobs(n_per: usize, seed: u64) -> (Vec<FeatureVector>, Vec<CategoryLabel>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [(0.0, 0.0), (5.0, 5.0), (-5.0, 5.0)];
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (c, (cx, cy)) in centers.iter().enumerate() {
        for _ in 0..n_per {
            rows.push(vec![cx + rng.gen_range(-1.0..1.0), cy + rng.gen_range(-1.0..1.0)]);
            y.push(c);
        }
    }
    (dense(&rows), labels(&y))
}

/// Sparse count-like blobs: class c fires features 3c..3c+3.
fn sparse_blobs(n_per: usize, seed: u64) -> (Vec<FeatureVector>, Vec<CategoryLabel>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for c in 0..3 {
        for _ in 0..n_per {
            let mut pairs = vec![(3 * c + rng.gen_range(0..3), 1.0), (3 * c + rng.gen_range(0..3), 1.0)];
            pairs.push((9 + rng.gen_range(0..3), 1.0));
            x.push(FeatureVector::Sparse(SparseVector::from_pairs(12, pairs).unwrap()));
            y.push(c);
        }
    }
    (x, labels(&y))
}

#[test]
fn every_model_separates_blobs() {
    let (x, y) = blobs(30, 3);
    let (xs, ys) = sparse_blobs(30, 4);
    for kind in ModelKind::TABLE_ORDER {
        let spec = ClassifierSpec::default_for(kind, 7);
        for (xx, yy) in [(&x, &y), (&xs, &ys)] {
            let m = TrainedModel::fit(&spec, xx, yy).unwrap();
            let pred = m.predict(xx).unwrap();
            let acc = pred.iter().zip(yy.iter()).filter(|(a, b)| a == b).count() as f64 / yy.len() as f64;
            assert!(acc >= 0.9, "{kind} training accuracy {acc}");
            let s = m.scores(&xx[0]).unwrap();
            assert_eq!(s.len(), 3);
            assert_eq!(crate::models::tree::argmax(&s), m.predict_index(&xx[0]).unwrap(), "{kind}");
        }
    }
}

#[test]
fn fit_rejects_bad_inputs() {
    let (x, y) = blobs(5, 1);
    let spec = ClassifierSpec::default_for(ModelKind::Lr, 0);
    let one = vec![y[0].clone(); y.len()];
    assert!(TrainedModel::fit(&spec, &x, &one).is_err());
    assert!(TrainedModel::fit(&spec, &x[..3], &y).is_err());
    let mut mixed = x.clone();
    mixed[1] = FeatureVector::Sparse(SparseVector::zeros(2));
    assert!(matches!(TrainedModel::fit(&spec, &mixed, &y), Err(Error::FeatureKindMismatch { .. })));
    let m = TrainedModel::fit(&spec, &x, &y).unwrap();
    assert!(matches!(m.predict_one(&dense(&[vec![1.0]])[0]), Err(Error::DimensionMismatch { .. })));
    // k larger than the training set.
    let knn = ClassifierSpec::default_for(ModelKind::Knn, 0);
    assert!(TrainedModel::fit(&knn, &x[..12], &y[..12]).is_err());
}

#[test]
fn multinomial_nb_rejects_negative_counts() {
    let x = vec![
        FeatureVector::Sparse(SparseVector::from_pairs(2, vec![(0, -1.0)]).unwrap()),
        FeatureVector::Sparse(SparseVector::from_pairs(2, vec![(1, 1.0)]).unwrap()),
    ];
    let spec = ClassifierSpec::default_for(ModelKind::Nb, 0);
    assert!(TrainedModel::fit(&spec, &x, &labels(&[0, 1])).is_err());
}

#[test]
fn knn_tie_breaks() {
    // Two points per class at equal distance from the query: vote tie goes to c0.
    let x = dense(&[vec![1.0], vec![-1.0], vec![2.0], vec![-2.0]]);
    let y = labels(&[1, 0, 1, 0]);
    let spec = ClassifierSpec::new(ClassifierParams::Knn(KnnParams { k: 2 }), 0);
    let m = TrainedModel::fit(&spec, &x, &y).unwrap();
    assert_eq!(m.predict_one(&dense(&[vec![0.0]])[0]).unwrap().as_str(), "c0");
    // Distance ties by training index: neighbours of 0 with k=2 are rows 0 and 1.
    assert_eq!(m.as_knn().unwrap().neighbours(&dense(&[vec![0.0]])[0]), vec![0, 1]);
}

#[test]
fn lr_gradient_matches_finite_differences() {
    let (x, y) = blobs(4, 9);
    let yi: Vec<usize> = y.iter().map(|l| l.as_str()[1..].parse().unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let flat: Vec<f64> = (0..3 * 2 + 3).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let p = LrWeights::from_flat(3, 2, &flat);
    let (_, g) = lr_loss_and_grad(&p, &x, &yi, 0.1);
    let g = g.to_flat();
    let h = 1e-6;
    for i in 0..flat.len() {
        let mut plus = flat.clone();
        plus[i] += h;
        let mut minus = flat.clone();
        minus[i] -= h;
        let fp = lr_loss_and_grad(&LrWeights::from_flat(3, 2, &plus), &x, &yi, 0.1).0;
        let fm = lr_loss_and_grad(&LrWeights::from_flat(3, 2, &minus), &x, &yi, 0.1).0;
        let num = (fp - fm) / (2.0 * h);
        assert!((num - g[i]).abs() <= 1e-6 * num.abs().max(g[i].abs()).max(1e-3), "{i}: {num} vs {}", g[i]);
    }
}

#[test]
fn lr_loss_is_monotone() {
    let (x, y) = blobs(10, 5);
    let m = TrainedModel::fit(&ClassifierSpec::default_for(ModelKind::Lr, 0), &x, &y).unwrap();
    let losses = m.as_logistic().unwrap().losses();
    assert!(losses.windows(2).all(|w| w[1] <= w[0]));
    assert!(losses.last().unwrap() < &0.1);
}

#[test]
fn svm_finds_separating_planes() {
    // Linearly separable two-class data: no hinge violations at the end is too
    // strong for a stochastic method, but the margin sign must be right.
    let x = dense(&[vec![2.0, 2.0], vec![3.0, 1.0], vec![-2.0, -1.0], vec![-3.0, -2.0]]);
    let y = labels(&[0, 0, 1, 1]);
    let spec = ClassifierSpec::new(ClassifierParams::Svm(SvmParams { lambda: 1e-2, epochs: 200 }), 1);
    let m = TrainedModel::fit(&spec, &x, &y).unwrap();
    let planes = m.as_svm().unwrap().planes();
    let ybin = [1.0, 1.0, -1.0, -1.0];
    for (xi, yi) in x.iter().zip(ybin) {
        assert!(yi * planes[0].decision(xi) > 0.0);
    }
    // The subgradient at the solution is small relative to one at zero.
    let g = svm_subgradient(&planes[0], &x, &ybin, 1e-2);
    let g0 = svm_subgradient(&Hyperplane { w: vec![0.0; 2], b: 0.0 }, &x, &ybin, 1e-2);
    let norm = |h: &Hyperplane| (crate::vectorize::dot(&h.w, &h.w) + h.b * h.b).sqrt();
    assert!(norm(&g) < norm(&g0));
    assert!(
        svm_objective(&planes[0], &x, &ybin, 1e-2)
            < svm_objective(&Hyperplane { w: vec![0.0; 2], b: 0.0 }, &x, &ybin, 1e-2)
    );
}

#[test]
fn adaboost_trace_respects_chance_bound() {
    let (x, y) = blobs(20, 11);
    let m = TrainedModel::fit(&ClassifierSpec::default_for(ModelKind::Ab, 0), &x, &y).unwrap();
    let ab = m.as_adaboost().unwrap();
    assert!(ab.rounds() >= 1);
    for &e in &ab.trace().errors {
        assert!(e < 1.0 - 1.0 / 3.0);
    }
    for &s in &ab.trace().weight_sums {
        assert!((s - 1.0).abs() < 1e-12);
    }
}

#[test]
fn forest_is_seed_deterministic() {
    let (x, y) = sparse_blobs(15, 2);
    let spec = ClassifierSpec::new(ClassifierParams::Rf(ForestParams { trees: 10, ..Default::default() }), 5);
    let a = TrainedModel::fit(&spec, &x, &y).unwrap();
    let b = TrainedModel::fit(&spec, &x, &y).unwrap();
    assert_eq!(a, b);
}

#[test]
fn display_labels_and_orders() {
    assert_eq!(ClassifierParams::default_for(ModelKind::Knn).display_label(), "KNN(k=15)");
    assert_eq!(ClassifierParams::default_for(ModelKind::Ab).display_label(), "AB");
    assert_eq!(ModelKind::Nb.preference_rank(), 0);
    assert_eq!("SVM".parse::<ModelKind>().unwrap(), ModelKind::Svm);
}
