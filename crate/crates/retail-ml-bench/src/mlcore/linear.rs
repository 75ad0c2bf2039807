//! Linear classifiers: multinomial logistic regression trained by full-batch
//! gradient descent, and a linear SVM trained by epoch-shuffled subgradient
//! descent (one-vs-rest above two classes).

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::Prng;

use super::{softmax_in_place, Classifier, DenseMatrix, Features, LabeledData, IterConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LinearKind {
    Logistic,
    Svm,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearModel {
    pub kind: LinearKind,
    /// One weight row per class; a single row for the binary SVM.
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
    pub training_loss_trace: Vec<f64>,
    n_classes: usize,
}

impl Classifier for LinearModel {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.weights.n_cols()
    }

    fn class_scores<F: Features>(&self, feats: &F, r: usize, out: &mut [f64]) {
        if self.kind == LinearKind::Svm && self.weights.n_rows() == 1 {
            // Binary machine: decision value against class 1, zero reference for class 0.
            let mut score = self.bias[0];
            for (col, value) in feats.row_entries(r) {
                score += self.weights.get(0, col) * value;
            }
            out[0] = 0.0;
            out[1] = score;
            return;
        }
        for (class, slot) in out.iter_mut().enumerate() {
            *slot = self.bias[class];
        }
        for (col, value) in feats.row_entries(r) {
            for (class, slot) in out.iter_mut().enumerate() {
                *slot += self.weights.get(class, col) * value;
            }
        }
    }
}

/// Softmax cross-entropy objective with L2 penalty on the weights (bias
/// excluded): mean CE + l2/2 * ||W||^2. Returns (loss, d/dW, d/db).
pub fn logistic_objective_grad<F: Features>(
    weights: &DenseMatrix,
    bias: &[f64],
    data: &LabeledData<F>,
    l2: f64,
) -> (f64, DenseMatrix, Vec<f64>) {
    let n = data.n_rows();
    let c = weights.n_rows();
    let mut loss = 0.0;
    let mut grad_w = DenseMatrix::zeros(c, weights.n_cols());
    let mut grad_b = vec![0.0; c];
    let mut probs = vec![0.0; c];

    for r in 0..n {
        for (class, p) in probs.iter_mut().enumerate() {
            *p = bias[class];
        }
        for (col, value) in data.features.row_entries(r) {
            for (class, p) in probs.iter_mut().enumerate() {
                *p += weights.get(class, col) * value;
            }
        }
        let label = data.labels[r];
        let lse = super::logsumexp(&probs);
        loss += lse - probs[label];
        softmax_in_place(&mut probs);
        for class in 0..c {
            let residual = probs[class] - if class == label { 1.0 } else { 0.0 };
            grad_b[class] += residual;
            let grad_row = grad_w.row_mut(class);
            for (col, value) in data.features.row_entries(r) {
                grad_row[col] += residual * value;
            }
        }
    }

    loss /= n as f64;
    for g in grad_w.data_mut() {
        *g /= n as f64;
    }
    for g in grad_b.iter_mut() {
        *g /= n as f64;
    }
    let mut penalty = 0.0;
    for (g, &w) in grad_w.data_mut().iter_mut().zip(weights.data()) {
        penalty += w * w;
        *g += l2 * w;
    }
    loss += 0.5 * l2 * penalty;
    (loss, grad_w, grad_b)
}

/// Multinomial logistic regression; the binary case runs through the same
/// softmax parameterization.
pub fn fit_logistic<F: Features>(data: &LabeledData<F>, cfg: &IterConfig) -> Result<LinearModel> {
    cfg.validate()?;
    if data.n_classes < 2 {
        return Err(Error::SingleClass);
    }
    let c = data.n_classes;
    let d = data.n_cols();
    let mut weights = DenseMatrix::zeros(c, d);
    let mut bias = vec![0.0; c];
    let mut trace = Vec::new();
    let mut prev = f64::INFINITY;

    for _ in 0..cfg.max_iter {
        let (loss, grad_w, grad_b) = logistic_objective_grad(&weights, &bias, data, cfg.l2);
        trace.push(loss);
        if (loss - prev).abs() < 1e-8 {
            break;
        }
        prev = loss;
        for (w, g) in weights.data_mut().iter_mut().zip(grad_w.data()) {
            *w -= cfg.learning_rate * g;
        }
        for (b, g) in bias.iter_mut().zip(&grad_b) {
            *b -= cfg.learning_rate * g;
        }
    }

    Ok(LinearModel {
        kind: LinearKind::Logistic,
        weights,
        bias,
        training_loss_trace: trace,
        n_classes: c,
    })
}

/// L2-regularized hinge objective for one binary machine over +-1 targets:
/// l2/2 * ||w||^2 + mean max(0, 1 - y (w.x + b)). Returns (loss, d/dw, d/db).
/// At margin exactly 1 the hinge subgradient 0 is used.
pub fn hinge_objective_grad<F: Features>(
    w: &[f64],
    b: f64,
    feats: &F,
    targets: &[f64],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = feats.n_rows();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; w.len()];
    let mut grad_b = 0.0;
    for r in 0..n {
        let y = targets[r];
        let mut score = b;
        for (col, value) in feats.row_entries(r) {
            score += w[col] * value;
        }
        let margin = y * score;
        if margin < 1.0 {
            loss += 1.0 - margin;
            for (col, value) in feats.row_entries(r) {
                grad_w[col] -= y * value;
            }
            grad_b -= y;
        }
    }
    loss /= n as f64;
    for g in grad_w.iter_mut() {
        *g /= n as f64;
    }
    grad_b /= n as f64;
    let mut norm2 = 0.0;
    for (g, &wi) in grad_w.iter_mut().zip(w) {
        norm2 += wi * wi;
        *g += l2 * wi;
    }
    loss += 0.5 * l2 * norm2;
    (loss, grad_w, grad_b)
}

fn train_binary_svm<F: Features>(
    feats: &F,
    targets: &[f64],
    cfg: &IterConfig,
    machine: usize,
) -> (Vec<f64>, f64, Vec<f64>) {
    let n = feats.n_rows();
    let d = feats.n_cols();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = Prng::seed_from_u64(
        cfg.seed ^ (machine as u64).wrapping_mul(0x9e3779b97f4a7c15),
    );
    let mut trace = Vec::with_capacity(cfg.max_iter);

    for epoch in 1..=cfg.max_iter {
        let step = cfg.learning_rate / (epoch as f64).sqrt();
        // Fisher-Yates shuffle from the per-machine stream.
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        for &r in &order {
            let y = targets[r];
            let mut score = b;
            for (col, value) in feats.row_entries(r) {
                score += w[col] * value;
            }
            let active = y * score < 1.0;
            for wi in w.iter_mut() {
                *wi *= 1.0 - step * cfg.l2;
            }
            if active {
                for (col, value) in feats.row_entries(r) {
                    w[col] += step * y * value;
                }
                b += step * y;
            }
        }
        let (loss, _, _) = hinge_objective_grad(&w, b, feats, targets, cfg.l2);
        trace.push(loss);
    }
    (w, b, trace)
}

/// Linear SVM: a single machine for two classes, one-vs-rest otherwise.
pub fn fit_linear_svm<F: Features>(data: &LabeledData<F>, cfg: &IterConfig) -> Result<LinearModel> {
    cfg.validate()?;
    if data.n_classes < 2 {
        return Err(Error::SingleClass);
    }
    let d = data.n_cols();

    if data.n_classes == 2 {
        let targets: Vec<f64> = data
            .labels
            .iter()
            .map(|&l| if l == 1 { 1.0 } else { -1.0 })
            .collect();
        let (w, b, trace) = train_binary_svm(&data.features, &targets, cfg, 0);
        return Ok(LinearModel {
            kind: LinearKind::Svm,
            weights: DenseMatrix::new(1, d, w),
            bias: vec![b],
            training_loss_trace: trace,
            n_classes: 2,
        });
    }

    let c = data.n_classes;
    let mut weights = DenseMatrix::zeros(c, d);
    let mut bias = vec![0.0; c];
    let mut summed_trace = vec![0.0; cfg.max_iter];
    for class in 0..c {
        let targets: Vec<f64> = data
            .labels
            .iter()
            .map(|&l| if l == class { 1.0 } else { -1.0 })
            .collect();
        let (w, b, trace) = train_binary_svm(&data.features, &targets, cfg, class);
        weights.row_mut(class).copy_from_slice(&w);
        bias[class] = b;
        for (sum, loss) in summed_trace.iter_mut().zip(&trace) {
            *sum += loss;
        }
    }
    Ok(LinearModel {
        kind: LinearKind::Svm,
        weights,
        bias,
        training_loss_trace: summed_trace,
        n_classes: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlcore::predict;

    fn cfg(max_iter: usize, lr: f64) -> IterConfig {
        IterConfig {
            max_iter,
            learning_rate: lr,
            seed: 3,
            ..IterConfig::default()
        }
    }

    #[test]
    fn logistic_separates_two_points() {
        let feats = DenseMatrix::from_rows(vec![vec![-1.0], vec![1.0]]);
        let data = LabeledData::new(feats, vec![0, 1]).unwrap();
        let model = fit_logistic(&data, &IterConfig { seed: 0, ..IterConfig::default() }).unwrap();
        let predictions = predict(&model, &data.features).unwrap();
        assert_eq!(predictions, vec![0, 1]);
        // Loss trace is recorded and bounded by max_iter.
        assert!(!model.training_loss_trace.is_empty());
        assert!(model.training_loss_trace.len() <= 100);
    }

    #[test]
    fn logistic_single_iteration_stays_finite() {
        let feats = DenseMatrix::from_rows(vec![vec![2.0, 1.0], vec![0.0, 3.0]]);
        let data = LabeledData::new(feats, vec![0, 1]).unwrap();
        let model = fit_logistic(&data, &cfg(1, 0.1)).unwrap();
        assert!(model.weights.data().iter().all(|w| w.is_finite()));
        let predictions = predict(&model, &data.features).unwrap();
        assert_eq!(predictions.len(), 2);
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = Prng::seed_from_u64(17);
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|_| (0..4).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let labels: Vec<usize> = (0..12).map(|i| i % 3).collect();
        let data = LabeledData::new(DenseMatrix::from_rows(rows), labels).unwrap();
        let l2 = 0.05;
        for trial in 0..10 {
            let mut weights = DenseMatrix::zeros(3, 4);
            for w in weights.data_mut() {
                *w = rng.gen::<f64>() - 0.5;
            }
            let bias: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() - 0.5).collect();
            let (_, grad_w, grad_b) = logistic_objective_grad(&weights, &bias, &data, l2);

            let h = 1e-5;
            for idx in [0usize, 5, 11] {
                let mut plus = weights.clone();
                plus.data_mut()[idx] += h;
                let mut minus = weights.clone();
                minus.data_mut()[idx] -= h;
                let (lp, _, _) = logistic_objective_grad(&plus, &bias, &data, l2);
                let (lm, _, _) = logistic_objective_grad(&minus, &bias, &data, l2);
                let numeric = (lp - lm) / (2.0 * h);
                let analytic = grad_w.data()[idx];
                let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-6);
                assert!(rel < 1e-4, "trial {trial} idx {idx}: {analytic} vs {numeric}");
            }
            let mut bias_plus = bias.clone();
            bias_plus[1] += h;
            let mut bias_minus = bias.clone();
            bias_minus[1] -= h;
            let (lp, _, _) = logistic_objective_grad(&weights, &bias_plus, &data, l2);
            let (lm, _, _) = logistic_objective_grad(&weights, &bias_minus, &data, l2);
            let numeric = (lp - lm) / (2.0 * h);
            let rel = (numeric - grad_b[1]).abs() / numeric.abs().max(grad_b[1].abs()).max(1e-6);
            assert!(rel < 1e-4);
        }
    }

    #[test]
    fn svm_drives_hinge_loss_down_on_separable_data() {
        // Margin >= 1 is achievable at w = 1, b = 0.
        let feats = DenseMatrix::from_rows(vec![vec![-2.0], vec![-3.0], vec![2.0], vec![3.0]]);
        let data = LabeledData::new(feats, vec![0, 0, 1, 1]).unwrap();
        let model = fit_linear_svm(&data, &cfg(300, 0.5)).unwrap();
        let final_loss = *model.training_loss_trace.last().unwrap();
        assert!(final_loss < 0.05, "final hinge objective {final_loss}");
        assert_eq!(predict(&model, &data.features).unwrap(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn binary_svm_matches_explicit_one_vs_rest() {
        use rand::{Rng, SeedableRng};
        let mut rng = Prng::seed_from_u64(23);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let labels: Vec<usize> = rows.iter().map(|r| usize::from(r[0] + r[1] > 0.0)).collect();
        if labels.iter().all(|&l| l == labels[0]) {
            return;
        }
        let data = LabeledData::new(DenseMatrix::from_rows(rows.clone()), labels.clone()).unwrap();
        let model = fit_linear_svm(&data, &cfg(50, 0.2)).unwrap();
        let predictions = predict(&model, &data.features).unwrap();

        // The negation of the single machine is the class-0 machine, so
        // argmax over (-score, score) reproduces the same labels.
        for r in 0..data.n_rows() {
            let mut scores = [0.0; 2];
            model.class_scores(&data.features, r, &mut scores);
            let s = scores[1];
            let one_vs_rest = crate::mlcore::argmax(&[-s, s]);
            assert_eq!(predictions[r], one_vs_rest);
            assert_eq!(predictions[r], usize::from(s > 0.0));
        }
    }

    #[test]
    fn svm_subgradient_matches_finite_differences_away_from_kinks() {
        use rand::{Rng, SeedableRng};
        let mut rng = Prng::seed_from_u64(41);
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let targets: Vec<f64> = (0..15).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let feats = DenseMatrix::from_rows(rows);
        let l2 = 0.1;

        let mut checked = 0;
        while checked < 10 {
            let w: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let b = rng.gen::<f64>() - 0.5;
            // Stay clear of hinge kinks so the objective is differentiable.
            let near_kink = (0..feats.n_rows()).any(|r| {
                let score: f64 = b + feats.row(r).iter().zip(&w).map(|(x, wi)| x * wi).sum::<f64>();
                (targets[r] * score - 1.0).abs() < 1e-3
            });
            if near_kink {
                continue;
            }
            checked += 1;
            let (_, grad_w, grad_b) = hinge_objective_grad(&w, b, &feats, &targets, l2);
            let h = 1e-5;
            for idx in 0..3 {
                let mut wp = w.clone();
                wp[idx] += h;
                let mut wm = w.clone();
                wm[idx] -= h;
                let (lp, _, _) = hinge_objective_grad(&wp, b, &feats, &targets, l2);
                let (lm, _, _) = hinge_objective_grad(&wm, b, &feats, &targets, l2);
                let numeric = (lp - lm) / (2.0 * h);
                let rel =
                    (numeric - grad_w[idx]).abs() / numeric.abs().max(grad_w[idx].abs()).max(1e-6);
                assert!(rel < 1e-3, "idx {idx}: {} vs {numeric}", grad_w[idx]);
            }
            let (lp, _, _) = hinge_objective_grad(&w, b + h, &feats, &targets, l2);
            let (lm, _, _) = hinge_objective_grad(&w, b - h, &feats, &targets, l2);
            let numeric = (lp - lm) / (2.0 * h);
            let rel = (numeric - grad_b).abs() / numeric.abs().max(grad_b.abs()).max(1e-6);
            assert!(rel < 1e-3, "bias: analytic {grad_b} vs numeric {numeric}");
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let feats = DenseMatrix::from_rows(vec![vec![1.0], vec![2.0]]);
        let data = LabeledData::new(feats, vec![0, 0]).unwrap();
        assert!(matches!(fit_logistic(&data, &cfg(5, 0.1)), Err(Error::SingleClass)));
        assert!(matches!(fit_linear_svm(&data, &cfg(5, 0.1)), Err(Error::SingleClass)));
    }

    #[test]
    fn zero_weight_model_with_bias_predicts_by_bias() {
        let model = LinearModel {
            kind: LinearKind::Logistic,
            weights: DenseMatrix::zeros(2, 3),
            bias: vec![0.1, 0.9],
            training_loss_trace: vec![],
            n_classes: 2,
        };
        let feats = DenseMatrix::from_rows(vec![vec![5.0, -2.0, 1.0], vec![0.0, 0.0, 0.0]]);
        assert_eq!(predict(&model, &feats).unwrap(), vec![1, 1]);
    }
}
