//! Multilayer perceptron: sigmoid hidden layers, softmax output,
//! cross-entropy loss, full-batch gradient descent.

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::Prng;

use super::{softmax_in_place, Classifier, DenseMatrix, Features, LabeledData, IterConfig};

#[derive(Debug, Clone, Serialize)]
pub struct MlpModel {
    /// [input, hidden..., output] layer widths.
    pub layer_sizes: Vec<usize>,
    /// Per layer: an out x in weight matrix.
    pub weights: Vec<DenseMatrix>,
    pub biases: Vec<Vec<f64>>,
    pub training_loss_trace: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Forward pass for a single row; returns the activations of every layer
/// (input excluded), with softmax applied to the last.
fn forward<F: Features>(
    weights: &[DenseMatrix],
    biases: &[Vec<f64>],
    feats: &F,
    r: usize,
) -> Vec<Vec<f64>> {
    let n_layers = weights.len();
    let mut activations: Vec<Vec<f64>> = Vec::with_capacity(n_layers);

    let first = &weights[0];
    let mut z = biases[0].clone();
    for (col, value) in feats.row_entries(r) {
        for (out, zi) in z.iter_mut().enumerate() {
            *zi += first.get(out, col) * value;
        }
    }
    apply_activation(&mut z, n_layers == 1);
    activations.push(z);

    for layer in 1..n_layers {
        let w = &weights[layer];
        let input = &activations[layer - 1];
        let mut z = biases[layer].clone();
        for (out, zi) in z.iter_mut().enumerate() {
            let row = w.row(out);
            for (x, wi) in input.iter().zip(row) {
                *zi += x * wi;
            }
        }
        apply_activation(&mut z, layer == n_layers - 1);
        activations.push(z);
    }
    activations
}

fn apply_activation(z: &mut [f64], is_output: bool) {
    if is_output {
        softmax_in_place(z);
    } else {
        for v in z.iter_mut() {
            *v = sigmoid(*v);
        }
    }
}

/// Mean cross-entropy of the network on `data`.
pub fn mlp_loss<F: Features>(
    weights: &[DenseMatrix],
    biases: &[Vec<f64>],
    data: &LabeledData<F>,
) -> f64 {
    let n = data.n_rows();
    let mut loss = 0.0;
    for r in 0..n {
        let activations = forward(weights, biases, &data.features, r);
        let probs = activations.last().unwrap();
        loss -= probs[data.labels[r]].max(1e-300).ln();
    }
    loss / n as f64
}

/// Mean cross-entropy and its full-batch gradients via backpropagation.
pub fn mlp_loss_grad<F: Features>(
    weights: &[DenseMatrix],
    biases: &[Vec<f64>],
    data: &LabeledData<F>,
) -> (f64, Vec<DenseMatrix>, Vec<Vec<f64>>) {
    let n = data.n_rows();
    let n_layers = weights.len();
    let mut loss = 0.0;
    let mut grad_w: Vec<DenseMatrix> = weights
        .iter()
        .map(|w| DenseMatrix::zeros(w.n_rows(), w.n_cols()))
        .collect();
    let mut grad_b: Vec<Vec<f64>> = biases.iter().map(|b| vec![0.0; b.len()]).collect();

    for r in 0..n {
        let activations = forward(weights, biases, &data.features, r);
        let probs = activations.last().unwrap();
        loss -= probs[data.labels[r]].max(1e-300).ln();

        // Output delta: softmax + cross-entropy gives probs - onehot.
        let mut delta: Vec<f64> = probs.clone();
        delta[data.labels[r]] -= 1.0;

        for layer in (0..n_layers).rev() {
            for (out, &d) in delta.iter().enumerate() {
                grad_b[layer][out] += d;
            }
            if layer == 0 {
                let gw = &mut grad_w[0];
                for (col, value) in data.features.row_entries(r) {
                    for (out, &d) in delta.iter().enumerate() {
                        let slot = gw.row_mut(out);
                        slot[col] += d * value;
                    }
                }
            } else {
                let input = &activations[layer - 1];
                let gw = &mut grad_w[layer];
                for (out, &d) in delta.iter().enumerate() {
                    let slot = gw.row_mut(out);
                    for (col, &x) in input.iter().enumerate() {
                        slot[col] += d * x;
                    }
                }
                // Propagate through the sigmoid of the previous layer.
                let w = &weights[layer];
                let mut next_delta = vec![0.0; input.len()];
                for (j, nd) in next_delta.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (out, &d) in delta.iter().enumerate() {
                        acc += w.get(out, j) * d;
                    }
                    *nd = acc * input[j] * (1.0 - input[j]);
                }
                delta = next_delta;
            }
        }
    }

    let scale = 1.0 / n as f64;
    loss *= scale;
    for gw in &mut grad_w {
        for g in gw.data_mut() {
            *g *= scale;
        }
    }
    for gb in &mut grad_b {
        for g in gb.iter_mut() {
            *g *= scale;
        }
    }
    (loss, grad_w, grad_b)
}

/// Xavier-uniform initialization seeded by `seed`.
fn init_layers(layer_sizes: &[usize], seed: u64) -> (Vec<DenseMatrix>, Vec<Vec<f64>>) {
    let mut rng = Prng::seed_from_u64(seed);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for pair in layer_sizes.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let mut w = DenseMatrix::zeros(fan_out, fan_in);
        for v in w.data_mut() {
            *v = rng.gen_range(-limit..limit);
        }
        weights.push(w);
        biases.push(vec![0.0; fan_out]);
    }
    (weights, biases)
}

pub fn fit_mlp<F: Features>(
    data: &LabeledData<F>,
    hidden: &[usize],
    cfg: &IterConfig,
) -> Result<MlpModel> {
    cfg.validate()?;
    if data.n_classes < 2 {
        return Err(Error::SingleClass);
    }
    if hidden.is_empty() || hidden.contains(&0) {
        return Err(Error::InvalidConfig(
            "hidden layer sizes must be nonempty and positive".into(),
        ));
    }
    let mut layer_sizes = vec![data.n_cols()];
    layer_sizes.extend_from_slice(hidden);
    layer_sizes.push(data.n_classes);

    let (mut weights, mut biases) = init_layers(&layer_sizes, cfg.seed);
    let mut trace = Vec::with_capacity(cfg.max_iter);
    for _ in 0..cfg.max_iter {
        let (loss, grad_w, grad_b) = mlp_loss_grad(&weights, &biases, data);
        trace.push(loss);
        for (w, gw) in weights.iter_mut().zip(&grad_w) {
            for (wi, g) in w.data_mut().iter_mut().zip(gw.data()) {
                *wi -= cfg.learning_rate * g;
            }
        }
        for (b, gb) in biases.iter_mut().zip(&grad_b) {
            for (bi, g) in b.iter_mut().zip(gb) {
                *bi -= cfg.learning_rate * g;
            }
        }
    }

    Ok(MlpModel {
        layer_sizes,
        weights,
        biases,
        training_loss_trace: trace,
    })
}

impl Classifier for MlpModel {
    fn n_classes(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    fn n_features(&self) -> usize {
        self.layer_sizes[0]
    }

    fn class_scores<F: Features>(&self, feats: &F, r: usize, out: &mut [f64]) {
        let activations = forward(&self.weights, &self.biases, feats, r);
        out.copy_from_slice(activations.last().unwrap());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlcore::predict;

    #[test]
    fn xor_is_learned_with_one_hidden_layer() {
        let feats = DenseMatrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ]);
        let labels = vec![0, 1, 1, 0];
        let data = LabeledData::new(feats, labels.clone()).unwrap();
        let cfg = IterConfig {
            max_iter: 2000,
            learning_rate: 0.5,
            seed: 1,
            ..IterConfig::default()
        };
        let model = fit_mlp(&data, &[8], &cfg).unwrap();
        assert_eq!(predict(&model, &data.features).unwrap(), labels);
        let first = model.training_loss_trace[0];
        let last = *model.training_loss_trace.last().unwrap();
        assert!(last < first);
    }

    #[test]
    fn zero_weights_give_uniform_softmax() {
        let model = MlpModel {
            layer_sizes: vec![2, 3, 4],
            weights: vec![DenseMatrix::zeros(3, 2), DenseMatrix::zeros(4, 3)],
            biases: vec![vec![0.0; 3], vec![0.0; 4]],
            training_loss_trace: vec![],
        };
        let feats = DenseMatrix::from_rows(vec![vec![0.7, -1.2]]);
        let mut out = [0.0; 4];
        model.class_scores(&feats, 0, &mut out);
        for p in out {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = Prng::seed_from_u64(61);
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let labels: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let data = LabeledData::new(DenseMatrix::from_rows(rows), labels).unwrap();

        for seed in 0..3u64 {
            let (weights, mut biases) = super::init_layers(&[3, 5, 2], seed);
            for b in biases.iter_mut().flatten() {
                *b = rng.gen::<f64>() * 0.2 - 0.1;
            }
            let (_, grad_w, grad_b) = mlp_loss_grad(&weights, &biases, &data);
            let h = 1e-5;

            for (layer, idx) in [(0usize, 3usize), (0, 7), (1, 2), (1, 9)] {
                let mut wp = weights.clone();
                wp[layer].data_mut()[idx] += h;
                let lp = mlp_loss(&wp, &biases, &data);
                let mut wm = weights.clone();
                wm[layer].data_mut()[idx] -= h;
                let lm = mlp_loss(&wm, &biases, &data);
                let numeric = (lp - lm) / (2.0 * h);
                let analytic = grad_w[layer].data()[idx];
                let rel =
                    (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-6);
                assert!(rel < 1e-4, "layer {layer} idx {idx}: {analytic} vs {numeric}");
            }
            for (layer, idx) in [(0usize, 1usize), (1, 0)] {
                let mut bp = biases.clone();
                bp[layer][idx] += h;
                let lp = mlp_loss(&weights, &bp, &data);
                let mut bm = biases.clone();
                bm[layer][idx] -= h;
                let lm = mlp_loss(&weights, &bm, &data);
                let numeric = (lp - lm) / (2.0 * h);
                let analytic = grad_b[layer][idx];
                let rel =
                    (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-6);
                assert!(rel < 1e-4);
            }
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let data = LabeledData::new(DenseMatrix::from_rows(vec![vec![1.0]]), vec![0]).unwrap();
        assert!(matches!(
            fit_mlp(&data, &[4], &IterConfig::default()),
            Err(Error::SingleClass)
        ));
    }
}
