//! Native classification and clustering algorithms with fit/predict contracts.

mod gmm;
mod kmeans;
mod linear;
pub mod metrics;
mod mlp;
mod naive_bayes;
mod tree;

pub use gmm::{fit_gmm, gmm_responsibilities, GmmModel};
pub use kmeans::{fit_kmeans, kmeans_assign, KMeansModel};
pub use linear::{
    fit_linear_svm, fit_logistic, hinge_objective_grad, logistic_objective_grad, LinearKind,
    LinearModel,
};
pub use metrics::{adjusted_rand_index, classification_metrics, ClassificationMetrics};
pub use mlp::{fit_mlp, mlp_loss, mlp_loss_grad, MlpModel};
pub use naive_bayes::{fit_naive_bayes, NaiveBayesModel};
pub use tree::{fit_decision_tree, DecisionTreeModel};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::textkit::SparseMatrix;

/// Row-major dense matrix of finite floats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n_rows * n_cols, "shape/data length mismatch");
        debug_assert!(data.iter().all(|v| v.is_finite()), "values must be finite");
        DenseMatrix {
            n_rows,
            n_cols,
            data,
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            assert_eq!(row.len(), n_cols, "ragged rows");
            data.extend(row);
        }
        DenseMatrix::new(n_rows, n_cols, data)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n_cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.n_cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Iterator over the entries of one feature row.
pub enum RowEntries<'a> {
    Dense(std::iter::Enumerate<std::slice::Iter<'a, f64>>),
    Sparse(std::slice::Iter<'a, (usize, f64)>),
}

impl Iterator for RowEntries<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            RowEntries::Dense(it) => it.next().map(|(c, &v)| (c, v)),
            RowEntries::Sparse(it) => it.next().copied(),
        }
    }
}

/// Read access shared by dense and sparse feature containers.
pub trait Features {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    /// (column, value) pairs of a row with strictly increasing columns.
    /// Dense rows include zeros; sparse rows omit them.
    fn row_entries(&self, r: usize) -> RowEntries<'_>;
    fn value(&self, r: usize, c: usize) -> f64;
}

impl Features for DenseMatrix {
    fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn n_cols(&self) -> usize {
        self.n_cols
    }

    fn row_entries(&self, r: usize) -> RowEntries<'_> {
        RowEntries::Dense(self.row(r).iter().enumerate())
    }

    fn value(&self, r: usize, c: usize) -> f64 {
        self.get(r, c)
    }
}

impl Features for SparseMatrix {
    fn n_rows(&self) -> usize {
        self.n_rows()
    }

    fn n_cols(&self) -> usize {
        self.n_cols()
    }

    fn row_entries(&self, r: usize) -> RowEntries<'_> {
        RowEntries::Sparse(self.row(r).iter())
    }

    fn value(&self, r: usize, c: usize) -> f64 {
        self.value(r, c)
    }
}

/// Features plus integer class labels.
#[derive(Debug)]
pub struct LabeledData<F: Features> {
    pub features: F,
    pub labels: Vec<usize>,
    pub n_classes: usize,
}

impl<F: Features> LabeledData<F> {
    /// Validates shape and density of the label set: every class in
    /// [0, max_label] must occur at least once.
    pub fn new(features: F, labels: Vec<usize>) -> Result<Self> {
        if features.n_rows() == 0 {
            return Err(Error::EmptyInput("training data"));
        }
        if labels.len() != features.n_rows() {
            return Err(Error::DimensionMismatch {
                expected: features.n_rows(),
                actual: labels.len(),
            });
        }
        let n_classes = labels.iter().max().copied().unwrap_or(0) + 1;
        let mut seen = vec![false; n_classes];
        for &label in &labels {
            seen[label] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::ClassAbsentFromTraining);
        }
        Ok(LabeledData {
            features,
            labels,
            n_classes,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.features.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.features.n_cols()
    }
}

/// Hyperparameters for iterative fits.
#[derive(Debug, Clone, Serialize)]
pub struct IterConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for IterConfig {
    fn default() -> Self {
        IterConfig {
            max_iter: 100,
            tol: 1e-4,
            learning_rate: 0.1,
            l2: 1e-4,
            seed: 0,
        }
    }
}

impl IterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be > 0".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.l2 < 0.0 {
            return Err(Error::InvalidConfig("l2 must be >= 0".into()));
        }
        Ok(())
    }
}

/// Anything that scores feature rows per class; prediction is the argmax.
pub trait Classifier {
    fn n_classes(&self) -> usize;
    fn n_features(&self) -> usize;
    /// Writes one score per class for row `r` of `feats` into `out`.
    fn class_scores<F: Features>(&self, feats: &F, r: usize, out: &mut [f64]);
}

/// Argmax with ties resolved to the lowest class id.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Predicted class per row of `feats`.
pub fn predict<C: Classifier, F: Features>(model: &C, feats: &F) -> Result<Vec<usize>> {
    if feats.n_cols() != model.n_features() {
        return Err(Error::DimensionMismatch {
            expected: model.n_features(),
            actual: feats.n_cols(),
        });
    }
    let mut scores = vec![0.0; model.n_classes()];
    let mut out = Vec::with_capacity(feats.n_rows());
    for r in 0..feats.n_rows() {
        model.class_scores(feats, r, &mut scores);
        out.push(argmax(&scores));
    }
    Ok(out)
}

/// Numerically stable log(sum(exp(xs))).
pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Replaces logits with softmax probabilities, in place.
pub fn softmax_in_place(xs: &mut [f64]) {
    let lse = logsumexp(xs);
    for x in xs.iter_mut() {
        *x = (*x - lse).exp();
    }
}

/// Wraps a fitted model as versioned JSON for debugging.
pub fn model_debug_json<M: Serialize>(model: &M) -> String {
    #[derive(Serialize)]
    struct Versioned<'a, M> {
        format_version: u32,
        model: &'a M,
    }
    serde_json::to_string_pretty(&Versioned {
        format_version: 1,
        model,
    })
    .expect("models serialize")
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labeled_data_requires_dense_classes() {
        let m = DenseMatrix::from_rows(vec![vec![0.0], vec![1.0]]);
        let err = LabeledData::new(m, vec![0, 2]).unwrap_err();
        assert!(matches!(err, Error::ClassAbsentFromTraining));
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[1.0, 1.0, 0.5]), 0);
        assert_eq!(argmax(&[0.2, 0.9, 0.9]), 1);
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let mut xs = [1.0, -2.0, 700.0, 3.5];
        softmax_in_place(&mut xs);
        let sum: f64 = xs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(xs.iter().all(|&p| p.is_finite() && p >= 0.0));
    }

    #[test]
    fn dense_matrix_round_trip() {
        let mut m = DenseMatrix::zeros(2, 3);
        m.set(1, 2, 5.0);
        assert_eq!(m.get(1, 2), 5.0);
        assert_eq!(m.row(0), &[0.0, 0.0, 0.0]);
    }
}
