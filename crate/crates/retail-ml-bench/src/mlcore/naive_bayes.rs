//! Multinomial naive Bayes with Laplace smoothing.

use serde::Serialize;

use crate::error::{Error, Result};

use super::{Classifier, DenseMatrix, Features, LabeledData};

/// Smoothing pseudo-count added to every (class, feature) cell.
pub const LAPLACE_ALPHA: f64 = 1.0;

#[derive(Debug, Clone, Serialize)]
pub struct NaiveBayesModel {
    pub class_log_priors: Vec<f64>,
    /// C x V matrix; each exponentiated row sums to 1.
    pub feature_log_likelihoods: DenseMatrix,
}

/// Fits a multinomial model from nonnegative feature values (counts or tf-idf).
pub fn fit_naive_bayes<F: Features>(data: &LabeledData<F>) -> Result<NaiveBayesModel> {
    let n = data.n_rows();
    let v = data.n_cols();
    let c = data.n_classes;

    let mut class_counts = vec![0usize; c];
    let mut feature_sums = DenseMatrix::zeros(c, v);
    for r in 0..n {
        let label = data.labels[r];
        class_counts[label] += 1;
        let sums = feature_sums.row_mut(label);
        for (col, value) in data.features.row_entries(r) {
            if value < 0.0 {
                return Err(Error::NegativeFeature {
                    row: r,
                    col,
                    value,
                });
            }
            sums[col] += value;
        }
    }

    let class_log_priors = class_counts
        .iter()
        .map(|&count| (count as f64 / n as f64).ln())
        .collect();

    let mut log_likelihoods = DenseMatrix::zeros(c, v);
    for class in 0..c {
        let total: f64 = feature_sums.row(class).iter().sum();
        let denom = (total + LAPLACE_ALPHA * v as f64).ln();
        let out = log_likelihoods.row_mut(class);
        for (j, &sum) in feature_sums.row(class).iter().enumerate() {
            out[j] = (sum + LAPLACE_ALPHA).ln() - denom;
        }
    }

    Ok(NaiveBayesModel {
        class_log_priors,
        feature_log_likelihoods: log_likelihoods,
    })
}

impl Classifier for NaiveBayesModel {
    fn n_classes(&self) -> usize {
        self.class_log_priors.len()
    }

    fn n_features(&self) -> usize {
        self.feature_log_likelihoods.n_cols()
    }

    fn class_scores<F: Features>(&self, feats: &F, r: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.class_log_priors);
        for (col, value) in feats.row_entries(r) {
            for (class, score) in out.iter_mut().enumerate() {
                *score += value * self.feature_log_likelihoods.get(class, col);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlcore::predict;

    #[test]
    fn hand_computed_two_class_model() {
        // class0 doc (2,0), class1 doc (0,2); alpha=1 over V=2:
        // P(f0 | class0) = (2+1)/(2+2) = 3/4.
        let features = DenseMatrix::from_rows(vec![vec![2.0, 0.0], vec![0.0, 2.0]]);
        let data = LabeledData::new(features, vec![0, 1]).unwrap();
        let model = fit_naive_bayes(&data).unwrap();
        assert!((model.feature_log_likelihoods.get(0, 0) - (3.0f64 / 4.0).ln()).abs() < 1e-12);
        assert!((model.feature_log_likelihoods.get(0, 1) - (1.0f64 / 4.0).ln()).abs() < 1e-12);
        assert!((model.class_log_priors[0] - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_classes_get_identical_rows() {
        let features = DenseMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let data = LabeledData::new(features, vec![0, 1]).unwrap();
        let model = fit_naive_bayes(&data).unwrap();
        assert_eq!(
            model.feature_log_likelihoods.row(0),
            model.feature_log_likelihoods.row(1)
        );
        assert!((model.class_log_priors[0].exp() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exponentiated_rows_sum_to_one() {
        let features = DenseMatrix::from_rows(vec![
            vec![3.0, 0.5, 0.0],
            vec![0.0, 2.0, 1.0],
            vec![1.0, 1.0, 4.0],
        ]);
        let data = LabeledData::new(features, vec![0, 1, 2]).unwrap();
        let model = fit_naive_bayes(&data).unwrap();
        for class in 0..3 {
            let sum: f64 = model
                .feature_log_likelihoods
                .row(class)
                .iter()
                .map(|l| l.exp())
                .sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
        let prior_sum: f64 = model.class_log_priors.iter().map(|l| l.exp()).sum();
        assert!((prior_sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_features_are_rejected() {
        let features = DenseMatrix::from_rows(vec![vec![1.0], vec![-0.5]]);
        let data = LabeledData::new(features, vec![0, 1]).unwrap();
        assert!(matches!(
            fit_naive_bayes(&data),
            Err(Error::NegativeFeature { row: 1, .. })
        ));
    }

    #[test]
    fn dominant_prior_wins_with_uniform_likelihoods() {
        // Log prior 0.0 is probability 1 for class 0; class 1 is vanishingly unlikely.
        let model = NaiveBayesModel {
            class_log_priors: vec![0.0, -1e18],
            feature_log_likelihoods: DenseMatrix::from_rows(vec![
                vec![0.5f64.ln(), 0.5f64.ln()],
                vec![0.5f64.ln(), 0.5f64.ln()],
            ]),
        };
        let feats = DenseMatrix::from_rows(vec![vec![1.0, 2.0], vec![4.0, 0.0]]);
        assert_eq!(predict(&model, &feats).unwrap(), vec![0, 0]);
    }
}
