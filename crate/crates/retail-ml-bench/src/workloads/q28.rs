//! Q28: sentiment classification of product reviews over tf-idf features.
//!
//! Ratings map to classes as 1-2 negative, 3 neutral, 4-5 positive; binary
//! mode drops the neutral reviews. The vocabulary is built on the training
//! split only and the split itself is a stable hash of the review id.

use crate::datagen::{sentiment_of_rating, RetailDataset, Sentiment};
use crate::error::{Error, Result};
use crate::mlcore::{
    classification_metrics, fit_linear_svm, fit_logistic, fit_naive_bayes, predict, LabeledData,
};
use crate::textkit::{tfidf, tokenize, Vocabulary, DEFAULT_MAX_TERMS, DEFAULT_MIN_DF};

use super::{
    is_test_row, Algorithm, ArtifactSummary, MetricRecord, StageTimer, WorkloadOutput,
    WorkloadSpec,
};

/// Class ids used by the pipeline. Three-class: 0 negative, 1 neutral,
/// 2 positive. Binary: 0 negative, 1 positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Q28Label(pub usize);

pub(super) fn label_for(rating: u8, binary: bool) -> Option<usize> {
    let sentiment = sentiment_of_rating(rating);
    if binary {
        match sentiment {
            Sentiment::Negative => Some(0),
            Sentiment::Neutral => None,
            Sentiment::Positive => Some(1),
        }
    } else {
        Some(sentiment.index())
    }
}

pub(super) fn run(ds: &RetailDataset, spec: &WorkloadSpec) -> Result<WorkloadOutput> {
    let mut timer = StageTimer::start();
    let binary = spec.params.get_bool("binary", false)?;
    let min_df = spec.params.get_usize("min_df", DEFAULT_MIN_DF)?;
    let max_terms = spec.params.get_usize("max_terms", DEFAULT_MAX_TERMS)?;

    let mut train_docs: Vec<Vec<String>> = Vec::new();
    let mut train_labels: Vec<usize> = Vec::new();
    let mut test_docs: Vec<Vec<String>> = Vec::new();
    let mut test_labels: Vec<usize> = Vec::new();
    for review in &ds.reviews {
        let Some(label) = label_for(review.rating, binary) else {
            continue;
        };
        let tokens = tokenize(&review.text);
        if is_test_row(review.id as u64, spec.seed) {
            test_docs.push(tokens);
            test_labels.push(label);
        } else {
            train_docs.push(tokens);
            train_labels.push(label);
        }
    }
    if train_docs.is_empty() {
        return Err(Error::EmptyInput("q28 training split"));
    }
    if test_docs.is_empty() {
        return Err(Error::EmptyInput("q28 test split"));
    }
    let n_classes = if binary { 2 } else { 3 };
    for class in 0..n_classes {
        if !train_labels.contains(&class) {
            return Err(Error::ClassAbsentFromTraining);
        }
    }

    let vocab = Vocabulary::build(&train_docs, min_df, max_terms)?;
    let train_matrix = tfidf(&train_docs, &vocab);
    let test_matrix = tfidf(&test_docs, &vocab);
    let train = LabeledData::new(train_matrix, train_labels)?;
    let prep_seconds = timer.lap();

    let cfg = spec.iter_config()?;
    let predicted = match spec.algorithm {
        Algorithm::NaiveBayes => {
            let model = fit_naive_bayes(&train)?;
            predict(&model, &test_matrix)?
        }
        Algorithm::Logistic => {
            let model = fit_logistic(&train, &cfg)?;
            predict(&model, &test_matrix)?
        }
        Algorithm::Svm => {
            let model = fit_linear_svm(&train, &cfg)?;
            predict(&model, &test_matrix)?
        }
        other => {
            return Err(Error::InvalidSpec(format!(
                "q28 cannot run algorithm {other}"
            )))
        }
    };

    let metrics = classification_metrics(&predicted, &test_labels)?;
    let mut label_counts = vec![0usize; n_classes];
    for &l in &test_labels {
        label_counts[l] += 1;
    }
    let majority_baseline =
        label_counts.iter().copied().max().unwrap_or(0) as f64 / test_labels.len() as f64;

    let mut quality = MetricRecord::new();
    quality.insert("test_accuracy".into(), metrics.accuracy);
    quality.insert("macro_f1".into(), metrics.macro_f1);
    quality.insert("majority_baseline".into(), majority_baseline);
    quality.insert("train_rows".into(), train.n_rows() as f64);
    quality.insert("test_rows".into(), test_labels.len() as f64);
    quality.insert("vocabulary_terms".into(), vocab.len() as f64);
    let ml_seconds = timer.lap();

    Ok(WorkloadOutput {
        prep_seconds,
        ml_seconds,
        quality,
        artifact: ArtifactSummary::Classification {
            confusion: metrics.confusion,
            label_counts,
        },
    })
}
