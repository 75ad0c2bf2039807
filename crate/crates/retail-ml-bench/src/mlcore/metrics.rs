//! Classification quality metrics and the adjusted Rand index.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
    /// confusion[actual][predicted]
    pub confusion: Vec<Vec<usize>>,
}

/// Accuracy, per-class precision/recall/F1 (0 where undefined), macro-F1 and
/// the confusion matrix, over classes 0..=max(label).
pub fn classification_metrics(predicted: &[usize], actual: &[usize]) -> Result<ClassificationMetrics> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            actual: predicted.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput("metric inputs"));
    }
    let n_classes = predicted
        .iter()
        .chain(actual)
        .max()
        .copied()
        .unwrap_or(0)
        + 1;
    let mut confusion = vec![vec![0usize; n_classes]; n_classes];
    let mut correct = 0;
    for (&p, &a) in predicted.iter().zip(actual) {
        confusion[a][p] += 1;
        if p == a {
            correct += 1;
        }
    }
    let mut per_class = Vec::with_capacity(n_classes);
    for class in 0..n_classes {
        let tp = confusion[class][class];
        let predicted_as: usize = (0..n_classes).map(|a| confusion[a][class]).sum();
        let actual_of: usize = confusion[class].iter().sum();
        let precision = if predicted_as > 0 {
            tp as f64 / predicted_as as f64
        } else {
            0.0
        };
        let recall = if actual_of > 0 {
            tp as f64 / actual_of as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class.push(ClassMetrics {
            precision,
            recall,
            f1,
        });
    }
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / n_classes as f64;
    Ok(ClassificationMetrics {
        accuracy: correct as f64 / predicted.len() as f64,
        per_class,
        macro_f1,
        confusion,
    })
}

/// Chance-corrected agreement between two labelings of the same points.
/// Returns 1.0 for identical partitions, about 0 for independent ones.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "label lists must have equal length");
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |x: u64| (x * x.saturating_sub(1)) as f64 / 2.0;
    let sum_cells: f64 = table.iter().flatten().map(|&c| choose2(c)).sum();
    let sum_a: f64 = table
        .iter()
        .map(|row| choose2(row.iter().sum::<u64>()))
        .sum();
    let sum_b: f64 = (0..kb)
        .map(|j| choose2(table.iter().map(|row| row[j]).sum::<u64>()))
        .sum();
    let total = choose2(n as u64);
    let expected = sum_a * sum_b / total;
    let max_index = (sum_a + sum_b) / 2.0;
    let denom = max_index - expected;
    if denom.abs() < 1e-12 {
        return if (sum_cells - expected).abs() < 1e-12 { 1.0 } else { 0.0 };
    }
    (sum_cells - expected) / denom
}
