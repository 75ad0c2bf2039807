//! M3: predict whether a user is interested in an item category from their
//! browsing history.
//!
//! The weblog stream is split at its median timestamp. Features for each
//! (user, category) pair come from the first half, the label from the second:
//! 1 iff the pair's second-half clicks exceed the mean over pairs with at
//! least one click. A temporal split keeps the label window disjoint from the
//! feature window.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader};

use serde::Deserialize;

use crate::datagen::RetailDataset;
use crate::error::{Error, Result};
use crate::mlcore::{
    classification_metrics, fit_decision_tree, fit_linear_svm, fit_logistic, fit_mlp,
    fit_naive_bayes, predict, DenseMatrix, LabeledData,
};

use super::{
    is_test_row, Algorithm, ArtifactSummary, MetricRecord, StageTimer, WorkloadOutput,
    WorkloadSpec,
};

/// Populations over which the "more than average clicks" mean is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMode {
    /// Mean over all (user, category) pairs with a second-half click.
    Pairs,
    /// Mean within each category.
    Category,
    /// Mean within each user.
    User,
}

impl AverageMode {
    fn parse(raw: Option<&str>) -> Result<Self> {
        match raw {
            None | Some("pairs") => Ok(AverageMode::Pairs),
            Some("category") => Ok(AverageMode::Category),
            Some("user") => Ok(AverageMode::User),
            Some(other) => Err(Error::InvalidParam {
                key: "average".into(),
                message: format!("expected pairs|category|user, got {other:?}"),
            }),
        }
    }
}

/// The minimal event projection the pipeline needs.
#[derive(Debug, Deserialize)]
struct ClickEvent {
    ts: u64,
    user_id: usize,
    item_id: usize,
    category_id: usize,
    session_id: u64,
}

/// One prepared (user, category) row: five first-half features plus the
/// second-half label.
#[derive(Debug, Clone, PartialEq)]
pub struct M3Prepared {
    pub keys: Vec<(usize, usize)>,
    pub features: DenseMatrix,
    pub labels: Vec<usize>,
}

#[derive(Default)]
struct PairStats {
    clicks: usize,
    items: BTreeSet<usize>,
    sessions: BTreeSet<u64>,
}

/// Builds the feature/label table by a single pass over the weblog file.
pub fn prepare_m3(ds: &RetailDataset, mode: AverageMode) -> Result<M3Prepared> {
    let file = fs::File::open(&ds.weblog_path).map_err(|e| Error::io(&ds.weblog_path, e))?;
    let name = ds.weblog_path.display().to_string();
    let mut events: Vec<ClickEvent> = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&ds.weblog_path, e))?;
        let event: ClickEvent = serde_json::from_str(&line).map_err(|e| Error::MalformedRow {
            file: name.clone(),
            line: i + 1,
            message: e.to_string(),
        })?;
        events.push(event);
    }
    if events.is_empty() {
        return Err(Error::EmptyInput("weblog stream"));
    }

    let median_ts = events[events.len() / 2].ts;
    let mut first: BTreeMap<(usize, usize), PairStats> = BTreeMap::new();
    let mut first_user_total: BTreeMap<usize, usize> = BTreeMap::new();
    let mut second: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for event in &events {
        let key = (event.user_id, event.category_id);
        if event.ts < median_ts {
            let stats = first.entry(key).or_default();
            stats.clicks += 1;
            stats.items.insert(event.item_id);
            stats.sessions.insert(event.session_id);
            *first_user_total.entry(event.user_id).or_insert(0) += 1;
        } else {
            *second.entry(key).or_insert(0) += 1;
        }
    }

    let pairs_mean = second.values().sum::<usize>() as f64 / second.len().max(1) as f64;
    let threshold = |user: usize, category: usize| -> f64 {
        match mode {
            AverageMode::Pairs => pairs_mean,
            AverageMode::Category => {
                let (sum, count) = second
                    .iter()
                    .filter(|((_, c), _)| *c == category)
                    .fold((0usize, 0usize), |(s, n), (_, &v)| (s + v, n + 1));
                if count == 0 {
                    f64::INFINITY
                } else {
                    sum as f64 / count as f64
                }
            }
            AverageMode::User => {
                let (sum, count) = second
                    .iter()
                    .filter(|((u, _), _)| *u == user)
                    .fold((0usize, 0usize), |(s, n), (_, &v)| (s + v, n + 1));
                if count == 0 {
                    f64::INFINITY
                } else {
                    sum as f64 / count as f64
                }
            }
        }
    };

    let mut keys = Vec::with_capacity(first.len());
    let mut rows = Vec::with_capacity(first.len());
    let mut labels = Vec::with_capacity(first.len());
    for (&(user, category), stats) in &first {
        let user_total = first_user_total[&user];
        rows.push(vec![
            stats.clicks as f64,
            stats.items.len() as f64,
            stats.sessions.len() as f64,
            user_total as f64,
            stats.clicks as f64 / user_total as f64,
        ]);
        let second_clicks = second.get(&(user, category)).copied().unwrap_or(0);
        labels.push(usize::from(second_clicks as f64 > threshold(user, category)));
        keys.push((user, category));
    }

    let distinct: BTreeSet<usize> = labels.iter().copied().collect();
    if distinct.len() < 2 {
        return Err(Error::DegenerateLabels);
    }
    Ok(M3Prepared {
        keys,
        features: DenseMatrix::from_rows(rows),
        labels,
    })
}

fn split_key(user: usize, category: usize) -> u64 {
    (user as u64) << 32 | category as u64
}

pub(super) fn run(ds: &RetailDataset, spec: &WorkloadSpec) -> Result<WorkloadOutput> {
    let mut timer = StageTimer::start();
    let mode = AverageMode::parse(spec.params.get_str("average"))?;
    let prepared = prepare_m3(ds, mode)?;

    let mut train_rows = Vec::new();
    let mut train_labels = Vec::new();
    let mut test_rows = Vec::new();
    let mut test_labels = Vec::new();
    for (i, &(user, category)) in prepared.keys.iter().enumerate() {
        let row = prepared.features.row(i).to_vec();
        if is_test_row(split_key(user, category), spec.seed) {
            test_rows.push(row);
            test_labels.push(prepared.labels[i]);
        } else {
            train_rows.push(row);
            train_labels.push(prepared.labels[i]);
        }
    }
    if train_rows.is_empty() || test_rows.is_empty() {
        return Err(Error::EmptyInput("m3 split"));
    }
    if !train_labels.contains(&0) || !train_labels.contains(&1) {
        return Err(Error::ClassAbsentFromTraining);
    }
    let train = LabeledData::new(DenseMatrix::from_rows(train_rows), train_labels)?;
    let test_features = DenseMatrix::from_rows(test_rows);
    let prep_seconds = timer.lap();

    let cfg = spec.iter_config()?;
    let predicted = match spec.algorithm {
        Algorithm::DecisionTree => {
            let max_depth = spec.params.get_usize("max_depth", 10)?;
            let min_split = spec.params.get_usize("min_samples_split", 2)?;
            let model = fit_decision_tree(&train, max_depth, min_split)?;
            predict(&model, &test_features)?
        }
        Algorithm::Mlp => {
            let hidden = spec.params.get_usize("hidden", 32)?;
            let model = fit_mlp(&train, &[hidden], &cfg)?;
            predict(&model, &test_features)?
        }
        Algorithm::Svm => {
            let model = fit_linear_svm(&train, &cfg)?;
            predict(&model, &test_features)?
        }
        Algorithm::NaiveBayes => {
            let model = fit_naive_bayes(&train)?;
            predict(&model, &test_features)?
        }
        Algorithm::Logistic => {
            let model = fit_logistic(&train, &cfg)?;
            predict(&model, &test_features)?
        }
        other => {
            return Err(Error::InvalidSpec(format!(
                "m3 cannot run algorithm {other}"
            )))
        }
    };

    let metrics = classification_metrics(&predicted, &test_labels)?;
    let positives = prepared.labels.iter().filter(|&&l| l == 1).count();
    let positive_share = positives as f64 / prepared.labels.len() as f64;
    let mut label_counts = vec![0usize; 2];
    for &l in &test_labels {
        label_counts[l] += 1;
    }

    let mut quality = MetricRecord::new();
    quality.insert("test_accuracy".into(), metrics.accuracy);
    quality.insert("macro_f1".into(), metrics.macro_f1);
    quality.insert("positive_share".into(), positive_share);
    quality.insert(
        "minority_share".into(),
        positive_share.min(1.0 - positive_share),
    );
    quality.insert("rows".into(), prepared.labels.len() as f64);
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
