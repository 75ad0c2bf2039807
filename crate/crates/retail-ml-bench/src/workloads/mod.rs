//! The five end-to-end workload pipelines. Each run is a data-preparation
//! stage over the retail dataset followed by an ML stage, both timed
//! separately, returning quality metrics and an artifact summary.

mod m1;
mod m2;
mod m3;
mod q26;
mod q28;

pub use m1::prepare_baskets;
pub use m3::{prepare_m3, M3Prepared};
pub use q26::prepare_q26;
pub use q28::Q28Label;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::datagen::RetailDataset;
use crate::error::{Error, Result};
use crate::fpm::{AssociationRule, Itemset};
use crate::mlcore::IterConfig;
use crate::rng::mix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Workload {
    Q26,
    Q28,
    M1,
    M2,
    M3,
}

impl Serialize for Workload {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl Workload {
    pub const ALL: [Workload; 5] = [
        Workload::Q26,
        Workload::Q28,
        Workload::M1,
        Workload::M2,
        Workload::M3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Workload::Q26 => "q26",
            Workload::Q28 => "q28",
            Workload::M1 => "m1",
            Workload::M2 => "m2",
            Workload::M3 => "m3",
        }
    }

    /// Valid algorithms for this workload, in canonical order.
    pub fn algorithms(self) -> &'static [Algorithm] {
        match self {
            Workload::Q26 => &[Algorithm::KMeans, Algorithm::Gmm],
            Workload::Q28 => &[Algorithm::NaiveBayes, Algorithm::Logistic, Algorithm::Svm],
            Workload::M1 => &[Algorithm::FpGrowth, Algorithm::Eclat, Algorithm::PairsBaseline],
            Workload::M2 => &[Algorithm::Lda],
            Workload::M3 => &[
                Algorithm::DecisionTree,
                Algorithm::Mlp,
                Algorithm::Svm,
                Algorithm::NaiveBayes,
                Algorithm::Logistic,
            ],
        }
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Workload {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "q26" => Ok(Workload::Q26),
            "q28" => Ok(Workload::Q28),
            "m1" => Ok(Workload::M1),
            "m2" => Ok(Workload::M2),
            "m3" => Ok(Workload::M3),
            other => Err(Error::InvalidSpec(format!("unknown workload {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    KMeans,
    Gmm,
    NaiveBayes,
    Logistic,
    Svm,
    FpGrowth,
    Eclat,
    PairsBaseline,
    Lda,
    DecisionTree,
    Mlp,
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::KMeans => "kmeans",
            Algorithm::Gmm => "gmm",
            Algorithm::NaiveBayes => "naive_bayes",
            Algorithm::Logistic => "logistic",
            Algorithm::Svm => "svm",
            Algorithm::FpGrowth => "fp_growth",
            Algorithm::Eclat => "eclat",
            Algorithm::PairsBaseline => "pairs_baseline",
            Algorithm::Lda => "lda",
            Algorithm::DecisionTree => "decision_tree",
            Algorithm::Mlp => "mlp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kmeans" | "k_means" | "k-means" => Ok(Algorithm::KMeans),
            "gmm" => Ok(Algorithm::Gmm),
            "naive_bayes" | "nb" => Ok(Algorithm::NaiveBayes),
            "logistic" | "logistic_regression" => Ok(Algorithm::Logistic),
            "svm" => Ok(Algorithm::Svm),
            "fp_growth" | "fpgrowth" => Ok(Algorithm::FpGrowth),
            "eclat" => Ok(Algorithm::Eclat),
            "pairs_baseline" | "pairs" => Ok(Algorithm::PairsBaseline),
            "lda" => Ok(Algorithm::Lda),
            "decision_tree" | "tree" => Ok(Algorithm::DecisionTree),
            "mlp" => Ok(Algorithm::Mlp),
            other => Err(Error::InvalidSpec(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Free-form key=value parameters with typed access.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Params(pub BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| Error::InvalidParam {
                key: key.to_string(),
                message: format!("cannot parse {raw:?}"),
            }),
        }
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn get_bool(&self, key: &str, default: bool) -> Result<bool> {
        Ok(self.parse(key)?.unwrap_or(default))
    }
}

/// One benchmark cell: a workload, the algorithm driving its ML stage,
/// parameter overrides, and the seed for every random choice in the run.
#[derive(Debug, Clone, Serialize)]
pub struct WorkloadSpec {
    pub workload: Workload,
    pub algorithm: Algorithm,
    pub params: Params,
    pub seed: u64,
}

impl WorkloadSpec {
    pub fn new(workload: Workload, algorithm: Algorithm, seed: u64) -> Self {
        WorkloadSpec {
            workload,
            algorithm,
            params: Params::new(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.workload.algorithms().contains(&self.algorithm) {
            return Err(Error::InvalidSpec(format!(
                "algorithm {} is not valid for workload {}",
                self.algorithm, self.workload
            )));
        }
        Ok(())
    }

    pub(crate) fn iter_config(&self) -> Result<IterConfig> {
        let defaults = IterConfig::default();
        Ok(IterConfig {
            max_iter: self.params.get_usize("max_iter", defaults.max_iter)?,
            tol: self.params.get_f64("tol", defaults.tol)?,
            learning_rate: self.params.get_f64("learning_rate", defaults.learning_rate)?,
            l2: self.params.get_f64("l2", defaults.l2)?,
            seed: self.seed,
        })
    }
}

pub type MetricRecord = BTreeMap<String, f64>;

/// Per-workload result payload written by `--emit-artifacts`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArtifactSummary {
    Clustering {
        cluster_sizes: Vec<usize>,
        /// (customer id, cluster) pairs.
        assignments: Vec<(usize, usize)>,
    },
    Classification {
        /// confusion[actual][predicted] on the test split.
        confusion: Vec<Vec<usize>>,
        label_counts: Vec<usize>,
    },
    Itemsets {
        itemsets: Vec<Itemset>,
        rules: Vec<AssociationRule>,
    },
    Topics {
        top_terms: Vec<Vec<String>>,
        /// Best-matching sentiment pool per topic, when ground truth is known.
        matched_pools: Vec<String>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct WorkloadOutput {
    pub prep_seconds: f64,
    pub ml_seconds: f64,
    pub quality: MetricRecord,
    pub artifact: ArtifactSummary,
}

/// Stable 80/20 split: a row belongs to the test split iff its keyed hash
/// lands in the lowest fifth. Depends only on (key, seed), so it is invariant
/// under row reordering.
pub fn is_test_row(key: u64, seed: u64) -> bool {
    mix64(key ^ mix64(seed)) % 5 == 0
}

pub(crate) struct StageTimer {
    start: Instant,
}

impl StageTimer {
    pub(crate) fn start() -> Self {
        StageTimer {
            start: Instant::now(),
        }
    }

    pub(crate) fn lap(&mut self) -> f64 {
        let now = Instant::now();
        let elapsed = now.duration_since(self.start).as_secs_f64();
        self.start = now;
        elapsed
    }
}

/// Executes one workload run against a dataset.
pub fn run(ds: &RetailDataset, spec: &WorkloadSpec) -> Result<WorkloadOutput> {
    spec.validate()?;
    match spec.workload {
        Workload::Q26 => q26::run(ds, spec),
        Workload::Q28 => q28::run(ds, spec),
        Workload::M1 => m1::run(ds, spec),
        Workload::M2 => m2::run(ds, spec),
        Workload::M3 => m3::run(ds, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_pairs_are_rejected() {
        let spec = WorkloadSpec::new(Workload::M2, Algorithm::KMeans, 0);
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))));
        let ok = WorkloadSpec::new(Workload::M2, Algorithm::Lda, 0);
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn every_listed_pair_validates() {
        for w in Workload::ALL {
            for &a in w.algorithms() {
                assert!(WorkloadSpec::new(w, a, 1).validate().is_ok());
            }
        }
    }

    #[test]
    fn split_is_stable_and_roughly_eighty_twenty() {
        let seed = 99;
        let n = 10_000u64;
        let test_count = (0..n).filter(|&k| is_test_row(k, seed)).count();
        let fraction = test_count as f64 / n as f64;
        assert!((fraction - 0.2).abs() < 0.02, "test fraction {fraction}");
        for key in 0..50 {
            assert_eq!(is_test_row(key, seed), is_test_row(key, seed));
        }
    }

    #[test]
    fn params_parse_with_defaults() {
        let mut p = Params::new();
        p.set("k", 7).set("min_support", 0.05).set("binary", "true");
        assert_eq!(p.get_usize("k", 3).unwrap(), 7);
        assert_eq!(p.get_f64("min_support", 0.01).unwrap(), 0.05);
        assert!(p.get_bool("binary", false).unwrap());
        assert_eq!(p.get_usize("missing", 12).unwrap(), 12);
        p.set("k", "x");
        assert!(p.get_usize("k", 3).is_err());
    }
}
