//! Benchmark execution: repeated timed workload runs over generated or
//! cached datasets, aggregated into result rows.

pub mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::datagen::{generate, load, GenConfig, RetailDataset, CUSTOMERS_FILE, PRODUCTS_FILE, REVIEWS_FILE, SALES_FILE, WEBLOG_FILE};
use crate::error::{Error, Result};
use crate::workloads::{self, Algorithm, MetricRecord, Workload, WorkloadSpec};

/// A benchmark plan: which cells to run, at which scale factors, how often.
#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub specs: Vec<WorkloadSpec>,
    pub sfs: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub data_dir: PathBuf,
    pub regenerate: bool,
    /// Run cells on worker threads. Wall-clock timings of concurrent cells
    /// contend for the machine and are not comparable across cells.
    pub concurrent: bool,
    /// When set, successful cells write their artifact summary here as JSON.
    pub artifact_dir: Option<PathBuf>,
}

impl BenchPlan {
    /// Plan with the default methodology: three repetitions per cell.
    pub fn new(specs: Vec<WorkloadSpec>, sfs: Vec<f64>, data_dir: impl Into<PathBuf>) -> Self {
        BenchPlan {
            specs,
            sfs,
            reps: 3,
            seed: 42,
            data_dir: data_dir.into(),
            regenerate: false,
            concurrent: false,
            artifact_dir: None,
        }
    }
}

/// One (workload, algorithm, scale factor) measurement row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkResult {
    pub workload: Workload,
    pub algorithm: Algorithm,
    pub sf: f64,
    /// Total seconds (prep + ml) per repetition; empty for failure rows.
    pub rep_seconds: Vec<f64>,
    pub rep_prep_seconds: Vec<f64>,
    pub rep_ml_seconds: Vec<f64>,
    pub mean_seconds: f64,
    pub stddev_seconds: f64,
    /// Quality metrics of the final repetition; identical across reps.
    pub quality: MetricRecord,
    /// Failure message when the cell could not run.
    pub error: Option<String>,
}

impl BenchmarkResult {
    pub fn is_failure(&self) -> bool {
        self.error.is_some()
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn stddev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Directory holding the dataset for one scale factor under `data_dir`.
pub fn dataset_dir(data_dir: &Path, sf: f64) -> PathBuf {
    data_dir.join(format!("sf_{sf}"))
}

fn dataset_files_exist(dir: &Path) -> bool {
    [CUSTOMERS_FILE, PRODUCTS_FILE, SALES_FILE, REVIEWS_FILE, WEBLOG_FILE]
        .iter()
        .all(|f| dir.join(f).exists())
}

/// Generates or loads the dataset for one scale factor. Load time is not part
/// of any repetition timing.
pub fn ensure_dataset(plan: &BenchPlan, sf: f64) -> Result<RetailDataset> {
    let dir = dataset_dir(&plan.data_dir, sf);
    if plan.regenerate || !dataset_files_exist(&dir) {
        if !plan.regenerate && dir.exists() && !dataset_files_exist(&dir) {
            return Err(Error::InvalidConfig(format!(
                "dataset at {} is incomplete; pass regenerate to rebuild it",
                dir.display()
            )));
        }
        if !plan.regenerate && !dir.exists() {
            return Err(Error::InvalidConfig(format!(
                "no dataset at {}; pass regenerate to create it",
                dir.display()
            )));
        }
        let mut cfg = GenConfig::new(sf, plan.seed, &dir);
        cfg.output_dir = dir.clone();
        generate(&cfg)
    } else {
        load(&dir)
    }
}

fn run_cell(
    ds: &RetailDataset,
    spec: &WorkloadSpec,
    sf: f64,
    reps: usize,
) -> (BenchmarkResult, Option<workloads::ArtifactSummary>) {
    let mut rep_seconds = Vec::with_capacity(reps);
    let mut rep_prep = Vec::with_capacity(reps);
    let mut rep_ml = Vec::with_capacity(reps);
    let mut quality: Option<MetricRecord> = None;
    let mut artifact = None;

    for _ in 0..reps {
        match workloads::run(ds, spec) {
            Ok(output) => {
                rep_seconds.push(output.prep_seconds + output.ml_seconds);
                rep_prep.push(output.prep_seconds);
                rep_ml.push(output.ml_seconds);
                if let Some(previous) = &quality {
                    if *previous != output.quality {
                        return (
                            failure_row(
                                spec,
                                sf,
                                "quality metrics differ across repetitions".to_string(),
                            ),
                            None,
                        );
                    }
                }
                quality = Some(output.quality);
                artifact = Some(output.artifact);
            }
            Err(e) => return (failure_row(spec, sf, e.to_string()), None),
        }
    }

    let result = BenchmarkResult {
        workload: spec.workload,
        algorithm: spec.algorithm,
        sf,
        mean_seconds: mean(&rep_seconds),
        stddev_seconds: stddev(&rep_seconds),
        rep_seconds,
        rep_prep_seconds: rep_prep,
        rep_ml_seconds: rep_ml,
        quality: quality.expect("reps >= 1"),
        error: None,
    };
    (result, artifact)
}

fn failure_row(spec: &WorkloadSpec, sf: f64, message: String) -> BenchmarkResult {
    BenchmarkResult {
        workload: spec.workload,
        algorithm: spec.algorithm,
        sf,
        rep_seconds: Vec::new(),
        rep_prep_seconds: Vec::new(),
        rep_ml_seconds: Vec::new(),
        mean_seconds: f64::NAN,
        stddev_seconds: f64::NAN,
        quality: MetricRecord::new(),
        error: Some(message),
    }
}

fn emit_artifact(
    dir: &Path,
    spec: &WorkloadSpec,
    sf: f64,
    quality: &MetricRecord,
    artifact: &workloads::ArtifactSummary,
) -> Result<()> {
    #[derive(Serialize)]
    struct ArtifactDoc<'a> {
        workload: Workload,
        algorithm: Algorithm,
        sf: f64,
        quality: &'a MetricRecord,
        artifact: &'a workloads::ArtifactSummary,
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format!("{}_{}_sf{}.json", spec.workload, spec.algorithm, sf));
    let doc = ArtifactDoc {
        workload: spec.workload,
        algorithm: spec.algorithm,
        sf,
        quality,
        artifact,
    };
    let json = serde_json::to_string_pretty(&doc).expect("artifacts serialize") + "\n";
    fs::write(&path, json).map_err(|e| Error::io(&path, e))
}

/// Runs every (spec, sf) cell of the plan. A failing cell becomes a failure
/// row; the rest of the plan still runs. Results are ordered by
/// (workload, algorithm, sf).
pub fn run_plan(plan: &BenchPlan) -> Result<Vec<BenchmarkResult>> {
    if plan.specs.is_empty() {
        return Err(Error::EmptyInput("benchmark plan specs"));
    }
    if plan.reps < 1 {
        return Err(Error::InvalidConfig("reps must be >= 1".into()));
    }

    let mut sfs = plan.sfs.clone();
    sfs.sort_by(f64::total_cmp);
    sfs.dedup();
    let mut datasets: BTreeMap<String, RetailDataset> = BTreeMap::new();
    for &sf in &sfs {
        datasets.insert(sf.to_string(), ensure_dataset(plan, sf)?);
    }

    let mut cells: Vec<(WorkloadSpec, f64)> = Vec::new();
    for spec in &plan.specs {
        spec.validate()?;
        for &sf in &sfs {
            cells.push((spec.clone(), sf));
        }
    }
    cells.sort_by(|a, b| {
        (a.0.workload, a.0.algorithm)
            .cmp(&(b.0.workload, b.0.algorithm))
            .then(a.1.total_cmp(&b.1))
    });

    let mut rows: Vec<(BenchmarkResult, Option<workloads::ArtifactSummary>)> =
        Vec::with_capacity(cells.len());
    if plan.concurrent {
        let mut slots: Vec<Option<(BenchmarkResult, Option<workloads::ArtifactSummary>)>> =
            (0..cells.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (i, (spec, sf)) in cells.iter().enumerate() {
                let ds = &datasets[&sf.to_string()];
                handles.push((i, scope.spawn(move || run_cell(ds, spec, *sf, plan.reps))));
            }
            for (i, handle) in handles {
                slots[i] = Some(handle.join().expect("cell thread panicked"));
            }
        });
        rows.extend(slots.into_iter().map(|s| s.expect("all cells ran")));
    } else {
        for (spec, sf) in &cells {
            let ds = &datasets[&sf.to_string()];
            rows.push(run_cell(ds, spec, *sf, plan.reps));
        }
    }

    let mut results = Vec::with_capacity(cells.len());
    for ((row, artifact), (spec, sf)) in rows.into_iter().zip(&cells) {
        if let (Some(dir), Some(artifact), None) = (&plan.artifact_dir, &artifact, &row.error) {
            emit_artifact(dir, spec, *sf, &row.quality, artifact)?;
        }
        results.push(row);
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan_for(dir: &Path, specs: Vec<WorkloadSpec>) -> BenchPlan {
        let mut plan = BenchPlan::new(specs, vec![0.01], dir);
        plan.regenerate = true;
        plan
    }

    #[test]
    fn default_reps_is_three() {
        let plan = BenchPlan::new(Vec::new(), Vec::new(), "unused");
        assert_eq!(plan.reps, 3);
    }

    #[test]
    fn every_result_row_has_reps_times() {
        let dir = tempfile::tempdir().unwrap();
        let specs = vec![WorkloadSpec::new(Workload::M1, Algorithm::Eclat, 1)];
        let results = run_plan(&plan_for(dir.path(), specs)).unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].rep_seconds.len(), 3);
        assert_eq!(results[0].rep_prep_seconds.len(), 3);
        assert_eq!(results[0].rep_ml_seconds.len(), 3);
        assert!(results[0].error.is_none());
    }

    #[test]
    fn single_rep_has_zero_stddev() {
        let dir = tempfile::tempdir().unwrap();
        let mut plan = plan_for(
            dir.path(),
            vec![WorkloadSpec::new(Workload::M1, Algorithm::FpGrowth, 1)],
        );
        plan.reps = 1;
        let results = run_plan(&plan).unwrap();
        assert_eq!(results[0].stddev_seconds, 0.0);
    }

    #[test]
    fn failing_cell_records_row_and_plan_continues() {
        let dir = tempfile::tempdir().unwrap();
        let mut bad = WorkloadSpec::new(Workload::Q26, Algorithm::KMeans, 1);
        bad.params.set("k", 1_000_000);
        let good = WorkloadSpec::new(Workload::M1, Algorithm::FpGrowth, 1);
        let results = run_plan(&plan_for(dir.path(), vec![bad, good])).unwrap();
        assert_eq!(results.len(), 2);
        // Ordering is (workload, algorithm, sf): q26 before m1.
        assert!(results[0].error.as_deref().unwrap_or("").contains("exceeds"));
        assert!(results[0].rep_seconds.is_empty());
        assert!(results[1].error.is_none());
    }

    #[test]
    fn aggregates_match_recomputation() {
        let dir = tempfile::tempdir().unwrap();
        let specs = vec![WorkloadSpec::new(Workload::M1, Algorithm::FpGrowth, 1)];
        let results = run_plan(&plan_for(dir.path(), specs)).unwrap();
        let row = &results[0];
        assert_eq!(row.mean_seconds, mean(&row.rep_seconds));
        assert_eq!(row.stddev_seconds, stddev(&row.rep_seconds));
    }

    #[test]
    fn spec_order_does_not_change_cell_contents() {
        let dir = tempfile::tempdir().unwrap();
        let a = WorkloadSpec::new(Workload::M1, Algorithm::FpGrowth, 1);
        let b = WorkloadSpec::new(Workload::M1, Algorithm::Eclat, 1);
        let forward = run_plan(&plan_for(dir.path(), vec![a.clone(), b.clone()])).unwrap();
        let backward = run_plan(&plan_for(dir.path(), vec![b, a])).unwrap();
        assert_eq!(forward.len(), backward.len());
        for (x, y) in forward.iter().zip(&backward) {
            assert_eq!(x.workload, y.workload);
            assert_eq!(x.algorithm, y.algorithm);
            assert_eq!(x.quality, y.quality);
        }
    }

    #[test]
    fn missing_dataset_without_regenerate_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut plan = plan_for(
            dir.path(),
            vec![WorkloadSpec::new(Workload::M1, Algorithm::FpGrowth, 1)],
        );
        plan.regenerate = false;
        assert!(run_plan(&plan).is_err());
    }

    #[test]
    fn datasets_are_cached_on_disk_and_reloaded() {
        let dir = tempfile::tempdir().unwrap();
        let specs = vec![WorkloadSpec::new(Workload::M1, Algorithm::FpGrowth, 1)];
        let first = run_plan(&plan_for(dir.path(), specs.clone())).unwrap();
        let mut plan = plan_for(dir.path(), specs);
        plan.regenerate = false;
        let second = run_plan(&plan).unwrap();
        assert_eq!(first[0].quality, second[0].quality);
    }

    #[test]
    fn concurrent_cells_produce_the_same_rows() {
        let dir = tempfile::tempdir().unwrap();
        let specs = vec![
            WorkloadSpec::new(Workload::M1, Algorithm::FpGrowth, 1),
            WorkloadSpec::new(Workload::M1, Algorithm::Eclat, 1),
        ];
        let sequential = run_plan(&plan_for(dir.path(), specs.clone())).unwrap();
        let mut plan = plan_for(dir.path(), specs);
        plan.concurrent = true;
        plan.regenerate = false;
        let concurrent = run_plan(&plan).unwrap();
        for (s, c) in sequential.iter().zip(&concurrent) {
            assert_eq!(s.workload, c.workload);
            assert_eq!(s.algorithm, c.algorithm);
            assert_eq!(s.quality, c.quality);
        }
    }
}
