//! Result reports: a flat CSV with one row per repetition and metric, and a
//! markdown grid of mean seconds per (workload, algorithm) row and scale
//! factor column. Failure cells render as "-" in the grid and as rows with
//! empty timing fields in the CSV.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::workloads::{Algorithm, MetricRecord, Workload};

use super::BenchmarkResult;

pub const CSV_HEADER: &str = "workload,algorithm,sf,rep,seconds,prep_seconds,ml_seconds,mean_seconds,stddev_seconds,metric_name,metric_value";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidSpec(format!("unknown format {other:?}"))),
        }
    }
}

/// Renders results in the requested format.
pub fn write_report(results: &[BenchmarkResult], format: ReportFormat) -> Result<String> {
    if results.is_empty() {
        return Err(Error::EmptyInput("benchmark results"));
    }
    Ok(match format {
        ReportFormat::Csv => to_csv(results),
        ReportFormat::Markdown => to_markdown(results),
    })
}

/// CSV fields carry no quoting; free-text error messages drop any commas.
fn sanitize(message: &str) -> String {
    message.replace(',', ";").replace('\n', " ")
}

fn to_csv(results: &[BenchmarkResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in results {
        let prefix = format!("{},{},{}", r.workload, r.algorithm, r.sf);
        match &r.error {
            Some(message) => {
                out.push_str(&format!("{prefix},,,,,,,error,{}\n", sanitize(message)));
            }
            None => {
                for rep in 0..r.rep_seconds.len() {
                    for (name, value) in &r.quality {
                        out.push_str(&format!(
                            "{prefix},{rep},{},{},{},{},{},{name},{value}\n",
                            r.rep_seconds[rep],
                            r.rep_prep_seconds[rep],
                            r.rep_ml_seconds[rep],
                            r.mean_seconds,
                            r.stddev_seconds,
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Parses a CSV report back into result rows (the inverse of the CSV writer).
pub fn parse_report(raw: &str) -> Result<Vec<BenchmarkResult>> {
    let mut lines = raw.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => {
            return Err(Error::MalformedRow {
                file: "report".into(),
                line: 1,
                message: "missing or invalid header".into(),
            })
        }
    }

    // Cells keyed by (workload, algorithm, sf) in first-seen order.
    let mut order: Vec<(Workload, Algorithm, String)> = Vec::new();
    let mut cells: BTreeMap<(Workload, Algorithm, String), BenchmarkResult> = BTreeMap::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let malformed = |message: String| Error::MalformedRow {
            file: "report".into(),
            line: i + 1,
            message,
        };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 11 {
            return Err(malformed(format!("expected 11 columns, found {}", cols.len())));
        }
        let workload: Workload = cols[0].parse()?;
        let algorithm: Algorithm = cols[1].parse()?;
        let sf_raw = cols[2].to_string();
        let sf: f64 = cols[2]
            .parse()
            .map_err(|_| malformed(format!("invalid sf {:?}", cols[2])))?;
        let key = (workload, algorithm, sf_raw);
        let entry = cells.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            BenchmarkResult {
                workload,
                algorithm,
                sf,
                rep_seconds: Vec::new(),
                rep_prep_seconds: Vec::new(),
                rep_ml_seconds: Vec::new(),
                mean_seconds: f64::NAN,
                stddev_seconds: f64::NAN,
                quality: MetricRecord::new(),
                error: None,
            }
        });

        if cols[3].is_empty() {
            // Failure row: metric_name must be "error", message in the value.
            if cols[9] != "error" {
                return Err(malformed("failure row without error metric".into()));
            }
            entry.error = Some(cols[10].to_string());
            continue;
        }
        let rep: usize = cols[3]
            .parse()
            .map_err(|_| malformed(format!("invalid rep {:?}", cols[3])))?;
        let parse_f64 = |raw: &str, what: &str| -> Result<f64> {
            raw.parse()
                .map_err(|_| malformed(format!("invalid {what}: {raw:?}")))
        };
        if rep == entry.rep_seconds.len() {
            entry.rep_seconds.push(parse_f64(cols[4], "seconds")?);
            entry.rep_prep_seconds.push(parse_f64(cols[5], "prep_seconds")?);
            entry.rep_ml_seconds.push(parse_f64(cols[6], "ml_seconds")?);
        }
        entry.mean_seconds = parse_f64(cols[7], "mean_seconds")?;
        entry.stddev_seconds = parse_f64(cols[8], "stddev_seconds")?;
        let value = parse_f64(cols[10], "metric_value")?;
        entry.quality.insert(cols[9].to_string(), value);
    }

    Ok(order
        .into_iter()
        .map(|key| cells.remove(&key).expect("tracked key"))
        .collect())
}

fn to_markdown(results: &[BenchmarkResult]) -> String {
    let mut sfs: Vec<f64> = results.iter().map(|r| r.sf).collect();
    sfs.sort_by(f64::total_cmp);
    sfs.dedup();

    let mut rows: Vec<(Workload, Algorithm)> = results
        .iter()
        .map(|r| (r.workload, r.algorithm))
        .collect();
    rows.sort();
    rows.dedup();

    let mut cells: BTreeMap<(Workload, Algorithm, String), &BenchmarkResult> = BTreeMap::new();
    for r in results {
        cells.insert((r.workload, r.algorithm, r.sf.to_string()), r);
    }

    let mut out = String::from("| workload | algorithm |");
    for sf in &sfs {
        out.push_str(&format!(" sf={sf} |"));
    }
    out.push('\n');
    out.push_str("| --- | --- |");
    for _ in &sfs {
        out.push_str(" --- |");
    }
    out.push('\n');
    for (workload, algorithm) in rows {
        out.push_str(&format!("| {workload} | {algorithm} |"));
        for sf in &sfs {
            let cell = cells.get(&(workload, algorithm, sf.to_string()));
            match cell {
                Some(r) if r.error.is_none() => {
                    out.push_str(&format!(" {:.3} |", r.mean_seconds));
                }
                _ => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    out
}
