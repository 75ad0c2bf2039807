//! Command-line interface: dataset generation, benchmark execution, and
//! report rendering.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use retail_ml_bench::datagen::{generate, size_plan, GenConfig};
use retail_ml_bench::harness::report::{parse_report, write_report, ReportFormat};
use retail_ml_bench::harness::{run_plan, BenchPlan};
use retail_ml_bench::workloads::{Algorithm, Params, Workload, WorkloadSpec};

/// Environment variable overriding `--data-dir`.
const DATA_DIR_ENV: &str = "RETAIL_ML_BENCH_DATA";

#[derive(Parser)]
#[command(
    name = "retail-ml-bench",
    about = "Retail analytics ML benchmark: synthetic data, native algorithms, timed workloads",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic retail dataset.
    Datagen(DatagenArgs),
    /// Run benchmark cells and emit a results report.
    Run(RunArgs),
    /// Re-render a results CSV in another format.
    Report(ReportArgs),
}

#[derive(Args)]
struct DatagenArgs {
    /// Scale factor controlling all row counts.
    #[arg(long)]
    sf: f64,
    /// Seed for every random choice in the dataset.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for the dataset files.
    #[arg(long)]
    out: PathBuf,
    /// Planted customer segments.
    #[arg(long, default_value_t = 4)]
    n_segments: usize,
    /// Book categories customers shop from.
    #[arg(long, default_value_t = 5)]
    n_book_categories: usize,
    /// Planted co-purchase bundles.
    #[arg(long, default_value_t = 5)]
    n_bundles: usize,
    /// Products per bundle.
    #[arg(long, default_value_t = 3)]
    bundle_size: usize,
    /// Fraction of review tokens drawn from the sentiment pools.
    #[arg(long, default_value_t = 0.6)]
    sentiment_signal: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Workloads to run (q26, q28, m1, m2, m3); default all.
    #[arg(long = "workload")]
    workloads: Vec<String>,
    /// Algorithms to run; default every algorithm valid for the workload.
    #[arg(long = "algorithm")]
    algorithms: Vec<String>,
    /// Scale factors, repeatable.
    #[arg(long = "sf", default_values_t = [0.01])]
    sfs: Vec<f64>,
    /// Timed repetitions per cell.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Seed for data generation and workload randomness.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Dataset cache directory (one subdirectory per scale factor).
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    /// Generate datasets even when cached ones exist.
    #[arg(long, default_value_t = false)]
    regenerate: bool,
    /// Report format for stdout / --out.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Workload parameter overrides as key=value, repeatable.
    #[arg(long = "param")]
    params: Vec<String>,
    /// Emit per-cell artifact summaries (JSON) into this directory.
    #[arg(long)]
    emit_artifacts: Option<PathBuf>,
    /// Run cells concurrently. Timings of concurrent cells contend for the
    /// machine and are not comparable across cells.
    #[arg(long, default_value_t = false)]
    concurrent: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Results CSV produced by `run`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Target format.
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_FAILED_CELL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Datagen(args) => datagen_command(args),
        Command::Run(args) => run_command(args),
        Command::Report(args) => report_command(args),
    }
}

fn datagen_command(args: DatagenArgs) -> ExitCode {
    let cfg = GenConfig {
        sf: args.sf,
        seed: args.seed,
        n_segments: args.n_segments,
        n_book_categories: args.n_book_categories,
        n_bundles: args.n_bundles,
        bundle_size: args.bundle_size,
        sentiment_signal: args.sentiment_signal,
        output_dir: args.out,
    };
    let plan = size_plan(&cfg);
    match generate(&cfg) {
        Ok(_) => {
            println!(
                "wrote {} customers, {} products, {} sales, {} reviews, {} weblog events to {}",
                plan.customers,
                plan.products,
                plan.sales,
                plan.reviews,
                plan.weblog_events,
                cfg.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILED_CELL)
        }
    }
}

fn parse_params(raw: &[String]) -> Result<Params, String> {
    let mut params = Params::new();
    for item in raw {
        let Some((key, value)) = item.split_once('=') else {
            return Err(format!("--param expects key=value, got {item:?}"));
        };
        params.set(key, value);
    }
    Ok(params)
}

/// Expands --workload/--algorithm selections into concrete cells.
fn resolve_specs(args: &RunArgs, params: &Params) -> Result<Vec<WorkloadSpec>, String> {
    let workloads: Vec<Workload> = if args.workloads.is_empty() {
        Workload::ALL.to_vec()
    } else {
        args.workloads
            .iter()
            .map(|w| w.parse().map_err(|e| format!("--workload: {e}")))
            .collect::<Result<_, String>>()?
    };
    let algorithms: Option<Vec<Algorithm>> = if args.algorithms.is_empty() {
        None
    } else {
        Some(
            args.algorithms
                .iter()
                .map(|a| a.parse().map_err(|e| format!("--algorithm: {e}")))
                .collect::<Result<_, String>>()?,
        )
    };

    let mut specs = Vec::new();
    for &workload in &workloads {
        let valid = workload.algorithms();
        match &algorithms {
            None => {
                for &algorithm in valid {
                    let mut spec = WorkloadSpec::new(workload, algorithm, args.seed);
                    spec.params = params.clone();
                    specs.push(spec);
                }
            }
            Some(selected) => {
                for &algorithm in selected {
                    if valid.contains(&algorithm) {
                        let mut spec = WorkloadSpec::new(workload, algorithm, args.seed);
                        spec.params = params.clone();
                        specs.push(spec);
                    }
                }
            }
        }
    }
    if specs.is_empty() {
        return Err(format!(
            "--algorithm {:?} is not valid for --workload {:?}",
            args.algorithms, args.workloads
        ));
    }
    Ok(specs)
}

fn run_command(args: RunArgs) -> ExitCode {
    let params = match parse_params(&args.params) {
        Ok(p) => p,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let specs = match resolve_specs(&args, &params) {
        Ok(s) => s,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let format: ReportFormat = match args.format.parse() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: --format: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let data_dir = std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or(args.data_dir);

    let plan = BenchPlan {
        specs,
        sfs: args.sfs,
        reps: args.reps,
        seed: args.seed,
        data_dir,
        regenerate: args.regenerate,
        concurrent: args.concurrent,
        artifact_dir: args.emit_artifacts,
    };
    let results = match run_plan(&plan) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILED_CELL);
        }
    };
    let rendered = match write_report(&results, format) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILED_CELL);
        }
    };
    if let Err(e) = emit(&rendered, args.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILED_CELL);
    }
    for r in results.iter().filter(|r| r.is_failure()) {
        eprintln!(
            "cell failed: {} {} sf={}: {}",
            r.workload,
            r.algorithm,
            r.sf,
            r.error.as_deref().unwrap_or("")
        );
    }
    if results.iter().any(|r| r.is_failure()) {
        ExitCode::from(EXIT_FAILED_CELL)
    } else {
        ExitCode::SUCCESS
    }
}

fn report_command(args: ReportArgs) -> ExitCode {
    let format: ReportFormat = match args.format.parse() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: --format: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let raw = match std::fs::read_to_string(&args.input) {
        Ok(raw) => raw,
        Err(e) => {
            eprintln!("error: {}: {e}", args.input.display());
            return ExitCode::from(EXIT_FAILED_CELL);
        }
    };
    let results = match parse_report(&raw) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILED_CELL);
        }
    };
    let rendered = match write_report(&results, format) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILED_CELL);
        }
    };
    if let Err(e) = emit(&rendered, args.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILED_CELL);
    }
    ExitCode::SUCCESS
}

fn emit(rendered: &str, out: Option<&std::path::Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}
