//! Scratch validation of planted-structure recovery at sf = 0.1, seed 42.

use retail_ml_bench::datagen::{generate, GenConfig};
use retail_ml_bench::workloads::{run, Algorithm, Workload, WorkloadSpec};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GenConfig::new(0.1, 42, dir.path());
    let t0 = std::time::Instant::now();
    let ds = generate(&cfg).unwrap();
    println!("generate: {:?}", t0.elapsed());

    let mut q26 = WorkloadSpec::new(Workload::Q26, Algorithm::KMeans, 42);
    q26.params.set("k", cfg.n_segments);
    let t = std::time::Instant::now();
    let out = run(&ds, &q26).unwrap();
    println!("q26 kmeans {:?}: {:?}", t.elapsed(), out.quality);

    let mut q26g = WorkloadSpec::new(Workload::Q26, Algorithm::Gmm, 42);
    q26g.params.set("k", cfg.n_segments);
    let out = run(&ds, &q26g).unwrap();
    println!("q26 gmm: {:?}", out.quality);

    let q28 = WorkloadSpec::new(Workload::Q28, Algorithm::NaiveBayes, 42);
    let t = std::time::Instant::now();
    let out = run(&ds, &q28).unwrap();
    println!("q28 nb {:?}: {:?}", t.elapsed(), out.quality);

    let m1 = WorkloadSpec::new(Workload::M1, Algorithm::FpGrowth, 42);
    let t = std::time::Instant::now();
    let out = run(&ds, &m1).unwrap();
    println!("m1 fp {:?}: {:?}", t.elapsed(), out.quality);

    let m2 = WorkloadSpec::new(Workload::M2, Algorithm::Lda, 42);
    let t = std::time::Instant::now();
    let out = run(&ds, &m2).unwrap();
    println!("m2 lda {:?}: {:?}", t.elapsed(), out.quality);

    let m3 = WorkloadSpec::new(Workload::M3, Algorithm::DecisionTree, 42);
    let t = std::time::Instant::now();
    let out = run(&ds, &m3).unwrap();
    println!("m3 tree {:?}: {:?}", t.elapsed(), out.quality);
}
