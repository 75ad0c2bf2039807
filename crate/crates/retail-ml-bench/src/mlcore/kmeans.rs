//! K-means clustering: k-means++ seeding followed by Lloyd iterations.

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::Prng;

use super::{squared_distance, DenseMatrix, IterConfig};

#[derive(Debug, Clone, Serialize)]
pub struct KMeansModel {
    pub centroids: DenseMatrix,
    /// Sum of squared distances of the training points to their centroid.
    pub inertia: f64,
    pub n_iter: usize,
    /// Inertia after each assignment step, nonincreasing.
    pub inertia_trace: Vec<f64>,
}

/// Index of the nearest centroid for each point; ties go to the lowest index.
pub fn kmeans_assign(model: &KMeansModel, points: &DenseMatrix) -> Result<Vec<usize>> {
    if points.n_cols() != model.centroids.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: model.centroids.n_cols(),
            actual: points.n_cols(),
        });
    }
    Ok(assign(points, &model.centroids).0)
}

fn assign(points: &DenseMatrix, centroids: &DenseMatrix) -> (Vec<usize>, f64) {
    let mut labels = Vec::with_capacity(points.n_rows());
    let mut inertia = 0.0;
    for r in 0..points.n_rows() {
        let point = points.row(r);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..centroids.n_rows() {
            let d = squared_distance(point, centroids.row(c));
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        labels.push(best);
        inertia += best_d;
    }
    (labels, inertia)
}

/// k-means++ seeding: D^2-weighted sampling of initial centroids.
fn plus_plus_init(points: &DenseMatrix, k: usize, rng: &mut Prng) -> DenseMatrix {
    let n = points.n_rows();
    let d = points.n_cols();
    let mut centroids = DenseMatrix::zeros(k, d);
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).copy_from_slice(points.row(first));

    let mut dist2: Vec<f64> = (0..n)
        .map(|r| squared_distance(points.row(r), centroids.row(0)))
        .collect();
    for c in 1..k {
        let total: f64 = dist2.iter().sum();
        let chosen = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (r, &w) in dist2.iter().enumerate() {
                if target < w {
                    pick = r;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centroids.row_mut(c).copy_from_slice(points.row(chosen));
        for r in 0..n {
            let d2 = squared_distance(points.row(r), centroids.row(c));
            if d2 < dist2[r] {
                dist2[r] = d2;
            }
        }
    }
    centroids
}

/// Restarts drawn from the seeded stream; the fit with the lowest final
/// inertia is returned.
const N_INIT: usize = 10;

/// Lloyd's algorithm with k-means++ initialization, best of [`N_INIT`]
/// deterministic restarts.
///
/// Each restart stops when the relative inertia improvement drops below
/// `cfg.tol` or after `cfg.max_iter` assignment steps. An empty cluster is
/// re-seeded to the point currently farthest from its own centroid.
pub fn fit_kmeans(points: &DenseMatrix, k: usize, cfg: &IterConfig) -> Result<KMeansModel> {
    cfg.validate()?;
    let n = points.n_rows();
    if k < 1 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    if k > n {
        return Err(Error::KExceedsSamples { k, n });
    }

    let mut rng = Prng::seed_from_u64(cfg.seed);
    let mut best: Option<KMeansModel> = None;
    for _ in 0..N_INIT {
        let model = lloyd_once(points, k, cfg, &mut rng);
        if best.as_ref().map_or(true, |b| model.inertia < b.inertia) {
            best = Some(model);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn lloyd_once(points: &DenseMatrix, k: usize, cfg: &IterConfig, rng: &mut Prng) -> KMeansModel {
    let n = points.n_rows();
    let mut centroids = plus_plus_init(points, k, rng);
    let mut trace = Vec::new();
    let mut labels;
    let mut inertia;
    let mut prev = f64::INFINITY;
    let mut n_iter = 0;

    loop {
        let (l, i) = assign(points, &centroids);
        labels = l;
        inertia = i;
        trace.push(inertia);
        n_iter += 1;

        let converged = prev.is_finite() && {
            let improvement = if prev > 0.0 { (prev - inertia) / prev } else { 0.0 };
            improvement < cfg.tol
        };
        if converged || n_iter >= cfg.max_iter {
            break;
        }
        prev = inertia;

        // Recompute centroids as cluster means.
        let d = points.n_cols();
        let mut sums = DenseMatrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for (r, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            let row = points.row(r);
            let sum = sums.row_mut(c);
            for (s, &v) in sum.iter_mut().zip(row) {
                *s += v;
            }
        }
        let mut claimed = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                let sum = sums.row_mut(c);
                for s in sum.iter_mut() {
                    *s /= counts[c] as f64;
                }
                centroids.row_mut(c).copy_from_slice(sum);
            } else {
                // Re-seed to the unclaimed point farthest from its centroid.
                let mut far = 0;
                let mut far_d = f64::NEG_INFINITY;
                for r in 0..n {
                    if claimed[r] {
                        continue;
                    }
                    let d2 = squared_distance(points.row(r), centroids.row(labels[r]));
                    if d2 > far_d {
                        far_d = d2;
                        far = r;
                    }
                }
                claimed[far] = true;
                centroids.row_mut(c).copy_from_slice(points.row(far));
            }
        }
    }

    KMeansModel {
        centroids,
        inertia,
        n_iter,
        inertia_trace: trace,
    }
}
