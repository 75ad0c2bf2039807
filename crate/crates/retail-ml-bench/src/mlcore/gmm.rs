//! Gaussian mixture model with diagonal covariance, fitted by EM in log space.

use serde::Serialize;

use crate::error::{Error, Result};

use super::{fit_kmeans, kmeans_assign, logsumexp, DenseMatrix, IterConfig};

/// Lower bound applied to every variance after each M-step.
pub const VARIANCE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct GmmModel {
    pub weights: Vec<f64>,
    pub means: DenseMatrix,
    pub diag_variances: DenseMatrix,
    /// Mean per-point log-likelihood under the stored parameters.
    pub final_log_likelihood: f64,
    pub n_iter: usize,
    /// Mean log-likelihood after each E-step, nondecreasing within 1e-9.
    pub log_likelihood_trace: Vec<f64>,
}

fn log_density_row(point: &[f64], mean: &[f64], var: &[f64]) -> f64 {
    let mut acc = 0.0;
    for ((&x, &m), &v) in point.iter().zip(mean).zip(var) {
        let d = x - m;
        acc += -0.5 * ((2.0 * std::f64::consts::PI * v).ln() + d * d / v);
    }
    acc
}

/// Log joint per component, then normalized responsibilities and per-point
/// log-likelihood; all in log space to avoid underflow.
fn e_step(
    points: &DenseMatrix,
    weights: &[f64],
    means: &DenseMatrix,
    variances: &DenseMatrix,
) -> (DenseMatrix, f64) {
    let n = points.n_rows();
    let k = weights.len();
    let mut resp = DenseMatrix::zeros(n, k);
    let mut total_ll = 0.0;
    let log_weights: Vec<f64> = weights.iter().map(|w| w.max(1e-300).ln()).collect();
    for r in 0..n {
        let row = resp.row_mut(r);
        for c in 0..k {
            row[c] = log_weights[c] + log_density_row(points.row(r), means.row(c), variances.row(c));
        }
        let lse = logsumexp(row);
        total_ll += lse;
        for v in row.iter_mut() {
            *v = (*v - lse).exp();
        }
    }
    (resp, total_ll / n as f64)
}

/// Diagonal-covariance EM initialized from a k-means fit with the same seed.
pub fn fit_gmm(points: &DenseMatrix, k: usize, cfg: &IterConfig) -> Result<GmmModel> {
    cfg.validate()?;
    let n = points.n_rows();
    let d = points.n_cols();
    if k < 1 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    if k > n {
        return Err(Error::KExceedsSamples { k, n });
    }

    // Initialization: k-means centroids, per-cluster variances and weights.
    let km = fit_kmeans(points, k, cfg)?;
    let labels = kmeans_assign(&km, points)?;
    let mut means = km.centroids;
    let mut weights = vec![0.0; k];
    let mut variances = DenseMatrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for (r, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        let point = points.row(r);
        let mean = means.row(c);
        let var = variances.row_mut(c);
        for j in 0..d {
            let diff = point[j] - mean[j];
            var[j] += diff * diff;
        }
    }
    let global_var: Vec<f64> = {
        let mut mean = vec![0.0; d];
        for r in 0..n {
            for (m, &v) in mean.iter_mut().zip(points.row(r)) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= n as f64;
        }
        let mut var = vec![0.0; d];
        for r in 0..n {
            for (j, v) in var.iter_mut().enumerate() {
                let diff = points.get(r, j) - mean[j];
                *v += diff * diff;
            }
        }
        var.iter().map(|v| (v / n as f64).max(VARIANCE_FLOOR)).collect()
    };
    for c in 0..k {
        weights[c] = (counts[c] as f64 / n as f64).max(1e-10);
        let var = variances.row_mut(c);
        if counts[c] > 0 {
            for v in var.iter_mut() {
                *v = (*v / counts[c] as f64).max(VARIANCE_FLOOR);
            }
        } else {
            var.copy_from_slice(&global_var);
        }
    }
    let weight_sum: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= weight_sum;
    }

    let mut trace = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    let mut n_iter = 0;
    let mut mean_ll;

    loop {
        let (resp, ll) = e_step(points, &weights, &means, &variances);
        mean_ll = ll;
        trace.push(ll);
        n_iter += 1;

        let converged = prev.is_finite() && (ll - prev) < cfg.tol;
        if converged || n_iter >= cfg.max_iter {
            break;
        }
        prev = ll;

        // M-step: weighted means and variances with the floor applied.
        for c in 0..k {
            let mut nk = 0.0;
            for r in 0..n {
                nk += resp.get(r, c);
            }
            let nk_safe = nk.max(1e-12);
            weights[c] = nk / n as f64;

            let mean = means.row_mut(c);
            mean.fill(0.0);
            for r in 0..n {
                let w = resp.get(r, c);
                for (m, &v) in mean.iter_mut().zip(points.row(r)) {
                    *m += w * v;
                }
            }
            for m in mean.iter_mut() {
                *m /= nk_safe;
            }

            let mut acc = vec![0.0; d];
            for r in 0..n {
                let w = resp.get(r, c);
                let point = points.row(r);
                for (j, a) in acc.iter_mut().enumerate() {
                    let diff = point[j] - means.get(c, j);
                    *a += w * diff * diff;
                }
            }
            let var = variances.row_mut(c);
            for (v, a) in var.iter_mut().zip(&acc) {
                *v = (a / nk_safe).max(VARIANCE_FLOOR);
            }
        }
    }

    Ok(GmmModel {
        weights,
        means,
        diag_variances: variances,
        final_log_likelihood: mean_ll,
        n_iter,
        log_likelihood_trace: trace,
    })
}

/// Row-stochastic matrix of component responsibilities for `points`.
pub fn gmm_responsibilities(model: &GmmModel, points: &DenseMatrix) -> Result<DenseMatrix> {
    if points.n_cols() != model.means.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: model.means.n_cols(),
            actual: points.n_cols(),
        });
    }
    let (resp, _) = e_step(points, &model.weights, &model.means, &model.diag_variances);
    Ok(resp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    use crate::rng::Prng;

    fn cfg(seed: u64) -> IterConfig {
        IterConfig {
            seed,
            ..IterConfig::default()
        }
    }

    #[test]
    fn k1_recovers_sample_mean_and_variance() {
        let points = DenseMatrix::from_rows(vec![vec![1.0], vec![2.0], vec![3.0], vec![6.0]]);
        let model = fit_gmm(&points, 1, &cfg(0)).unwrap();
        assert!((model.means.get(0, 0) - 3.0).abs() < 1e-9);
        let expected_var = (4.0 + 1.0 + 0.0 + 9.0) / 4.0;
        assert!((model.diag_variances.get(0, 0) - expected_var).abs() < 1e-9);
        assert!((model.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_blobs_recover_balanced_weights() {
        let mut rng = Prng::seed_from_u64(5);
        let mut rows = Vec::new();
        for _ in 0..50 {
            rows.push(vec![rng.gen::<f64>() - 0.5]);
        }
        for _ in 0..50 {
            rows.push(vec![20.0 + rng.gen::<f64>() - 0.5]);
        }
        let points = DenseMatrix::from_rows(rows);
        let model = fit_gmm(&points, 2, &cfg(9)).unwrap();
        assert!((model.weights[0] - 0.5).abs() < 0.1, "{:?}", model.weights);
        assert!((model.weights[1] - 0.5).abs() < 0.1);
    }

    #[test]
    fn log_likelihood_trace_is_nondecreasing() {
        let mut rng = Prng::seed_from_u64(31);
        let rows: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..2).map(|_| rng.gen::<f64>() * 3.0).collect())
            .collect();
        let points = DenseMatrix::from_rows(rows);
        let model = fit_gmm(&points, 3, &cfg(8)).unwrap();
        for w in model.log_likelihood_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "trace decreased: {w:?}");
        }
        assert_eq!(*model.log_likelihood_trace.last().unwrap(), model.final_log_likelihood);
    }

    #[test]
    fn responsibilities_are_row_stochastic() {
        let mut rng = Prng::seed_from_u64(13);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..3).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let points = DenseMatrix::from_rows(rows);
        let model = fit_gmm(&points, 4, &cfg(14)).unwrap();
        let resp = gmm_responsibilities(&model, &points).unwrap();
        for r in 0..resp.n_rows() {
            let sum: f64 = resp.row(r).iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "row {r} sums to {sum}");
        }
        let weight_sum: f64 = model.weights.iter().sum();
        assert!((weight_sum - 1.0).abs() < 1e-9);
        assert!(model.diag_variances.data().iter().all(|&v| v >= VARIANCE_FLOOR));
    }

    #[test]
    fn point_at_tight_component_mean_gets_total_responsibility() {
        let model = GmmModel {
            weights: vec![0.5, 0.5],
            means: DenseMatrix::from_rows(vec![vec![0.0], vec![5.0]]),
            diag_variances: DenseMatrix::from_rows(vec![vec![1e-4], vec![1.0]]),
            final_log_likelihood: 0.0,
            n_iter: 0,
            log_likelihood_trace: vec![],
        };
        let points = DenseMatrix::from_rows(vec![vec![0.0]]);
        let resp = gmm_responsibilities(&model, &points).unwrap();
        assert!(resp.get(0, 0) > 0.99, "{}", resp.get(0, 0));
    }

    #[test]
    fn identical_components_share_responsibility_by_weight() {
        let model = GmmModel {
            weights: vec![0.3, 0.7],
            means: DenseMatrix::from_rows(vec![vec![1.0], vec![1.0]]),
            diag_variances: DenseMatrix::from_rows(vec![vec![2.0], vec![2.0]]),
            final_log_likelihood: 0.0,
            n_iter: 0,
            log_likelihood_trace: vec![],
        };
        let points = DenseMatrix::from_rows(vec![vec![-3.0], vec![4.0]]);
        let resp = gmm_responsibilities(&model, &points).unwrap();
        for r in 0..2 {
            assert!((resp.get(r, 0) - 0.3).abs() < 1e-12);
            assert!((resp.get(r, 1) - 0.7).abs() < 1e-12);
        }
    }
}
