//! Q26: cluster customers by their in-store book purchasing history.

use crate::datagen::{Channel, RetailDataset};
use crate::error::{Error, Result};
use crate::mlcore::{
    adjusted_rand_index, argmax, fit_gmm, fit_kmeans, gmm_responsibilities, kmeans_assign,
    DenseMatrix,
};

use super::{Algorithm, ArtifactSummary, MetricRecord, StageTimer, WorkloadOutput, WorkloadSpec};

/// Feature table: one row per customer with at least one store-channel book
/// purchase; columns are book categories. Values are purchase counts, or
/// quantity-weighted spend when `features=spend`. Returns (features,
/// qualifying customer ids, their latent segments).
pub fn prepare_q26(
    ds: &RetailDataset,
    params: &super::Params,
) -> Result<(DenseMatrix, Vec<usize>, Vec<usize>)> {
    let spend = matches!(params.get_str("features"), Some("spend"));
    let n_book_categories = ds
        .products
        .iter()
        .filter_map(|p| p.book_category_id)
        .max()
        .map_or(0, |m| m + 1);
    if n_book_categories == 0 {
        return Err(Error::NoQualifyingCustomers);
    }

    let mut acc = vec![vec![0.0f64; n_book_categories]; ds.customers.len()];
    for sale in &ds.sales {
        if sale.channel != Channel::Store {
            continue;
        }
        let product = &ds.products[sale.product_id];
        let Some(book_cat) = product.book_category_id else {
            continue;
        };
        acc[sale.customer_id][book_cat] += if spend {
            sale.quantity as f64 * product.unit_price
        } else {
            1.0
        };
    }

    let mut rows = Vec::new();
    let mut customer_ids = Vec::new();
    let mut segments = Vec::new();
    for (customer_id, row) in acc.into_iter().enumerate() {
        if row.iter().sum::<f64>() > 0.0 {
            rows.push(row);
            customer_ids.push(customer_id);
            segments.push(ds.customers[customer_id].segment_id);
        }
    }
    if rows.is_empty() {
        return Err(Error::NoQualifyingCustomers);
    }
    Ok((DenseMatrix::from_rows(rows), customer_ids, segments))
}

pub(super) fn run(ds: &RetailDataset, spec: &WorkloadSpec) -> Result<WorkloadOutput> {
    let mut timer = StageTimer::start();
    let (features, customer_ids, segments) = prepare_q26(ds, &spec.params)?;
    let prep_seconds = timer.lap();

    let k = spec.params.get_usize("k", 8)?;
    let cfg = spec.iter_config()?;
    let mut quality = MetricRecord::new();
    let assignments = match spec.algorithm {
        Algorithm::KMeans => {
            let model = fit_kmeans(&features, k, &cfg)?;
            let assign = kmeans_assign(&model, &features)?;
            quality.insert("inertia".into(), model.inertia);
            quality.insert("n_iter".into(), model.n_iter as f64);
            assign
        }
        Algorithm::Gmm => {
            let model = fit_gmm(&features, k, &cfg)?;
            let resp = gmm_responsibilities(&model, &features)?;
            quality.insert("log_likelihood".into(), model.final_log_likelihood);
            quality.insert("n_iter".into(), model.n_iter as f64);
            (0..resp.n_rows()).map(|r| argmax(resp.row(r))).collect()
        }
        other => {
            return Err(Error::InvalidSpec(format!(
                "q26 cannot run algorithm {other}"
            )))
        }
    };

    let ari = adjusted_rand_index(&assignments, &segments);
    quality.insert("ari".into(), ari);
    quality.insert("clustered_customers".into(), customer_ids.len() as f64);

    let mut cluster_sizes = vec![0usize; k];
    for &a in &assignments {
        cluster_sizes[a] += 1;
    }
    let ml_seconds = timer.lap();
    Ok(WorkloadOutput {
        prep_seconds,
        ml_seconds,
        quality,
        artifact: ArtifactSummary::Clustering {
            cluster_sizes,
            assignments: customer_ids.into_iter().zip(assignments).collect(),
        },
    })
}
