//! M1: market-basket mining. Baskets are sale lines grouped by
//! (customer, day); the chosen miner runs at `min_support`, reported itemsets
//! are filtered to `min_size`, and rules are generated at `min_confidence`.

use std::collections::{BTreeMap, BTreeSet};

use crate::datagen::RetailDataset;
use crate::error::{Error, Result};
use crate::fpm::{
    association_rules, eclat, fp_growth, frequent_pairs_baseline, Itemset, TransactionDB,
};

use super::{Algorithm, ArtifactSummary, MetricRecord, StageTimer, WorkloadOutput, WorkloadSpec};

/// Deduplicated baskets in (customer, day) order.
pub fn prepare_baskets(ds: &RetailDataset) -> Result<TransactionDB> {
    let mut baskets: BTreeMap<(usize, u32), BTreeSet<usize>> = BTreeMap::new();
    for sale in &ds.sales {
        baskets
            .entry((sale.customer_id, sale.day))
            .or_default()
            .insert(sale.product_id);
    }
    if baskets.is_empty() {
        return Err(Error::EmptyInput("basket set"));
    }
    let transactions: Vec<Vec<usize>> = baskets
        .into_values()
        .map(|set| set.into_iter().collect())
        .collect();
    TransactionDB::new(transactions)
}

/// Fraction of planted bundles that appear among the mined frequent itemsets.
fn bundle_recall(ds: &RetailDataset, mined: &[Itemset]) -> Option<f64> {
    let bundles = ds.bundles();
    if bundles.is_empty() {
        return None;
    }
    let mined_sets: BTreeSet<&[usize]> = mined.iter().map(|s| s.items.as_slice()).collect();
    let hits = bundles
        .iter()
        .filter(|b| mined_sets.contains(b.as_slice()))
        .count();
    Some(hits as f64 / bundles.len() as f64)
}

pub(super) fn run(ds: &RetailDataset, spec: &WorkloadSpec) -> Result<WorkloadOutput> {
    let mut timer = StageTimer::start();
    let db = prepare_baskets(ds)?;
    let prep_seconds = timer.lap();

    let min_support = spec.params.get_f64("min_support", 0.01)?;
    let min_size = spec.params.get_usize("min_size", 3)?;
    let min_confidence = spec.params.get_f64("min_confidence", 0.5)?;

    let mined = match spec.algorithm {
        Algorithm::FpGrowth => fp_growth(&db, min_support)?,
        Algorithm::Eclat => eclat(&db, min_support)?,
        Algorithm::PairsBaseline => frequent_pairs_baseline(&db, min_support)?,
        other => {
            return Err(Error::InvalidSpec(format!(
                "m1 cannot run algorithm {other}"
            )))
        }
    };

    // The baseline reports pairs as-is; the miners report itemsets of at
    // least `min_size` items. Rules come from the full subset-closed result,
    // restricted to rules over qualifying itemsets.
    let (reported, rules) = if spec.algorithm == Algorithm::PairsBaseline {
        (mined.clone(), Vec::new())
    } else {
        let reported: Vec<Itemset> = mined
            .iter()
            .filter(|s| s.items.len() >= min_size)
            .cloned()
            .collect();
        let rules = association_rules(&mined, db.len(), min_confidence)?
            .into_iter()
            .filter(|r| r.size() >= min_size)
            .collect();
        (reported, rules)
    };

    let mut quality = MetricRecord::new();
    quality.insert("basket_count".into(), db.len() as f64);
    quality.insert("itemset_count".into(), reported.len() as f64);
    quality.insert("rule_count".into(), rules.len() as f64);
    if let Some(recall) = bundle_recall(ds, &mined) {
        quality.insert("bundle_recall".into(), recall);
    }
    let ml_seconds = timer.lap();

    Ok(WorkloadOutput {
        prep_seconds,
        ml_seconds,
        quality,
        artifact: ArtifactSummary::Itemsets {
            itemsets: reported,
            rules,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, GenConfig};
    use crate::workloads::{Workload, WorkloadSpec};

    #[test]
    fn baskets_group_by_customer_and_day_without_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let ds = generate(&GenConfig::new(0.02, 5, dir.path())).unwrap();
        let db = prepare_baskets(&ds).unwrap();
        let total_items: usize = db.transactions().iter().map(|t| t.len()).sum();
        assert!(total_items <= ds.sales.len());
        for t in db.transactions() {
            assert!(t.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn miners_agree_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        let ds = generate(&GenConfig::new(0.05, 5, dir.path())).unwrap();
        let fp = run(&ds, &WorkloadSpec::new(Workload::M1, Algorithm::FpGrowth, 1)).unwrap();
        let ec = run(&ds, &WorkloadSpec::new(Workload::M1, Algorithm::Eclat, 1)).unwrap();
        assert_eq!(fp.quality, ec.quality);
        assert_eq!(fp.artifact, ec.artifact);
    }

    #[test]
    fn pairs_baseline_matches_miner_size_two_slice() {
        let dir = tempfile::tempdir().unwrap();
        let ds = generate(&GenConfig::new(0.02, 5, dir.path())).unwrap();
        let db = prepare_baskets(&ds).unwrap();
        let pairs = frequent_pairs_baseline(&db, 0.01).unwrap();
        let slice: Vec<Itemset> = fp_growth(&db, 0.01)
            .unwrap()
            .into_iter()
            .filter(|s| s.items.len() == 2)
            .collect();
        assert_eq!(pairs, slice);
    }

    #[test]
    fn empty_sales_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut ds = generate(&GenConfig::new(0.01, 5, dir.path())).unwrap();
        ds.sales.clear();
        assert!(matches!(prepare_baskets(&ds), Err(Error::EmptyInput(_))));
    }
}
