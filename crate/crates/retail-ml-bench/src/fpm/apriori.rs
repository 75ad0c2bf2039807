//! Exhaustive level-wise miner used as the correctness oracle for the
//! FP-Growth and Eclat implementations. Deliberately simple: candidate join,
//! subset prune, full transaction scan per level.

use crate::error::{Error, Result};

use super::{canonical_sort, count_threshold, validate_min_support, Itemset, TransactionDB};

const MAX_ORACLE_ITEMS: usize = 20;

pub fn apriori_oracle(db: &TransactionDB, min_support: f64) -> Result<Vec<Itemset>> {
    validate_min_support(min_support)?;
    if db.is_empty() {
        return Err(Error::EmptyInput("transaction database"));
    }
    if db.n_items() > MAX_ORACLE_ITEMS {
        return Err(Error::TooManyItems {
            n_items: db.n_items(),
            limit: MAX_ORACLE_ITEMS,
        });
    }
    let min_count = count_threshold(db.len(), min_support);

    let mut singles = vec![0usize; db.n_items()];
    for t in db.transactions() {
        for &item in t {
            singles[item] += 1;
        }
    }
    let mut level: Vec<Vec<usize>> = (0..db.n_items())
        .filter(|&i| singles[i] >= min_count)
        .map(|i| vec![i])
        .collect();
    let mut out: Vec<Itemset> = level
        .iter()
        .map(|items| Itemset {
            items: items.clone(),
            support_count: singles[items[0]],
        })
        .collect();

    while !level.is_empty() {
        let candidates = join_level(&level);
        let mut next = Vec::new();
        for cand in candidates {
            if !all_proper_subsets_present(&cand, &level) {
                continue;
            }
            let count = db
                .transactions()
                .iter()
                .filter(|t| is_subset(&cand, t))
                .count();
            if count >= min_count {
                out.push(Itemset {
                    items: cand.clone(),
                    support_count: count,
                });
                next.push(cand);
            }
        }
        level = next;
    }

    canonical_sort(&mut out);
    Ok(out)
}

/// Joins sorted k-itemsets sharing their first k-1 items into k+1 candidates.
fn join_level(level: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut candidates = Vec::new();
    for i in 0..level.len() {
        for j in (i + 1)..level.len() {
            let a = &level[i];
            let b = &level[j];
            if a[..a.len() - 1] == b[..b.len() - 1] {
                let mut cand = a.clone();
                let (last_a, last_b) = (a[a.len() - 1], b[b.len() - 1]);
                cand.push(last_a.max(last_b));
                let n = cand.len();
                cand[n - 2] = last_a.min(last_b);
                candidates.push(cand);
            }
        }
    }
    candidates
}

fn all_proper_subsets_present(cand: &[usize], level: &[Vec<usize>]) -> bool {
    (0..cand.len()).all(|skip| {
        let subset: Vec<usize> = cand
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &v)| v)
            .collect();
        level.binary_search(&subset).is_ok()
    })
}

/// Subset test over two strictly increasing slices.
pub(crate) fn is_subset(needle: &[usize], haystack: &[usize]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}
