//! Eclat: depth-first mining over vertical transaction-id lists.

use crate::error::{Error, Result};

use super::{canonical_sort, count_threshold, validate_min_support, Itemset, TransactionDB};

pub fn eclat(db: &TransactionDB, min_support: f64) -> Result<Vec<Itemset>> {
    validate_min_support(min_support)?;
    if db.is_empty() {
        return Err(Error::EmptyInput("transaction database"));
    }
    let min_count = count_threshold(db.len(), min_support);

    let mut tid_lists: Vec<Vec<u32>> = vec![Vec::new(); db.n_items()];
    for (tid, t) in db.transactions().iter().enumerate() {
        for &item in t {
            tid_lists[item].push(tid as u32);
        }
    }

    let frequent: Vec<(usize, Vec<u32>)> = tid_lists
        .into_iter()
        .enumerate()
        .filter(|(_, tids)| tids.len() >= min_count)
        .collect();

    let mut out = Vec::new();
    for (pos, (item, tids)) in frequent.iter().enumerate() {
        out.push(Itemset {
            items: vec![*item],
            support_count: tids.len(),
        });
        extend(&[*item], tids, &frequent[pos + 1..], min_count, &mut out);
    }
    canonical_sort(&mut out);
    Ok(out)
}

fn extend(
    prefix: &[usize],
    prefix_tids: &[u32],
    tail: &[(usize, Vec<u32>)],
    min_count: usize,
    out: &mut Vec<Itemset>,
) {
    for (pos, (item, item_tids)) in tail.iter().enumerate() {
        let joined = intersect(prefix_tids, item_tids);
        if joined.len() < min_count {
            continue;
        }
        let mut items = prefix.to_vec();
        items.push(*item);
        out.push(Itemset {
            items: items.clone(),
            support_count: joined.len(),
        });
        extend(&items, &joined, &tail[pos + 1..], min_count, out);
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
