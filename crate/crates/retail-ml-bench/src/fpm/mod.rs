//! Frequent-itemset mining: FP-Growth and Eclat miners with an exhaustive
//! Apriori oracle, association-rule generation, and a pairs-only baseline.
//!
//! All miners share one result contract: exactly the itemsets whose support
//! meets `min_support`, canonically ordered by (size, lexicographic item ids).

mod apriori;
mod eclat;
mod fp_growth;
mod rules;

pub use apriori::apriori_oracle;
pub use eclat::eclat;
pub use fp_growth::fp_growth;
pub use rules::{association_rules, AssociationRule};

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// A list of transactions over dense integer item ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionDB {
    transactions: Vec<Vec<usize>>,
    n_items: usize,
}

impl TransactionDB {
    /// Wraps transactions whose items are already strictly increasing.
    pub fn new(transactions: Vec<Vec<usize>>) -> Result<Self> {
        let mut n_items = 0;
        for (i, t) in transactions.iter().enumerate() {
            if !t.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidConfig(format!(
                    "transaction {i} is not strictly increasing"
                )));
            }
            if let Some(&max) = t.last() {
                n_items = n_items.max(max + 1);
            }
        }
        Ok(TransactionDB {
            transactions,
            n_items,
        })
    }

    /// Builds a database from arbitrary item lists, sorting and deduplicating.
    pub fn from_unsorted(transactions: Vec<Vec<usize>>) -> Self {
        let cleaned = transactions
            .into_iter()
            .map(|t| {
                let set: BTreeSet<usize> = t.into_iter().collect();
                set.into_iter().collect()
            })
            .collect();
        TransactionDB::new(cleaned).expect("sorted deduplicated transactions are valid")
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn transactions(&self) -> &[Vec<usize>] {
        &self.transactions
    }

    /// Reads the interchange format: one transaction per line, space-separated ids.
    pub fn read_path(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let name = path.display().to_string();
        let mut transactions = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut items = Vec::new();
            for token in line.split_whitespace() {
                let id: usize = token.parse().map_err(|_| Error::MalformedRow {
                    file: name.clone(),
                    line: lineno + 1,
                    message: format!("invalid item id {token:?}"),
                })?;
                items.push(id);
            }
            items.sort_unstable();
            items.dedup();
            transactions.push(items);
        }
        TransactionDB::new(transactions)
    }

    /// Writes the interchange format.
    pub fn write_path(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for t in &self.transactions {
            let line: Vec<String> = t.iter().map(|i| i.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// A frequent itemset together with its absolute support count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Itemset {
    pub items: Vec<usize>,
    pub support_count: usize,
}

impl Itemset {
    pub fn support(&self, db_size: usize) -> f64 {
        self.support_count as f64 / db_size as f64
    }
}

/// Absolute count threshold for a relative support on `n` transactions.
pub(crate) fn count_threshold(n: usize, min_support: f64) -> usize {
    ((min_support * n as f64).ceil() as usize).max(1)
}

pub(crate) fn validate_min_support(min_support: f64) -> Result<()> {
    if !(min_support > 0.0 && min_support <= 1.0) {
        return Err(Error::MinSupportOutOfRange(min_support));
    }
    Ok(())
}

/// Sorts itemsets into the canonical output order: size, then item ids.
pub(crate) fn canonical_sort(itemsets: &mut Vec<Itemset>) {
    itemsets.sort_by(|a, b| a.items.len().cmp(&b.items.len()).then_with(|| a.items.cmp(&b.items)));
}

/// Frequent itemsets of size exactly 2, by direct pair counting.
pub fn frequent_pairs_baseline(db: &TransactionDB, min_support: f64) -> Result<Vec<Itemset>> {
    validate_min_support(min_support)?;
    if db.is_empty() {
        return Err(Error::EmptyInput("transaction database"));
    }
    let min_count = count_threshold(db.len(), min_support);
    let mut counts: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
    for t in db.transactions() {
        for i in 0..t.len() {
            for j in (i + 1)..t.len() {
                *counts.entry((t[i], t[j])).or_insert(0) += 1;
            }
        }
    }
    let mut out: Vec<Itemset> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|((a, b), c)| Itemset {
            items: vec![a, b],
            support_count: c,
        })
        .collect();
    canonical_sort(&mut out);
    Ok(out)
}

#[cfg(test)]
pub(crate) fn db(raw: &[&[usize]]) -> TransactionDB {
    TransactionDB::from_unsorted(raw.iter().map(|t| t.to_vec()).collect())
}
