//! FP-Growth: frequent-itemset mining over a prefix tree with a header table
//! and recursive conditional trees.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{canonical_sort, count_threshold, validate_min_support, Itemset, TransactionDB};

struct Node {
    item: usize,
    count: usize,
    parent: Option<usize>,
    children: BTreeMap<usize, usize>,
    /// Next node holding the same item (header chain).
    next: Option<usize>,
}

struct FpTree {
    nodes: Vec<Node>,
    /// Head of the node chain per item, in tree order.
    header: BTreeMap<usize, usize>,
    /// Total count per item present in the tree.
    item_counts: BTreeMap<usize, usize>,
}

impl FpTree {
    fn new() -> Self {
        // Node 0 is the root; its fields other than children are unused.
        FpTree {
            nodes: vec![Node {
                item: usize::MAX,
                count: 0,
                parent: None,
                children: BTreeMap::new(),
                next: None,
            }],
            header: BTreeMap::new(),
            item_counts: BTreeMap::new(),
        }
    }

    /// Inserts a transaction already sorted in tree order.
    fn insert(&mut self, items: &[usize], count: usize) {
        let mut at = 0usize;
        for &item in items {
            *self.item_counts.entry(item).or_insert(0) += count;
            if let Some(&child) = self.nodes[at].children.get(&item) {
                self.nodes[child].count += count;
                at = child;
            } else {
                let idx = self.nodes.len();
                self.nodes.push(Node {
                    item,
                    count,
                    parent: Some(at),
                    children: BTreeMap::new(),
                    next: self.header.get(&item).copied(),
                });
                self.header.insert(item, idx);
                self.nodes[at].children.insert(item, idx);
                at = idx;
            }
        }
    }

    /// Prefix path of a node (excluding the node itself), nearest-root last.
    fn prefix_path(&self, mut at: usize) -> Vec<usize> {
        let mut path = Vec::new();
        while let Some(parent) = self.nodes[at].parent {
            if parent == 0 {
                break;
            }
            path.push(self.nodes[parent].item);
            at = parent;
        }
        path
    }
}

/// Global mining order: descending frequency, ascending id on ties.
fn tree_order(counts: &BTreeMap<usize, usize>) -> BTreeMap<usize, usize> {
    let mut items: Vec<(usize, usize)> = counts.iter().map(|(&i, &c)| (i, c)).collect();
    items.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    items
        .into_iter()
        .enumerate()
        .map(|(rank, (item, _))| (item, rank))
        .collect()
}

pub fn fp_growth(db: &TransactionDB, min_support: f64) -> Result<Vec<Itemset>> {
    validate_min_support(min_support)?;
    if db.is_empty() {
        return Err(Error::EmptyInput("transaction database"));
    }
    let min_count = count_threshold(db.len(), min_support);

    let mut global_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for t in db.transactions() {
        for &item in t {
            *global_counts.entry(item).or_insert(0) += 1;
        }
    }
    global_counts.retain(|_, c| *c >= min_count);
    let order = tree_order(&global_counts);

    let mut tree = FpTree::new();
    for t in db.transactions() {
        let mut items: Vec<usize> = t.iter().copied().filter(|i| order.contains_key(i)).collect();
        items.sort_by_key(|i| order[i]);
        tree.insert(&items, 1);
    }

    let mut out = Vec::new();
    mine(&tree, min_count, &[], &mut out);
    canonical_sort(&mut out);
    Ok(out)
}

fn mine(tree: &FpTree, min_count: usize, suffix: &[usize], out: &mut Vec<Itemset>) {
    // Visit items from least to most frequent in this tree.
    let order = tree_order(&tree.item_counts);
    let mut items: Vec<usize> = tree.item_counts.keys().copied().collect();
    items.sort_by_key(|i| std::cmp::Reverse(order[i]));

    for item in items {
        let support = tree.item_counts[&item];
        if support < min_count {
            continue;
        }
        let mut found = suffix.to_vec();
        found.push(item);
        found.sort_unstable();
        out.push(Itemset {
            items: found.clone(),
            support_count: support,
        });

        // Conditional pattern base for this item, re-filtered and re-ordered.
        let mut paths: Vec<(Vec<usize>, usize)> = Vec::new();
        let mut cond_counts: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cursor = tree.header.get(&item).copied();
        while let Some(at) = cursor {
            let count = tree.nodes[at].count;
            let path = tree.prefix_path(at);
            for &p in &path {
                *cond_counts.entry(p).or_insert(0) += count;
            }
            if !path.is_empty() {
                paths.push((path, count));
            }
            cursor = tree.nodes[at].next;
        }
        cond_counts.retain(|_, c| *c >= min_count);
        if cond_counts.is_empty() {
            continue;
        }
        let cond_order = tree_order(&cond_counts);
        let mut cond_tree = FpTree::new();
        for (path, count) in paths {
            let mut items: Vec<usize> = path
                .into_iter()
                .filter(|i| cond_order.contains_key(i))
                .collect();
            items.sort_by_key(|i| cond_order[i]);
            cond_tree.insert(&items, count);
        }
        let find_suffix = {
            let mut s = suffix.to_vec();
            s.push(item);
            s
        };
        mine(&cond_tree, min_count, &find_suffix, out);
    }
}
