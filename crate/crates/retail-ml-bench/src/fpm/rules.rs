//! Association-rule generation from a subset-closed frequent-itemset list.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

use super::Itemset;

/// A rule antecedent -> consequent with the counts needed to score it exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssociationRule {
    pub antecedent: Vec<usize>,
    pub consequent: Vec<usize>,
    /// Support count of antecedent and consequent together.
    pub union_count: usize,
    pub antecedent_count: usize,
    pub consequent_count: usize,
    pub db_size: usize,
}

impl AssociationRule {
    pub fn support(&self) -> f64 {
        self.union_count as f64 / self.db_size as f64
    }

    pub fn confidence(&self) -> f64 {
        self.union_count as f64 / self.antecedent_count as f64
    }

    pub fn lift(&self) -> f64 {
        self.confidence() / (self.consequent_count as f64 / self.db_size as f64)
    }

    /// Total number of items mentioned by the rule.
    pub fn size(&self) -> usize {
        self.antecedent.len() + self.consequent.len()
    }
}

/// Emits every rule A -> S\A over itemsets S of size >= 2 whose confidence
/// meets `min_confidence`. The input must be closed under subsets, as the
/// miners produce; a missing subset is an integrity error.
pub fn association_rules(
    itemsets: &[Itemset],
    db_size: usize,
    min_confidence: f64,
) -> Result<Vec<AssociationRule>> {
    let counts: BTreeMap<&[usize], usize> = itemsets
        .iter()
        .map(|s| (s.items.as_slice(), s.support_count))
        .collect();
    let mut out = Vec::new();
    for set in itemsets {
        let k = set.items.len();
        if k < 2 {
            continue;
        }
        // Bitmask over the k items; skip empty and full subsets.
        for mask in 1..((1u32 << k) - 1) {
            let mut antecedent = Vec::new();
            let mut consequent = Vec::new();
            for (i, &item) in set.items.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    antecedent.push(item);
                } else {
                    consequent.push(item);
                }
            }
            let antecedent_count = *counts
                .get(antecedent.as_slice())
                .ok_or_else(|| Error::MissingSubset(antecedent.clone()))?;
            let consequent_count = *counts
                .get(consequent.as_slice())
                .ok_or_else(|| Error::MissingSubset(consequent.clone()))?;
            let confidence = set.support_count as f64 / antecedent_count as f64;
            if confidence >= min_confidence {
                out.push(AssociationRule {
                    antecedent,
                    consequent,
                    union_count: set.support_count,
                    antecedent_count,
                    consequent_count,
                    db_size,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        a.size()
            .cmp(&b.size())
            .then_with(|| a.antecedent.cmp(&b.antecedent))
            .then_with(|| a.consequent.cmp(&b.consequent))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpm::{apriori_oracle, db};

    #[test]
    fn worked_example_rules() {
        // {A,B}:2 with {A}:3 gives A->B confidence 2/3; B->A has confidence 1.
        let db = db(&[&[0, 1], &[0, 2], &[0, 1, 2]]);
        let itemsets = apriori_oracle(&db, 2.0 / 3.0).unwrap();

        let rules = association_rules(&itemsets, db.len(), 0.0).unwrap();
        let a_to_b = rules
            .iter()
            .find(|r| r.antecedent == vec![0] && r.consequent == vec![1])
            .unwrap();
        assert!((a_to_b.confidence() - 2.0 / 3.0).abs() < 1e-15);

        let b_to_a = rules
            .iter()
            .find(|r| r.antecedent == vec![1] && r.consequent == vec![0])
            .unwrap();
        assert_eq!(b_to_a.confidence(), 1.0);

        // At min_confidence 0.7 the A->B rule is excluded, B->A stays.
        let strict = association_rules(&itemsets, db.len(), 0.7).unwrap();
        assert!(!strict
            .iter()
            .any(|r| r.antecedent == vec![0] && r.consequent == vec![1]));
        assert!(strict
            .iter()
            .any(|r| r.antecedent == vec![1] && r.consequent == vec![0]));
    }

    #[test]
    fn zero_confidence_emits_all_splits() {
        let db = db(&[&[0, 1, 2], &[0, 1, 2]]);
        let itemsets = apriori_oracle(&db, 1.0).unwrap();
        let rules = association_rules(&itemsets, db.len(), 0.0).unwrap();
        // One size-3 itemset contributes 2^3 - 2 = 6, each size-2 itemset 2.
        let from_triple = rules.iter().filter(|r| r.size() == 3).count();
        assert_eq!(from_triple, 6);
        let from_pairs = rules.iter().filter(|r| r.size() == 2).count();
        assert_eq!(from_pairs, 3 * 2);
    }

    #[test]
    fn missing_subset_is_integrity_error() {
        let itemsets = vec![Itemset {
            items: vec![0, 1],
            support_count: 2,
        }];
        match association_rules(&itemsets, 3, 0.0) {
            Err(Error::MissingSubset(s)) => assert_eq!(s, vec![0]),
            other => panic!("expected missing subset, got {other:?}"),
        }
    }

    #[test]
    fn rule_arithmetic_is_exact_on_random_dbs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let n_items = rng.gen_range(2..=8);
            let txs: Vec<Vec<usize>> = (0..rng.gen_range(1..=30))
                .map(|_| (0..rng.gen_range(0..=n_items)).map(|_| rng.gen_range(0..n_items)).collect())
                .collect();
            let db = crate::fpm::TransactionDB::from_unsorted(txs);
            let itemsets = apriori_oracle(&db, 0.2).unwrap();
            let rules = association_rules(&itemsets, db.len(), 0.0).unwrap();
            for rule in rules {
                // Recount each side directly from the database.
                let recount = |set: &[usize]| {
                    db.transactions()
                        .iter()
                        .filter(|t| crate::fpm::apriori::is_subset(set, t))
                        .count()
                };
                let mut union: Vec<usize> =
                    rule.antecedent.iter().chain(&rule.consequent).copied().collect();
                union.sort_unstable();
                assert_eq!(rule.union_count, recount(&union));
                assert_eq!(rule.antecedent_count, recount(&rule.antecedent));
                assert_eq!(rule.consequent_count, recount(&rule.consequent));
                assert!(rule.confidence() > 0.0 && rule.confidence() <= 1.0);
                // confidence * support(A) equals support(A u C) exactly in counts.
                assert_eq!(rule.union_count * db.len(), (rule.confidence() * rule.antecedent_count as f64).round() as usize * db.len());
            }
        }
    }
}
