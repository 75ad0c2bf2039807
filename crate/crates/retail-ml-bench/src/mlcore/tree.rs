//! CART decision tree with Gini impurity and deterministic tie-breaking.

use serde::Serialize;

use crate::error::{Error, Result};

use super::{Classifier, Features, LabeledData};

#[derive(Debug, Clone, Serialize)]
pub enum TreeNode {
    Internal {
        feature_index: usize,
        /// Midpoint between consecutive distinct feature values; rows with
        /// value <= threshold go left.
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct DecisionTreeModel {
    pub nodes: Vec<TreeNode>,
    pub max_depth: usize,
    n_classes: usize,
    n_features: usize,
}

impl DecisionTreeModel {
    pub fn predict_row<F: Features>(&self, feats: &F, r: usize) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { class } => return *class,
                TreeNode::Internal {
                    feature_index,
                    threshold,
                    left,
                    right,
                } => {
                    at = if feats.value(r, *feature_index) <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Depth of the deepest leaf, counting edges from the root.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

impl Classifier for DecisionTreeModel {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn class_scores<F: Features>(&self, feats: &F, r: usize, out: &mut [f64]) {
        out.fill(0.0);
        out[self.predict_row(feats, r)] = 1.0;
    }
}

fn gini(class_counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - class_counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum::<f64>()
}

fn majority_class(class_counts: &[usize]) -> usize {
    let mut best = 0;
    for (class, &count) in class_counts.iter().enumerate().skip(1) {
        if count > class_counts[best] {
            best = class;
        }
    }
    best
}

struct Builder<'a, F: Features> {
    data: &'a LabeledData<F>,
    max_depth: usize,
    min_samples_split: usize,
    nodes: Vec<TreeNode>,
}

struct Split {
    decrease: f64,
    feature: usize,
    threshold: f64,
}

impl<F: Features> Builder<'_, F> {
    fn build(&mut self, rows: &[usize], depth: usize) -> usize {
        let mut counts = vec![0usize; self.data.n_classes];
        for &r in rows {
            counts[self.data.labels[r]] += 1;
        }
        let node_gini = gini(&counts, rows.len());
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;

        if pure || depth >= self.max_depth || rows.len() < self.min_samples_split {
            return self.push_leaf(&counts);
        }
        let Some(split) = self.best_split(rows, node_gini) else {
            return self.push_leaf(&counts);
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.data.features.value(r, split.feature) <= split.threshold);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());

        let idx = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { class: 0 }); // placeholder
        let left = self.build(&left_rows, depth + 1);
        let right = self.build(&right_rows, depth + 1);
        self.nodes[idx] = TreeNode::Internal {
            feature_index: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        idx
    }

    fn push_leaf(&mut self, counts: &[usize]) -> usize {
        self.nodes.push(TreeNode::Leaf {
            class: majority_class(counts),
        });
        self.nodes.len() - 1
    }

    /// Best (feature, threshold) by Gini decrease; ties prefer the lower
    /// feature index, then the lower threshold. Candidate thresholds are
    /// midpoints between consecutive distinct sorted values.
    fn best_split(&self, rows: &[usize], node_gini: f64) -> Option<Split> {
        let n = rows.len();
        let n_classes = self.data.n_classes;
        let mut best: Option<Split> = None;

        let mut column: Vec<(f64, usize)> = Vec::with_capacity(n);
        for feature in 0..self.data.n_cols() {
            column.clear();
            for &r in rows {
                column.push((self.data.features.value(r, feature), self.data.labels[r]));
            }
            column.sort_by(|a, b| a.0.total_cmp(&b.0));

            let mut left_counts = vec![0usize; n_classes];
            let mut right_counts = vec![0usize; n_classes];
            for &(_, label) in column.iter() {
                right_counts[label] += 1;
            }

            for i in 0..n - 1 {
                let (value, label) = column[i];
                left_counts[label] += 1;
                right_counts[label] -= 1;
                let next = column[i + 1].0;
                if next <= value {
                    continue;
                }
                let threshold = value + (next - value) / 2.0;
                // A degenerate midpoint that rounds onto the upper value would
                // send both sides left; skip it.
                if threshold >= next {
                    continue;
                }
                let n_left = i + 1;
                let n_right = n - n_left;
                let weighted = (n_left as f64 * gini(&left_counts, n_left)
                    + n_right as f64 * gini(&right_counts, n_right))
                    / n as f64;
                let decrease = node_gini - weighted;
                if decrease <= 0.0 {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(b) => {
                        decrease > b.decrease
                            || (decrease == b.decrease
                                && (feature < b.feature
                                    || (feature == b.feature && threshold < b.threshold)))
                    }
                };
                if better {
                    best = Some(Split {
                        decrease,
                        feature,
                        threshold,
                    });
                }
            }
        }
        best
    }
}

/// CART with Gini impurity. A node becomes a leaf when it is pure, the depth
/// limit is reached, it is smaller than `min_samples_split`, or no split
/// yields a positive impurity decrease.
pub fn fit_decision_tree<F: Features>(
    data: &LabeledData<F>,
    max_depth: usize,
    min_samples_split: usize,
) -> Result<DecisionTreeModel> {
    if max_depth < 1 {
        return Err(Error::InvalidConfig("max_depth must be >= 1".into()));
    }
    if data.n_rows() == 0 {
        return Err(Error::EmptyInput("decision tree training data"));
    }
    let mut builder = Builder {
        data,
        max_depth,
        min_samples_split: min_samples_split.max(2),
        nodes: Vec::new(),
    };
    let rows: Vec<usize> = (0..data.n_rows()).collect();
    let root = builder.build(&rows, 0);
    debug_assert_eq!(root, 0);
    Ok(DecisionTreeModel {
        nodes: builder.nodes,
        max_depth,
        n_classes: data.n_classes,
        n_features: data.n_cols(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlcore::{predict, DenseMatrix};

    #[test]
    fn one_threshold_data_yields_depth_one_tree() {
        let feats = DenseMatrix::from_rows(vec![
            vec![0.0, 9.0],
            vec![1.0, 9.0],
            vec![5.0, 9.0],
            vec![6.0, 9.0],
        ]);
        let data = LabeledData::new(feats, vec![0, 0, 1, 1]).unwrap();
        let model = fit_decision_tree(&data, 8, 2).unwrap();
        assert_eq!(model.depth(), 1);
        match &model.nodes[0] {
            TreeNode::Internal {
                feature_index,
                threshold,
                ..
            } => {
                assert_eq!(*feature_index, 0);
                assert_eq!(*threshold, 3.0);
            }
            other => panic!("expected internal root, got {other:?}"),
        }
        assert_eq!(predict(&model, &data.features).unwrap(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn uniform_labels_collapse_to_single_leaf() {
        let feats = DenseMatrix::from_rows(vec![vec![1.0], vec![2.0], vec![3.0]]);
        let data = LabeledData::new(feats, vec![0, 0, 0]).unwrap();
        let model = fit_decision_tree(&data, 5, 2).unwrap();
        assert_eq!(model.nodes.len(), 1);
        assert!(matches!(model.nodes[0], TreeNode::Leaf { class: 0 }));
    }

    #[test]
    fn unlimited_depth_fits_training_data_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = crate::rng::Prng::seed_from_u64(51);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..3).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let labels: Vec<usize> = rows
            .iter()
            .map(|r| usize::from(r[0] + r[1] * r[2] > 0.6))
            .collect();
        if labels.iter().all(|&l| l == labels[0]) {
            return;
        }
        let data = LabeledData::new(DenseMatrix::from_rows(rows), labels.clone()).unwrap();
        let model = fit_decision_tree(&data, 64, 2).unwrap();
        assert_eq!(predict(&model, &data.features).unwrap(), labels);
    }

    #[test]
    fn depth_limit_is_respected() {
        use rand::{Rng, SeedableRng};
        let mut rng = crate::rng::Prng::seed_from_u64(52);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..2).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let labels: Vec<usize> = (0..60).map(|i| i % 3).collect();
        let data = LabeledData::new(DenseMatrix::from_rows(rows), labels).unwrap();
        let model = fit_decision_tree(&data, 2, 2).unwrap();
        assert!(model.depth() <= 2);
    }

    #[test]
    fn empty_data_is_rejected() {
        let data = LabeledData::new(DenseMatrix::from_rows(vec![vec![1.0]]), vec![0]).unwrap();
        assert!(fit_decision_tree(&data, 0, 2).is_err());
    }

    #[test]
    fn leaf_tie_breaks_to_lowest_class() {
        // Two rows share the feature value, one of each class: no split is
        // possible and the leaf majority is tied.
        let feats = DenseMatrix::from_rows(vec![vec![1.0], vec![1.0]]);
        let data = LabeledData::new(feats, vec![1, 0]).unwrap();
        let model = fit_decision_tree(&data, 3, 2).unwrap();
        assert!(matches!(model.nodes[0], TreeNode::Leaf { class: 0 }));
    }
}
