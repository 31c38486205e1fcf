//! CART decision trees and bootstrap random forests for binary labels.
//!
//! Shared by the random-forest importance scorer, the per-feature AUC
//! screen and the random-forest baseline.

use ndarray::ArrayView2;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::derive_indexed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Gini,
    Entropy,
}

impl Criterion {
    fn impurity(self, n0: f64, n1: f64) -> f64 {
        let n = n0 + n1;
        if n == 0.0 {
            return 0.0;
        }
        let (p0, p1) = (n0 / n, n1 / n);
        match self {
            Criterion::Gini => 1.0 - p0 * p0 - p1 * p1,
            Criterion::Entropy => {
                let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
                h(p0) + h(p1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    /// `max(1, floor(sqrt(p)))` candidate features per split.
    #[default]
    Sqrt,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub criterion: Criterion,
    pub max_features: MaxFeatures,
    pub min_samples_split: usize,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            criterion: Criterion::Gini,
            max_features: MaxFeatures::Sqrt,
            min_samples_split: 2,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf {
        /// Fraction of class-1 samples reaching the leaf.
        p1: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    depth: usize,
}

struct Builder<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [u8],
    params: &'a ForestParams,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    importances: Vec<f64>,
    depth: usize,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    fn grow(&mut self, samples: &[usize], depth: usize) -> usize {
        self.depth = self.depth.max(depth);
        let n1 = samples.iter().filter(|&&i| self.y[i] == 1).count();
        let n = samples.len();
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            p1: n1 as f64 / n as f64,
        });
        let stop = n1 == 0
            || n1 == n
            || n < self.params.min_samples_split
            || self.params.max_depth.is_some_and(|d| depth >= d);
        if stop {
            return id;
        }
        let Some(best) = self.best_split(samples, n1) else {
            return id;
        };
        self.importances[best.feature] += best.gain;
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&i| self.x[[i, best.feature]] <= best.threshold);
        let l = self.grow(&left, depth + 1);
        let r = self.grow(&right, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: l,
            right: r,
        };
        id
    }

    fn best_split(&mut self, samples: &[usize], n1: usize) -> Option<BestSplit> {
        let p = self.x.ncols();
        let mut features = match self.params.max_features {
            MaxFeatures::All => (0..p).collect::<Vec<_>>(),
            MaxFeatures::Sqrt => {
                let k = ((p as f64).sqrt().floor() as usize).max(1);
                index::sample(&mut self.rng, p, k).into_vec()
            }
        };
        features.sort_unstable();

        let crit = self.params.criterion;
        let n = samples.len() as f64;
        let total1 = n1 as f64;
        let parent = n * crit.impurity(n - total1, total1);
        let mut best: Option<BestSplit> = None;
        let mut pairs: Vec<(f64, u8)> = Vec::with_capacity(samples.len());
        for f in features {
            pairs.clear();
            pairs.extend(samples.iter().map(|&i| (self.x[[i, f]], self.y[i])));
            pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let (mut left0, mut left1) = (0.0, 0.0);
            for k in 0..pairs.len() - 1 {
                if pairs[k].1 == 1 {
                    left1 += 1.0;
                } else {
                    left0 += 1.0;
                }
                if pairs[k].0 == pairs[k + 1].0 {
                    continue;
                }
                let nl = left0 + left1;
                let (right0, right1) = (n - total1 - left0, total1 - left1);
                let gain = parent
                    - nl * crit.impurity(left0, left1)
                    - (n - nl) * crit.impurity(right0, right1);
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(BestSplit {
                        feature: f,
                        threshold: 0.5 * (pairs[k].0 + pairs[k + 1].0),
                        gain,
                    });
                }
            }
        }
        best
    }
}

impl DecisionTree {
    /// Fit on the rows listed in `samples` (duplicates allowed). Returns the
    /// tree and its unnormalised per-feature impurity decrease.
    pub fn fit(
        x: ArrayView2<'_, f64>,
        y: &[u8],
        samples: &[usize],
        params: &ForestParams,
        seed: u64,
    ) -> (Self, Vec<f64>) {
        let mut b = Builder {
            x,
            y,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            nodes: Vec::new(),
            importances: vec![0.0; x.ncols()],
            depth: 0,
        };
        b.grow(samples, 0);
        let scale = samples.len() as f64;
        let imp = b.importances.iter().map(|v| v / scale).collect();
        (
            Self {
                nodes: b.nodes,
                depth: b.depth,
            },
            imp,
        )
    }

    /// Class-1 fraction of the leaf reached by `x`.
    pub fn leaf_p1(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { p1 } => return p1,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// Majority class of the reached leaf; ties go to class 0.
    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.leaf_p1(x) > 0.5)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    params: ForestParams,
    n_features: usize,
    trees: Vec<DecisionTree>,
    importances: Vec<f64>,
}

impl RandomForest {
    pub fn fit(x: ArrayView2<'_, f64>, y: &[u8], params: &ForestParams, seed: u64) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Shape {
                expected: x.nrows(),
                actual: y.len(),
            });
        }
        if params.n_trees == 0 {
            return Err(Error::invalid("forest needs at least one tree"));
        }
        let n1 = y.iter().filter(|&&l| l == 1).count();
        if n1 == 0 || n1 == y.len() {
            return Err(Error::invalid("random forest needs both classes"));
        }
        let n = y.len();
        let fitted: Vec<(DecisionTree, Vec<f64>)> = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let tree_seed = derive_indexed(seed, t);
                let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
                let samples: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit(x, y, &samples, params, rng.random())
            })
            .collect();

        let mut importances = vec![0.0; x.ncols()];
        let mut trees = Vec::with_capacity(fitted.len());
        for (tree, imp) in fitted {
            let total: f64 = imp.iter().sum();
            if total > 0.0 {
                for (acc, v) in importances.iter_mut().zip(&imp) {
                    *acc += v / total;
                }
            }
            trees.push(tree);
        }
        let total: f64 = importances.iter().sum();
        if total > 0.0 {
            importances.iter_mut().for_each(|v| *v /= total);
        }
        Ok(Self {
            params: *params,
            n_features: x.ncols(),
            trees,
            importances,
        })
    }

    /// Fraction of trees voting for class 1.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let votes: usize = self.trees.iter().map(|t| t.predict(x) as usize).sum();
        votes as f64 / self.trees.len() as f64
    }

    pub fn predict_proba_rows(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        x.rows()
            .into_iter()
            .map(|r| match r.as_slice() {
                Some(s) => self.predict_proba(s),
                None => self.predict_proba(&r.to_vec()),
            })
            .collect()
    }

    /// Mean per-tree normalised impurity decrease, summing to 1 (all zeros
    /// when no tree could split).
    pub fn feature_importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};

    use super::*;

    #[test]
    fn impurity_values() {
        assert_abs_diff_eq!(Criterion::Gini.impurity(5.0, 5.0), 0.5);
        assert_abs_diff_eq!(Criterion::Entropy.impurity(5.0, 5.0), 1.0);
        assert_eq!(Criterion::Gini.impurity(3.0, 0.0), 0.0);
    }

    #[test]
    fn single_tree_separates_threshold_data() {
        let x = array![[0.1], [0.2], [0.3], [0.7], [0.8], [0.9]];
        let y = [0, 0, 0, 1, 1, 1];
        let params = ForestParams {
            max_features: MaxFeatures::All,
            ..Default::default()
        };
        let (tree, imp) = DecisionTree::fit(x.view(), &y, &[0, 1, 2, 3, 4, 5], &params, 1);
        assert_eq!(tree.depth(), 1);
        assert_abs_diff_eq!(imp[0], 0.5, epsilon = 1e-15);
        assert_eq!(tree.predict(&[0.25]), 0);
        assert_eq!(tree.predict(&[0.75]), 1);
    }

    #[test]
    fn constant_features_give_majority_leaf() {
        let x = Array2::from_elem((5, 2), 1.0);
        let y = [1, 1, 1, 0, 0];
        let params = ForestParams {
            n_trees: 5,
            max_depth: Some(1),
            bootstrap: false,
            ..Default::default()
        };
        let rf = RandomForest::fit(x.view(), &y, &params, 3).unwrap();
        assert_eq!(rf.predict_proba(&[1.0, 1.0]), 1.0);
        assert!(rf.feature_importances().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_class_rejected() {
        let x = array![[1.0], [2.0]];
        assert!(RandomForest::fit(x.view(), &[1, 1], &ForestParams::default(), 0).is_err());
    }
}
