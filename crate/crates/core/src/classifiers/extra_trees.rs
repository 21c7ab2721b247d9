//! Extremely randomized trees.
//!
//! Every tree sees the full training set (no bootstrap). At each node,
//! features are drawn without replacement until `k_features` non-constant
//! ones have been tried; each gets a single uniform threshold between its
//! node-local minimum and maximum, and the candidate with the lowest weighted
//! Gini impurity wins. Trees grow until nodes are pure or smaller than
//! `min_samples_split`.
//!
//! Tree `t` draws from `ChaCha8Rng::seed_from_u64(seed)` with its stream set
//! to `t`, so the model does not depend on how many threads fit it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{fit_classification, ClassificationParams, Splitter, Tree};
use super::{check_training, ClassMap, InputLayout, Predictor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtParams {
    pub n_trees: usize,
    pub k_features: usize,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for EtParams {
    fn default() -> Self {
        // ⌈√33⌉ candidates per split
        EtParams { n_trees: 100, k_features: 6, min_samples_split: 2, seed: 0 }
    }
}

/// Per-tree generator: one ChaCha8 stream per tree index.
pub fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraTreesModel {
    pub params: EtParams,
    pub classes: ClassMap,
    pub layout: InputLayout,
    pub trees: Vec<Tree>,
}

impl ExtraTreesModel {
    pub fn fit<R: AsRef<[f64]> + Sync>(x: &[R], y: &[u32], params: &EtParams) -> Result<Self> {
        let d = check_training(x, y, 1)?;
        if params.n_trees == 0 {
            return Err(Error::InvalidInput("n_trees must be at least 1".into()));
        }
        if params.k_features == 0 || params.k_features > d {
            return Err(Error::InvalidInput(format!("k_features must be in 1..={d}, got {}", params.k_features)));
        }
        let classes = ClassMap::from_labels(y);
        let encoded = classes.encode(y);
        let tree_params = ClassificationParams {
            splitter: Splitter::Random { k_features: params.k_features },
            min_samples_split: params.min_samples_split,
            max_depth: None,
        };
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rows: Vec<usize> = (0..x.len()).collect();
                let mut rng = tree_rng(params.seed, t);
                fit_classification(x, &encoded, classes.len(), &mut rows, &tree_params, &mut rng)
            })
            .collect();
        Ok(ExtraTreesModel { params: *params, classes, layout: InputLayout::new(d), trees })
    }

    /// Mean class-probability vector over all trees.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.layout.check(x)?;
        let mut acc = vec![0.0; self.classes.len()];
        for tree in &self.trees {
            for (a, p) in acc.iter_mut().zip(tree.predict(x)) {
                *a += p;
            }
        }
        let n = self.trees.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Ok(acc)
    }
}

impl Predictor for ExtraTreesModel {
    fn layout(&self) -> InputLayout {
        self.layout
    }

    fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.predict_proba(x)
    }

    fn classes(&self) -> &ClassMap {
        &self.classes
    }
}
