//! Multiclass gradient boosting with softmax loss.
//!
//! Scores start at the log class priors. Each stage computes the residuals
//! `onehot(y) − softmax(F)` from the scores as they were at the start of the
//! stage, fits one least-squares regression tree per class to them, and
//! replaces every leaf value by a single Newton step
//!
//! ```text
//! γ = (K − 1)/K · Σ r / Σ |r|·(1 − |r|)
//! ```
//!
//! before adding `learning_rate · γ` to that class's scores.

use serde::{Deserialize, Serialize};

use super::tree::{fit_regression, PackedForest, Presorted, RegressionParams, Tree};
use super::{check_training, ClassMap, InputLayout, Predictor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbParams {
    pub n_stages: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Recorded for provenance; the fit itself draws no random numbers.
    pub seed: u64,
}

impl Default for GbParams {
    fn default() -> Self {
        GbParams { n_stages: 100, learning_rate: 0.1, max_depth: 3, min_samples_split: 2, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "GbFields")]
pub struct GradientBoostingModel {
    pub params: GbParams,
    pub classes: ClassMap,
    pub layout: InputLayout,
    pub initial_scores: Vec<f64>,
    /// Stage-major: tree `s·K + k` belongs to stage `s`, class `k`. Leaf values
    /// already include the learning rate.
    stages: Vec<Tree>,
    /// Mean training log-loss after initialization and after every stage.
    pub train_loss: Vec<f64>,
    /// Branch-free copy of `stages` used for prediction when the trees are shallow.
    #[serde(skip)]
    packed: Option<PackedForest>,
}

#[derive(Deserialize)]
struct GbFields {
    params: GbParams,
    classes: ClassMap,
    layout: InputLayout,
    initial_scores: Vec<f64>,
    stages: Vec<Tree>,
    train_loss: Vec<f64>,
}

impl From<GbFields> for GradientBoostingModel {
    fn from(f: GbFields) -> Self {
        let packed = packable(&f.stages);
        GradientBoostingModel {
            params: f.params,
            classes: f.classes,
            layout: f.layout,
            initial_scores: f.initial_scores,
            stages: f.stages,
            train_loss: f.train_loss,
            packed,
        }
    }
}

// the packed copy is derived from `stages`
impl PartialEq for GradientBoostingModel {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.classes == other.classes
            && self.layout == other.layout
            && self.initial_scores == other.initial_scores
            && self.stages == other.stages
            && self.train_loss == other.train_loss
    }
}

fn packable(stages: &[Tree]) -> Option<PackedForest> {
    // a structurally broken table is rejected by validation, not here
    if stages.iter().any(|t| t.validate().is_err()) {
        return None;
    }
    PackedForest::new(stages)
}

pub(crate) fn softmax_into(scores: &[f64], out: &mut [f64]) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, &s) in out.iter_mut().zip(scores) {
        *o = (s - max).exp();
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

/// Mean of `logsumexp(F_i) − F_{i,y_i}`.
pub fn log_loss(scores: &[Vec<f64>], y: &[usize]) -> f64 {
    let total: f64 = scores
        .iter()
        .zip(y)
        .map(|(s, &c)| {
            let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + s.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            lse - s[c]
        })
        .sum();
    total / y.len() as f64
}

impl GradientBoostingModel {
    pub fn fit<R: AsRef<[f64]>>(x: &[R], y: &[u32], params: &GbParams) -> Result<Self> {
        let d = check_training(x, y, 1)?;
        if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
            return Err(Error::InvalidInput(format!("learning_rate must be in (0, 1], got {}", params.learning_rate)));
        }
        if params.max_depth == 0 {
            return Err(Error::InvalidInput("max_depth must be at least 1".into()));
        }
        let classes = ClassMap::from_labels(y);
        let k = classes.len();
        let n = x.len();
        let encoded = classes.encode(y);

        let mut counts = vec![0usize; k];
        for &c in &encoded {
            counts[c] += 1;
        }
        let initial_scores: Vec<f64> = counts.iter().map(|&c| (c as f64 / n as f64).ln()).collect();
        let mut scores: Vec<Vec<f64>> = vec![initial_scores.clone(); n];
        let mut train_loss = vec![log_loss(&scores, &encoded)];

        let presorted = Presorted::new(x);
        let tree_params = RegressionParams { max_depth: params.max_depth, min_samples_split: params.min_samples_split };
        let newton_factor = (k as f64 - 1.0) / k as f64;
        let mut stages = Vec::with_capacity(params.n_stages * k);
        let mut prob = vec![vec![0.0; k]; n];
        let mut residual = vec![0.0; n];

        for _ in 0..params.n_stages {
            for (p, s) in prob.iter_mut().zip(&scores) {
                softmax_into(s, p);
            }
            for class in 0..k {
                for i in 0..n {
                    let target = if encoded[i] == class { 1.0 } else { 0.0 };
                    residual[i] = target - prob[i][class];
                }
                let (mut tree, row_leaf) = fit_regression(x, &residual, &presorted, &tree_params);
                let mut num = vec![0.0; tree.n_leaves()];
                let mut den = vec![0.0; tree.n_leaves()];
                for i in 0..n {
                    let r = residual[i];
                    num[row_leaf[i] as usize] += r;
                    den[row_leaf[i] as usize] += r.abs() * (1.0 - r.abs());
                }
                for leaf in 0..tree.n_leaves() {
                    let gamma = if den[leaf].abs() < 1e-150 { 0.0 } else { newton_factor * num[leaf] / den[leaf] };
                    tree.leaf_values_mut(leaf)[0] = params.learning_rate * gamma;
                }
                for i in 0..n {
                    scores[i][class] += tree.leaf_values(row_leaf[i] as usize)[0];
                }
                stages.push(tree);
            }
            let loss = log_loss(&scores, &encoded);
            let prev = *train_loss.last().expect("initial loss");
            if loss > prev + 1e-12 * prev.abs().max(1.0) {
                log::warn!("boosting stage {} raised training log-loss from {prev} to {loss}", train_loss.len());
            }
            train_loss.push(loss);
        }

        let packed = packable(&stages);
        Ok(GradientBoostingModel {
            params: *params,
            classes,
            layout: InputLayout::new(d),
            initial_scores,
            stages,
            train_loss,
            packed,
        })
    }

    /// Stage-major regression trees, `K` per stage.
    pub fn stages(&self) -> &[Tree] {
        &self.stages
    }

    /// Raw scores after initialization and after each stage.
    pub fn staged_scores(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.layout.check(x)?;
        let k = self.classes.len();
        let mut current = self.initial_scores.clone();
        let mut out = vec![current.clone()];
        for stage in self.stages.chunks(k) {
            for (s, tree) in current.iter_mut().zip(stage) {
                *s += tree.predict(x)[0];
            }
            out.push(current.clone());
        }
        Ok(out)
    }

    /// Class probabilities from the final scores.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        let s = self.scores(x)?;
        let mut p = vec![0.0; s.len()];
        softmax_into(&s, &mut p);
        Ok(p)
    }
}

impl Predictor for GradientBoostingModel {
    fn layout(&self) -> InputLayout {
        self.layout
    }

    fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.layout.check(x)?;
        let k = self.classes.len();
        let mut s = self.initial_scores.clone();
        match &self.packed {
            Some(packed) => {
                for stage in 0..self.stages.len() / k {
                    for (class, acc) in s.iter_mut().enumerate() {
                        *acc += packed.eval(stage * k + class, x);
                    }
                }
            }
            None => {
                for stage in self.stages.chunks(k) {
                    for (acc, tree) in s.iter_mut().zip(stage) {
                        *acc += tree.predict(x)[0];
                    }
                }
            }
        }
        Ok(s)
    }

    fn classes(&self) -> &ClassMap {
        &self.classes
    }
}
