//! The three classifiers offered to end users: Extra Trees (most accurate),
//! Gradient Boosting (intermediate) and Ridge (fastest to classify).
//!
//! All of them share the same conventions:
//!
//! * labels are arbitrary `u32` gesture ids, mapped to class indices in
//!   ascending order ([`ClassMap`]);
//! * equal scores resolve to the lowest class index;
//! * fitting is a pure function of `(x, y, params, seed)`.

pub mod boosting;
pub mod extra_trees;
pub mod persist;
pub mod ridge;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_ORDER_VERSION};

pub use boosting::{GbParams, GradientBoostingModel};
pub use extra_trees::{EtParams, ExtraTreesModel};
pub use persist::{load_model, save_model};
pub use ridge::{RidgeModel, RidgeParams};

/// Sorted label dictionary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMap {
    labels: Vec<u32>,
}

impl ClassMap {
    pub fn from_labels(y: &[u32]) -> Self {
        let mut labels = y.to_vec();
        labels.sort_unstable();
        labels.dedup();
        ClassMap { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn label(&self, index: usize) -> u32 {
        self.labels[index]
    }

    pub fn encode(&self, y: &[u32]) -> Vec<usize> {
        y.iter().map(|&l| self.index_of(l).expect("label in dictionary")).collect()
    }
}

/// Index of the largest score; the first one wins on ties.
pub fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

fn check_training<R: AsRef<[f64]>>(x: &[R], y: &[u32], min_classes: usize) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 training rows, got {}", x.len())));
    }
    let d = x[0].as_ref().len();
    if d == 0 {
        return Err(Error::InvalidInput("training rows have no features".into()));
    }
    for (i, row) in x.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: row.len() });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("training row {i} has a non-finite value")));
        }
    }
    let classes = ClassMap::from_labels(y).len();
    if classes < min_classes {
        return Err(Error::InvalidInput(format!("need at least {min_classes} distinct labels, got {classes}")));
    }
    Ok(d)
}

/// Shape every model records about the inputs it was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputLayout {
    pub n_features: usize,
    pub feature_order_version: u32,
}

impl InputLayout {
    fn new(n_features: usize) -> Self {
        InputLayout { n_features, feature_order_version: FEATURE_ORDER_VERSION }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch { expected: self.n_features, got: x.len() });
        }
        Ok(())
    }

    fn check_version(&self) -> Result<()> {
        if self.feature_order_version != FEATURE_ORDER_VERSION {
            return Err(Error::VersionMismatch { model: self.feature_order_version, runtime: FEATURE_ORDER_VERSION });
        }
        Ok(())
    }
}

/// Anything that turns a feature row into a gesture label.
pub trait Predictor: Send + Sync {
    fn layout(&self) -> InputLayout;

    /// Per-class scores, in [`ClassMap`] order.
    fn scores(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn classes(&self) -> &ClassMap;

    fn predict(&self, x: &[f64]) -> Result<u32> {
        let s = self.scores(x)?;
        Ok(self.classes().label(argmax_lowest(&s)))
    }

    /// Predicts a feature-set row, refusing models trained on another feature order.
    fn predict_features(&self, v: &FeatureVector) -> Result<u32> {
        self.layout().check_version()?;
        self.predict(v.as_ref())
    }

    fn predict_batch(&self, rows: &[FeatureVector]) -> Result<Vec<u32>> {
        rows.iter().map(|r| self.predict_features(r)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    ExtraTrees,
    GradientBoosting,
    Ridge,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] =
        [ClassifierKind::ExtraTrees, ClassifierKind::GradientBoosting, ClassifierKind::Ridge];

    pub fn short_name(&self) -> &'static str {
        match self {
            ClassifierKind::ExtraTrees => "ET",
            ClassifierKind::GradientBoosting => "GB",
            ClassifierKind::Ridge => "RC",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "et" | "extra-trees" | "extra_trees" => Ok(ClassifierKind::ExtraTrees),
            "gb" | "gradient-boosting" | "gradient_boosting" => Ok(ClassifierKind::GradientBoosting),
            "rc" | "ridge" => Ok(ClassifierKind::Ridge),
            other => Err(Error::InvalidInput(format!("unknown classifier {other:?} (expected et, gb or rc)"))),
        }
    }
}

/// A classifier kind together with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierSpec {
    ExtraTrees(EtParams),
    GradientBoosting(GbParams),
    Ridge(RidgeParams),
}

impl ClassifierSpec {
    /// Default hyperparameters for `kind`, with `seed` where the kind uses one.
    pub fn default_for(kind: ClassifierKind, seed: u64) -> Self {
        match kind {
            ClassifierKind::ExtraTrees => ClassifierSpec::ExtraTrees(EtParams { seed, ..EtParams::default() }),
            ClassifierKind::GradientBoosting => {
                ClassifierSpec::GradientBoosting(GbParams { seed, ..GbParams::default() })
            }
            ClassifierKind::Ridge => ClassifierSpec::Ridge(RidgeParams::default()),
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierSpec::ExtraTrees(_) => ClassifierKind::ExtraTrees,
            ClassifierSpec::GradientBoosting(_) => ClassifierKind::GradientBoosting,
            ClassifierSpec::Ridge(_) => ClassifierKind::Ridge,
        }
    }

    pub fn fit<R: AsRef<[f64]> + Sync>(&self, x: &[R], y: &[u32]) -> Result<TrainedModel> {
        Ok(match self {
            ClassifierSpec::ExtraTrees(p) => TrainedModel::ExtraTrees(ExtraTreesModel::fit(x, y, p)?),
            ClassifierSpec::GradientBoosting(p) => TrainedModel::GradientBoosting(GradientBoostingModel::fit(x, y, p)?),
            ClassifierSpec::Ridge(p) => TrainedModel::Ridge(RidgeModel::fit(x, y, p)?),
        })
    }
}

/// A fitted model of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    ExtraTrees(ExtraTreesModel),
    GradientBoosting(GradientBoostingModel),
    Ridge(RidgeModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainedModel::ExtraTrees(_) => ClassifierKind::ExtraTrees,
            TrainedModel::GradientBoosting(_) => ClassifierKind::GradientBoosting,
            TrainedModel::Ridge(_) => ClassifierKind::Ridge,
        }
    }

    pub fn spec(&self) -> ClassifierSpec {
        match self {
            TrainedModel::ExtraTrees(m) => ClassifierSpec::ExtraTrees(m.params),
            TrainedModel::GradientBoosting(m) => ClassifierSpec::GradientBoosting(m.params),
            TrainedModel::Ridge(m) => ClassifierSpec::Ridge(m.params),
        }
    }

    fn inner(&self) -> &dyn Predictor {
        match self {
            TrainedModel::ExtraTrees(m) => m,
            TrainedModel::GradientBoosting(m) => m,
            TrainedModel::Ridge(m) => m,
        }
    }
}

impl Predictor for TrainedModel {
    fn layout(&self) -> InputLayout {
        self.inner().layout()
    }

    fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.inner().scores(x)
    }

    fn classes(&self) -> &ClassMap {
        self.inner().classes()
    }

    fn predict(&self, x: &[f64]) -> Result<u32> {
        self.inner().predict(x)
    }
}
