//! Single-file JSON model format.
//!
//! ```json
//! {
//!   "format": "gesture-model",
//!   "format_version": 1,
//!   "model": { "kind": "extra_trees", "params": {..}, "classes": {..},
//!              "layout": { "n_features": 33, "feature_order_version": 1 }, .. }
//! }
//! ```
//!
//! Floats are written in shortest round-trip form, so a reloaded model
//! predicts bit-identically.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TrainedModel;
use crate::error::{Error, Result};
use crate::features::FEATURE_ORDER_VERSION;

pub const FORMAT_TAG: &str = "gesture-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    format_version: u32,
    model: TrainedModel,
}

pub fn model_to_string(model: &TrainedModel) -> String {
    let file = ModelFile { format: FORMAT_TAG.into(), format_version: FORMAT_VERSION, model: model.clone() };
    serde_json::to_string(&file).expect("models serialize")
}

pub fn model_from_str(text: &str, path: &Path) -> Result<TrainedModel> {
    let corrupt = |msg: String| Error::CorruptModel { path: path.to_path_buf(), msg };
    let file: ModelFile = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    if file.format != FORMAT_TAG {
        return Err(corrupt(format!("unknown format tag {:?}", file.format)));
    }
    if file.format_version != FORMAT_VERSION {
        return Err(corrupt(format!("unsupported format version {}", file.format_version)));
    }
    let layout = super::Predictor::layout(&file.model);
    if layout.feature_order_version != FEATURE_ORDER_VERSION {
        return Err(Error::VersionMismatch { model: layout.feature_order_version, runtime: FEATURE_ORDER_VERSION });
    }
    validate(&file.model).map_err(corrupt)?;
    Ok(file.model)
}

fn validate(model: &TrainedModel) -> std::result::Result<(), String> {
    let n_classes = super::Predictor::classes(model).len();
    if n_classes == 0 {
        return Err("empty class dictionary".into());
    }
    match model {
        TrainedModel::ExtraTrees(m) => {
            if m.trees.is_empty() {
                return Err("no trees".into());
            }
            for t in &m.trees {
                t.validate()?;
                if t.leaf_width() != n_classes {
                    return Err("leaf width differs from class count".into());
                }
            }
        }
        TrainedModel::GradientBoosting(m) => {
            if m.initial_scores.len() != n_classes || m.stages().len() != m.params.n_stages * n_classes {
                return Err("stage table does not match class count".into());
            }
            for t in m.stages() {
                t.validate()?;
            }
        }
        TrainedModel::Ridge(m) => {
            let d = m.layout.n_features;
            if m.weights.len() != n_classes || m.weights.iter().any(|w| w.len() != d + 1) {
                return Err("weight matrix has the wrong shape".into());
            }
            if m.standardizer.mean.len() != d || m.standardizer.std.len() != d || m.standardizer.std.iter().any(|&s| !(s > 0.0)) {
                return Err("standardizer has the wrong shape".into());
            }
        }
    }
    Ok(())
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_string(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text, path)
}
