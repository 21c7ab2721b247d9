//! The 33-value feature set: 15 time-domain, 3 Fourier-domain and 15
//! Hilbert-domain values per gesture sample.
//!
//! Order is frozen (see [`FEATURE_NAMES`]) and versioned through
//! [`FEATURE_ORDER_VERSION`], which trained models carry with them.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::data::{Dataset, DatasetMeta, GestureSample};
use crate::dsp;
use crate::error::{Error, Result};

pub const N_FEATURES: usize = 33;
pub const FEATURE_ORDER_VERSION: u32 = 1;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "mean_x", "mean_y", "mean_z", "skew_x", "skew_y", "skew_z", "kurt_x", "kurt_y", "kurt_z", "pm_xy", "pm_yz",
    "pm_zx", "xcorr_xy", "xcorr_yz", "xcorr_zx", "energy_x", "energy_y", "energy_z", "hmean_x", "hmean_y",
    "hmean_z", "hskew_x", "hskew_y", "hskew_z", "henergy_x", "henergy_y", "henergy_z", "hmin_x", "hmin_y",
    "hmin_z", "hmax_x", "hmax_y", "hmax_z",
];

/// Offsets of the three blocks inside a [`FeatureVector`].
pub const TIME_BLOCK: std::ops::Range<usize> = 0..15;
pub const FOURIER_BLOCK: std::ops::Range<usize> = 15..18;
pub const HILBERT_BLOCK: std::ops::Range<usize> = 18..33;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; N_FEATURES]);

impl FeatureVector {
    pub fn values(&self) -> &[f64; N_FEATURES] {
        &self.0
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|&n| n == name).map(|i| self.0[i])
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

struct Axes {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl Axes {
    fn of(sample: &GestureSample) -> Self {
        Axes { x: sample.axis_x(), y: sample.axis_y(), z: sample.axis_z() }
    }

    fn each(&self) -> [&[f64]; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Axis pairs in slot order: (x,y), (y,z), (z,x).
    fn pairs(&self) -> [(&[f64], &[f64]); 3] {
        [(&self.x, &self.y), (&self.y, &self.z), (&self.z, &self.x)]
    }
}

fn time_block(axes: &Axes) -> Result<[f64; 15]> {
    let mut out = [0.0; 15];
    for (i, a) in axes.each().into_iter().enumerate() {
        out[i] = dsp::mean(a);
        out[3 + i] = dsp::skew(a)?;
        out[6 + i] = dsp::kurtosis(a)?;
    }
    for (i, (a, b)) in axes.pairs().into_iter().enumerate() {
        out[9 + i] = dsp::pearson_corr(a, b)?;
        out[12 + i] = dsp::cross_corr_feature(a, b)?;
    }
    Ok(out)
}

fn fourier_block(axes: &Axes) -> [f64; 3] {
    axes.each().map(dsp::spectral_energy)
}

fn hilbert_block(axes: &Axes) -> Result<[f64; 15]> {
    let mut out = [0.0; 15];
    for (i, a) in axes.each().into_iter().enumerate() {
        let h = dsp::hilbert_imag(a)?;
        out[i] = dsp::mean(&h);
        out[3 + i] = dsp::skew(&h)?;
        out[6 + i] = dsp::spectral_energy(&h);
        out[9 + i] = dsp::minimum(&h);
        out[12 + i] = dsp::maximum(&h);
    }
    Ok(out)
}

/// Mean, skew and kurtosis per axis, then Pearson and cross-correlation per axis pair.
pub fn time_features(sample: &GestureSample) -> Result<[f64; 15]> {
    time_block(&Axes::of(sample))
}

/// Spectral energy per axis.
pub fn freq_features(sample: &GestureSample) -> [f64; 3] {
    fourier_block(&Axes::of(sample))
}

/// Mean, skew, energy, minimum and maximum of each axis's Hilbert transform.
pub fn hilbert_features(sample: &GestureSample) -> Result<[f64; 15]> {
    hilbert_block(&Axes::of(sample))
}

pub fn feature_set(sample: &GestureSample) -> Result<FeatureVector> {
    let axes = Axes::of(sample);
    let mut v = [0.0; N_FEATURES];
    v[TIME_BLOCK].copy_from_slice(&time_block(&axes)?);
    v[FOURIER_BLOCK].copy_from_slice(&fourier_block(&axes));
    v[HILBERT_BLOCK].copy_from_slice(&hilbert_block(&axes)?);
    if let Some(i) = v.iter().position(|f| !f.is_finite()) {
        return Err(Error::Dataset(format!("feature {} is not finite", FEATURE_NAMES[i])));
    }
    Ok(FeatureVector(v))
}

/// Feature rows with the gesture label and user of every sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureMatrix {
    pub rows: Vec<FeatureVector>,
    pub labels: Vec<u32>,
    pub users: Vec<u32>,
    pub meta: Option<DatasetMeta>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<FeatureVector>, labels: Vec<u32>, users: Vec<u32>) -> Result<Self> {
        if rows.len() != labels.len() || rows.len() != users.len() {
            return Err(Error::InvalidInput(format!(
                "feature matrix parts differ in length: {} rows, {} labels, {} users",
                rows.len(),
                labels.len(),
                users.len()
            )));
        }
        Ok(FeatureMatrix { rows, labels, users, meta: None })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct users in ascending order.
    pub fn user_ids(&self) -> Vec<u32> {
        let mut u = self.users.clone();
        u.sort_unstable();
        u.dedup();
        u
    }

    pub fn select_rows(&self, indices: &[usize]) -> Vec<FeatureVector> {
        indices.iter().map(|&i| self.rows[i]).collect()
    }

    pub fn select_labels(&self, indices: &[usize]) -> Vec<u32> {
        indices.iter().map(|&i| self.labels[i]).collect()
    }

    /// CSV with header `user,gesture,f01..f33`, values at 17 significant digits.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("user,gesture");
        for i in 1..=N_FEATURES {
            let _ = write!(out, ",f{i:02}");
        }
        out.push('\n');
        for ((row, label), user) in self.rows.iter().zip(&self.labels).zip(&self.users) {
            let _ = write!(out, "{user},{label}");
            for v in row.0 {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path)
    }

    pub fn parse_csv(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(path, 1, "empty feature file"))?;
        let expected = Self::default().to_csv_string();
        if header != expected.trim_end() {
            return Err(Error::parse(path, 1, "unexpected feature header"));
        }
        let (mut rows, mut labels, mut users) = (Vec::new(), Vec::new(), Vec::new());
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != N_FEATURES + 2 {
                return Err(Error::parse(path, lineno, format!("expected {} fields, got {}", N_FEATURES + 2, fields.len())));
            }
            let id = |s: &str| s.parse::<u32>().map_err(|_| Error::parse(path, lineno, format!("bad id {s:?}")));
            users.push(id(fields[0])?);
            labels.push(id(fields[1])?);
            let mut v = [0.0; N_FEATURES];
            for (slot, f) in v.iter_mut().zip(&fields[2..]) {
                *slot = f
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(path, lineno, format!("bad value {f:?}")))?;
            }
            rows.push(FeatureVector(v));
        }
        FeatureMatrix::new(rows, labels, users)
    }
}

/// One feature row per sample, in dataset order. Extraction fans out across
/// the rayon pool; every failing sample is reported with its identity.
pub fn extract_all(dataset: &Dataset) -> Result<FeatureMatrix> {
    let results: Vec<Result<FeatureVector>> = dataset
        .samples()
        .par_iter()
        .map(|s| {
            feature_set(s).map_err(|e| Error::Sample { identity: s.id.to_string(), source: Box::new(e) })
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(v) => rows.push(v),
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        return Err(Error::Aggregate(errors));
    }
    let samples = dataset.samples();
    let mut matrix = FeatureMatrix::new(
        rows,
        samples.iter().map(|s| s.id.gesture).collect(),
        samples.iter().map(|s| s.id.user).collect(),
    )?;
    matrix.meta = Some(dataset.meta().clone());
    Ok(matrix)
}
