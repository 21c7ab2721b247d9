//! One-vs-rest ridge classifier.
//!
//! Columns are standardized with statistics from the training rows. For each
//! class the targets are `+1` (member) / `−1` (rest) and the weights solve
//! `(ZᵀZ + αI)·w = Zᵀt` with an unpenalized bias. Because standardized
//! columns are centred, the bias decouples to `mean(t)` and the remaining
//! `d × d` system is shared by every class and solved once by Cholesky.

use serde::{Deserialize, Serialize};

use super::{check_training, ClassMap, InputLayout, Predictor};
use crate::dsp::DEGENERATE_VARIANCE;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgeParams {
    pub alpha: f64,
}

impl Default for RidgeParams {
    fn default() -> Self {
        RidgeParams { alpha: 1.0 }
    }
}

/// Per-feature `(mean, stddev)`; zero-variance columns get stddev 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit<R: AsRef<[f64]>>(x: &[R]) -> Self {
        let d = x[0].as_ref().len();
        let n = x.len() as f64;
        let mut mean = vec![0.0; d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row.as_ref()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in x {
            for ((s, v), m) in var.iter_mut().zip(row.as_ref()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let v = s / n;
                if v < DEGENERATE_VARIANCE {
                    1.0
                } else {
                    v.sqrt()
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.std).map(|((v, m), s)| (v - m) / s).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub params: RidgeParams,
    pub classes: ClassMap,
    pub layout: InputLayout,
    pub standardizer: Standardizer,
    /// One row per class: `d` feature weights followed by the bias.
    pub weights: Vec<Vec<f64>>,
}

/// In-place Cholesky factorization of a symmetric matrix (lower triangle).
/// Fails when a pivot is not safely positive.
fn cholesky(a: &mut [Vec<f64>]) -> Result<()> {
    let n = a.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for j in 0..n {
        let mut diag = a[j][j];
        for k in 0..j {
            diag -= a[j][k] * a[j][k];
        }
        if !(diag > 1e-13 * scale) {
            return Err(Error::Singular(format!(
                "normal equations are not positive definite at column {j}; use alpha > 0 for rank-deficient data"
            )));
        }
        let l = diag.sqrt();
        a[j][j] = l;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            a[i][j] = s / l;
        }
    }
    Ok(())
}

fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

impl RidgeModel {
    pub fn fit<R: AsRef<[f64]>>(x: &[R], y: &[u32], params: &RidgeParams) -> Result<Self> {
        let d = check_training(x, y, 2)?;
        if !(params.alpha >= 0.0) || !params.alpha.is_finite() {
            return Err(Error::InvalidInput(format!("alpha must be finite and >= 0, got {}", params.alpha)));
        }
        let classes = ClassMap::from_labels(y);
        let encoded = classes.encode(y);
        let standardizer = Standardizer::fit(x);
        let z: Vec<Vec<f64>> = x.iter().map(|r| standardizer.apply(r.as_ref())).collect();

        let mut gram = vec![vec![0.0; d]; d];
        for row in &z {
            for i in 0..d {
                let ri = row[i];
                for j in 0..=i {
                    gram[i][j] += ri * row[j];
                }
            }
        }
        for (i, g) in gram.iter_mut().enumerate() {
            g[i] += params.alpha;
        }
        cholesky(&mut gram)?;

        let n = x.len() as f64;
        let weights = (0..classes.len())
            .map(|c| {
                let t = |i: usize| if encoded[i] == c { 1.0 } else { -1.0 };
                let mut rhs = vec![0.0; d];
                let mut t_sum = 0.0;
                for (i, row) in z.iter().enumerate() {
                    let ti = t(i);
                    t_sum += ti;
                    for (r, v) in rhs.iter_mut().zip(row) {
                        *r += v * ti;
                    }
                }
                let mut w = cholesky_solve(&gram, &rhs);
                w.push(t_sum / n);
                w
            })
            .collect();

        Ok(RidgeModel { params: *params, classes, layout: InputLayout::new(d), standardizer, weights })
    }
}

impl Predictor for RidgeModel {
    fn layout(&self) -> InputLayout {
        self.layout
    }

    fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.layout.check(x)?;
        let d = self.layout.n_features;
        Ok(self
            .weights
            .iter()
            .map(|w| {
                let mut s = w[d];
                for i in 0..d {
                    s += w[i] * (x[i] - self.standardizer.mean[i]) / self.standardizer.std[i];
                }
                s
            })
            .collect())
    }

    fn classes(&self) -> &ClassMap {
        &self.classes
    }
}
