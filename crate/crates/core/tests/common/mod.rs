//! Independent reference implementations used by the integration tests.
//! Everything here is the direct textbook formula: O(n²) transforms,
//! explicit moment sums, exhaustive lag scans.

#![allow(dead_code)]

use std::f64::consts::TAU;

use gesture_core::classifiers::{Predictor, TrainedModel};
use gesture_core::data::{AxisTriple, Dataset, GestureSample, SampleId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = (f64, f64);

pub fn naive_dft(x: &[C]) -> Vec<C> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, &(a, b)) in x.iter().enumerate() {
                // reduce jk mod n first so the angle stays accurate for long series
                let ang = -TAU * ((j * k) % n) as f64 / n as f64;
                let (s, c) = ang.sin_cos();
                re += a * c - b * s;
                im += a * s + b * c;
            }
            (re, im)
        })
        .collect()
}

pub fn naive_idft(x: &[C]) -> Vec<C> {
    let n = x.len();
    let conj: Vec<C> = x.iter().map(|&(a, b)| (a, -b)).collect();
    naive_dft(&conj).into_iter().map(|(a, b)| (a / n as f64, -b / n as f64)).collect()
}

pub fn real(x: &[f64]) -> Vec<C> {
    x.iter().map(|&v| (v, 0.0)).collect()
}

pub fn oracle_analytic(x: &[f64]) -> Vec<C> {
    let n = x.len();
    let spec = naive_dft(&real(x));
    let weighted: Vec<C> = spec
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let w = if k == 0 || (n % 2 == 0 && k == n / 2) {
                1.0
            } else if k < n.div_ceil(2) {
                2.0
            } else {
                0.0
            };
            (a * w, b * w)
        })
        .collect();
    naive_idft(&weighted)
}

pub fn oracle_hilbert(x: &[f64]) -> Vec<f64> {
    oracle_analytic(x).into_iter().map(|c| c.1).collect()
}

pub fn o_mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn central(x: &[f64], k: i32) -> f64 {
    let m = o_mean(x);
    x.iter().map(|v| (v - m).powi(k)).sum::<f64>() / x.len() as f64
}

pub fn o_skew(x: &[f64]) -> f64 {
    let m2 = central(x, 2);
    if m2 < 1e-24 {
        0.0
    } else {
        central(x, 3) / m2.powf(1.5)
    }
}

pub fn o_kurt(x: &[f64]) -> f64 {
    let m2 = central(x, 2);
    if m2 < 1e-24 {
        0.0
    } else {
        central(x, 4) / (m2 * m2) - 3.0
    }
}

pub fn o_pearson(a: &[f64], b: &[f64]) -> f64 {
    let (va, vb) = (central(a, 2), central(b, 2));
    if va < 1e-24 || vb < 1e-24 {
        return 0.0;
    }
    let (ma, mb) = (o_mean(a), o_mean(b));
    let cov = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / a.len() as f64;
    cov / (va * vb).sqrt()
}

/// Max over every lag of the normalized lagged inner product.
pub fn o_xcorr(a: &[f64], b: &[f64]) -> f64 {
    if central(a, 2) < 1e-24 || central(b, 2) < 1e-24 {
        return 0.0;
    }
    let n = a.len() as i64;
    let norm = (a.iter().map(|v| v * v).sum::<f64>() * b.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let mut best = f64::NEG_INFINITY;
    for tau in -(n - 1)..n {
        let mut s = 0.0;
        for j in 0..n {
            let k = j + tau;
            if (0..n).contains(&k) {
                s += a[j as usize] * b[k as usize];
            }
        }
        best = best.max(s / norm);
    }
    best
}

pub fn o_energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// The 33-value feature vector computed from first principles.
pub fn oracle_features(s: &GestureSample) -> [f64; 33] {
    let axes = [s.axis_x(), s.axis_y(), s.axis_z()];
    let pairs = [(0, 1), (1, 2), (2, 0)];
    let h: Vec<Vec<f64>> = axes.iter().map(|a| oracle_hilbert(a)).collect();
    let mut out = Vec::with_capacity(33);
    out.extend(axes.iter().map(|a| o_mean(a)));
    out.extend(axes.iter().map(|a| o_skew(a)));
    out.extend(axes.iter().map(|a| o_kurt(a)));
    out.extend(pairs.iter().map(|&(i, j)| o_pearson(&axes[i], &axes[j])));
    out.extend(pairs.iter().map(|&(i, j)| o_xcorr(&axes[i], &axes[j])));
    out.extend(axes.iter().map(|a| o_energy(a)));
    out.extend(h.iter().map(|a| o_mean(a)));
    out.extend(h.iter().map(|a| o_skew(a)));
    out.extend(h.iter().map(|a| o_energy(a)));
    out.extend(h.iter().map(|a| a.iter().copied().fold(f64::INFINITY, f64::min)));
    out.extend(h.iter().map(|a| a.iter().copied().fold(f64::NEG_INFINITY, f64::max)));
    out.try_into().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_series(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
}

pub fn random_sample(rng: &mut impl Rng, id: SampleId, n: usize) -> GestureSample {
    let readings = (0..n)
        .map(|_| AxisTriple::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect();
    GestureSample::new(id, readings).unwrap()
}

pub fn id(user: u32, gesture: u32, trial: u32) -> SampleId {
    SampleId { user, gesture, trial, day: None }
}

/// `users × gestures × per_cell` random samples of length 16..40.
pub fn random_dataset(seed: u64, users: u32, gestures: u32, per_cell: u32) -> Dataset {
    let mut r = rng(seed);
    let mut samples = Vec::new();
    for u in 1..=users {
        for g in 1..=gestures {
            for t in 1..=per_cell {
                let n = r.random_range(16..40);
                samples.push(random_sample(&mut r, id(u, g, t), n));
            }
        }
    }
    Dataset::new(samples).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Relative-or-absolute closeness with a shared tolerance.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Dense Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Ridge weights from the full augmented system `[Z 1]`, bias unpenalized.
pub fn ridge_oracle(x: &[Vec<f64>], y: &[u32], alpha: f64) -> Vec<Vec<f64>> {
    let (n, d) = (x.len(), x[0].len());
    let mean: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let std: Vec<f64> = (0..d)
        .map(|j| {
            let v = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n as f64;
            if v < 1e-24 {
                1.0
            } else {
                v.sqrt()
            }
        })
        .collect();
    let a: Vec<Vec<f64>> = x
        .iter()
        .map(|r| (0..d).map(|j| (r[j] - mean[j]) / std[j]).chain([1.0]).collect())
        .collect();
    let mut labels = y.to_vec();
    labels.sort_unstable();
    labels.dedup();
    labels
        .iter()
        .map(|&c| {
            let t: Vec<f64> = y.iter().map(|&l| if l == c { 1.0 } else { -1.0 }).collect();
            let mut ata = vec![vec![0.0; d + 1]; d + 1];
            let mut atb = vec![0.0; d + 1];
            for (row, &ti) in a.iter().zip(&t) {
                for i in 0..=d {
                    atb[i] += row[i] * ti;
                    for j in 0..=d {
                        ata[i][j] += row[i] * row[j];
                    }
                }
            }
            for (i, r) in ata.iter_mut().enumerate().take(d) {
                r[i] += alpha;
            }
            solve(ata, atb)
        })
        .collect()
}

pub fn random_problem(seed: u64, n: usize, d: usize, classes: u32) -> (Vec<Vec<f64>>, Vec<u32>) {
    let mut r = rng(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.random_range(-3.0..3.0)).collect()).collect();
    let y: Vec<u32> = (0..n).map(|i| 1 + (i as u32 % classes)).collect();
    (x, y)
}

pub fn two_clusters(n: usize) -> (Vec<Vec<f64>>, Vec<u32>) {
    let mut r = rng(99);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let c = (i % 2) as f64;
        x.push(vec![5.0 * c + r.random_range(-1.0..1.0), -3.0 * c + r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]);
        y.push(1 + (i % 2) as u32);
    }
    (x, y)
}

pub fn training_accuracy(m: &TrainedModel, x: &[Vec<f64>], y: &[u32]) -> f64 {
    let hits = x.iter().zip(y).filter(|(r, &l)| m.predict(r).unwrap() == l).count();
    100.0 * hits as f64 / y.len() as f64
}

/// A direct transcription of the boosting recursion for depth-1 trees.
pub fn gb_oracle(x: &[Vec<f64>], y: &[usize], k: usize, stages: usize, lr: f64, queries: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    let n = x.len();
    let prior: Vec<f64> = (0..k).map(|c| (y.iter().filter(|&&l| l == c).count() as f64 / n as f64).ln()).collect();
    let mut f = vec![prior.clone(); n];
    let mut q = vec![prior.clone(); queries.len()];
    let mut out = vec![vec![prior]; queries.len()];
    for _ in 0..stages {
        let p: Vec<Vec<f64>> = f
            .iter()
            .map(|s| {
                let z: f64 = s.iter().map(|v| v.exp()).sum();
                s.iter().map(|v| v.exp() / z).collect()
            })
            .collect();
        for c in 0..k {
            let r: Vec<f64> = (0..n).map(|i| if y[i] == c { 1.0 } else { 0.0 } - p[i][c]).collect();
            // brute force over every feature and every midpoint
            let mut best: Option<(f64, usize, f64)> = None;
            for j in 0..x[0].len() {
                let mut vals: Vec<f64> = x.iter().map(|row| row[j]).collect();
                vals.sort_by(f64::total_cmp);
                vals.dedup();
                for w in vals.windows(2) {
                    let thr = 0.5 * (w[0] + w[1]);
                    let sse = |side: &dyn Fn(f64) -> bool| {
                        let rs: Vec<f64> = (0..n).filter(|&i| side(x[i][j])).map(|i| r[i]).collect();
                        let m = rs.iter().sum::<f64>() / rs.len() as f64;
                        rs.iter().map(|v| (v - m).powi(2)).sum::<f64>()
                    };
                    let cost = sse(&|v| v <= thr) + sse(&|v| v > thr);
                    if best.is_none_or(|b| cost < b.0 - 1e-12) {
                        best = Some((cost, j, thr));
                    }
                }
            }
            let (_, j, thr) = best.unwrap();
            let gamma = |left: bool| {
                let (num, den) = (0..n)
                    .filter(|&i| (x[i][j] <= thr) == left)
                    .fold((0.0, 0.0), |(a, b), i| (a + r[i], b + r[i].abs() * (1.0 - r[i].abs())));
                if den.abs() < 1e-150 {
                    0.0
                } else {
                    (k as f64 - 1.0) / k as f64 * num / den
                }
            };
            let (gl, gr) = (lr * gamma(true), lr * gamma(false));
            for i in 0..n {
                f[i][c] += if x[i][j] <= thr { gl } else { gr };
            }
            for (qi, row) in queries.iter().enumerate() {
                q[qi][c] += if row[j] <= thr { gl } else { gr };
            }
        }
        for (o, s) in out.iter_mut().zip(&q) {
            o.push(s.clone());
        }
    }
    out
}
