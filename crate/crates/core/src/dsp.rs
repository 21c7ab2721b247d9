//! Numerical kernels behind the feature set: DFT, analytic signal, moments and
//! correlations.
//!
//! Every function is pure. Transforms accept any length; nothing is padded or
//! resampled on the way in.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Second moments below this are treated as a constant series.
pub const DEGENERATE_VARIANCE: f64 = 1e-24;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

fn transform(mut buf: Vec<Complex64>, inverse: bool) -> Vec<Complex64> {
    if !buf.is_empty() {
        plan(buf.len(), inverse).process(&mut buf);
    }
    buf
}

/// Forward DFT, `X_k = Σ_j x_j·exp(-2πi·jk/n)`.
pub fn dft(x: &[f64]) -> Vec<Complex64> {
    transform(x.iter().map(|&v| Complex64::new(v, 0.0)).collect(), false)
}

pub fn dft_complex(x: &[Complex64]) -> Vec<Complex64> {
    transform(x.to_vec(), false)
}

/// Inverse DFT including the `1/n` factor, so `idft(dft(x)) == x`.
pub fn idft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len() as f64;
    let mut out = transform(spectrum.to_vec(), true);
    for v in &mut out {
        *v /= n;
    }
    out
}

/// `(1/n)·Σ_k |X_k|²`; by Parseval equal to the time-domain sum of squares.
pub fn spectral_energy(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let total: f64 = dft(x).iter().map(|c| c.norm_sqr()).sum();
    total / x.len() as f64
}

/// Spectral weights of the analytic signal: 1 at DC, 2 on positive
/// frequencies, 1 at Nyquist for even lengths, 0 on negative frequencies.
pub fn analytic_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k == 0 || (n % 2 == 0 && k == n / 2) {
                1.0
            } else if 2 * k < n {
                2.0
            } else {
                0.0
            }
        })
        .collect()
}

/// `idft(dft(x) ⊙ w)`: real part reproduces `x`, imaginary part is the
/// Hilbert transform of `x`.
pub fn analytic_signal(x: &[f64]) -> Result<Vec<Complex64>> {
    if x.len() < 2 {
        return Err(Error::InvalidInput(format!("analytic signal needs at least 2 values, got {}", x.len())));
    }
    let mut spectrum = dft(x);
    for (bin, w) in spectrum.iter_mut().zip(analytic_weights(x.len())) {
        *bin *= w;
    }
    Ok(idft(&spectrum))
}

pub fn hilbert_imag(x: &[f64]) -> Result<Vec<f64>> {
    Ok(analytic_signal(x)?.into_iter().map(|c| c.im).collect())
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn minimum(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn maximum(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Population central moments `(m2, m3, m4)`.
fn central_moments(x: &[f64]) -> (f64, f64, f64) {
    let mu = mean(x);
    let n = x.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Fisher–Pearson skewness `m3 / m2^1.5`; 0 for a constant series.
pub fn skew(x: &[f64]) -> Result<f64> {
    if x.len() < 3 {
        return Err(Error::InvalidInput(format!("skew needs at least 3 values, got {}", x.len())));
    }
    let (m2, m3, _) = central_moments(x);
    if m2 < DEGENERATE_VARIANCE {
        return Ok(0.0);
    }
    Ok(m3 / m2.powf(1.5))
}

/// Excess kurtosis `m4 / m2² − 3`; 0 for a constant series.
pub fn kurtosis(x: &[f64]) -> Result<f64> {
    if x.len() < 4 {
        return Err(Error::InvalidInput(format!("kurtosis needs at least 4 values, got {}", x.len())));
    }
    let (m2, _, m4) = central_moments(x);
    if m2 < DEGENERATE_VARIANCE {
        return Ok(0.0);
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.len() < 2 {
        return Err(Error::InvalidInput(format!("correlation needs at least 2 values, got {}", a.len())));
    }
    Ok(())
}

/// Pearson product-moment correlation; 0 when either side is constant.
pub fn pearson_corr(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    let n = a.len() as f64;
    if saa / n < DEGENERATE_VARIANCE || sbb / n < DEGENERATE_VARIANCE {
        return Ok(0.0);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Largest normalized cross-correlation over every lag in `(−n, n)`:
/// `max_τ Σ_j a_j·b_{j+τ} / sqrt(Σa²·Σb²)`.
///
/// Zero if either signal is constant (all-zero included), the same
/// degenerate rule as [`pearson_corr`]. The lag sweep is evaluated through
/// the DFT on a `2n`-point buffer, which leaves room for every non-circular lag.
pub fn cross_corr_feature(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    if central_moments(a).0 < DEGENERATE_VARIANCE || central_moments(b).0 < DEGENERATE_VARIANCE {
        return Ok(0.0);
    }
    let ea: f64 = a.iter().map(|v| v * v).sum();
    let eb: f64 = b.iter().map(|v| v * v).sum();
    let n = a.len();
    let m = 2 * n;
    let pad = |x: &[f64]| {
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (slot, &v) in buf.iter_mut().zip(x) {
            slot.re = v;
        }
        buf
    };
    let fa = transform(pad(a), false);
    let fb = transform(pad(b), false);
    let product: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x.conj() * y).collect();
    let corr = idft(&product);
    // index τ holds lag τ, index m − τ holds lag −τ; index n is never a valid lag
    let best = corr
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != n)
        .map(|(_, c)| c.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((best / (ea.sqrt() * eb.sqrt())).clamp(-1.0, 1.0))
}
