//! The spectral primitives behind the Fourier and Hilbert features.

use gesture_core::dsp::{analytic_signal, dft, dft_complex, hilbert_imag, spectral_energy};

fn main() -> gesture_core::Result<()> {
    let n = 16;
    let x: Vec<f64> = (0..n).map(|i| (std::f64::consts::TAU * 2.0 * i as f64 / n as f64).cos()).collect();

    let spectrum = dft(&x);
    let peaks: Vec<usize> = (0..n).filter(|&k| spectrum[k].norm() > 1e-9).collect();
    println!("cos(2·2πt) on {n} points: non-zero bins {peaks:?}");
    // (1/n)·Σ|X_k|² equals Σx² by Parseval
    println!("spectral energy {:.3}, Σx² = {:.3}", spectral_energy(&x), x.iter().map(|v| v * v).sum::<f64>());

    // the analytic signal keeps x as its real part; its imaginary part is the
    // Hilbert transform, here sin(2·2πt)
    let xa = analytic_signal(&x)?;
    let h = hilbert_imag(&x)?;
    for i in 0..4 {
        println!("t={i:>2}  x={:>7.4}  re={:>7.4}  im={:>7.4}  |x_a|={:.4}", x[i], xa[i].re, h[i], xa[i].norm());
    }

    let spec_a = dft_complex(&xa);
    let worst = spec_a[n / 2 + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    println!("largest negative-frequency magnitude of x_a: {worst:.2e}");
    Ok(())
}
