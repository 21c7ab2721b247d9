//! The 33-value feature set of a single sample, then of a whole corpus.

use gesture_core::data::{AxisTriple, GestureSample, SampleId};
use gesture_core::features::{extract_all, feature_set, FEATURE_NAMES, FOURIER_BLOCK, HILBERT_BLOCK, TIME_BLOCK};
use gesture_core::synth::{generate, SynthSpec};

fn main() -> gesture_core::Result<()> {
    // a short circle drawn in the x/y plane, z at rest
    let readings: Vec<AxisTriple> = (0..32)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 32.0;
            AxisTriple::new(t.cos(), t.sin(), 0.0)
        })
        .collect();
    let sample = GestureSample::new(SampleId { user: 1, gesture: 1, trial: 1, day: None }, readings)?;
    let fs = feature_set(&sample)?;

    for (block, range) in [("time", TIME_BLOCK), ("fourier", FOURIER_BLOCK), ("hilbert", HILBERT_BLOCK)] {
        println!("-- {block}");
        for i in range {
            println!("{:>14} {:>12.6}", FEATURE_NAMES[i], fs.0[i]);
        }
    }

    let matrix = extract_all(&generate(&SynthSpec::easy())?)?;
    println!("\n{} rows x {} features", matrix.len(), matrix.rows[0].0.len());
    print!("{}", matrix.to_csv_string().lines().take(2).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
