//! Generate the easy synthetic corpus, write it in the canonical layout and
//! load it back.
//!
//! ```text
//! cargo run --example synth_dataset -- [out_dir]
//! ```

use std::path::PathBuf;

use gesture_core::data::load_manifest;
use gesture_core::synth::{generate, generate_to_dir, SynthSpec};

fn main() -> gesture_core::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("gesture-synth"));

    let spec = SynthSpec::easy();
    let dataset = generate(&spec)?;
    println!("{}", dataset.meta());

    let lengths: Vec<usize> = dataset.samples().iter().map(|s| s.len()).collect();
    println!(
        "readings per sample: {}..={}",
        lengths.iter().min().unwrap(),
        lengths.iter().max().unwrap()
    );

    let manifest = generate_to_dir(&spec, &out)?;
    let reloaded = load_manifest(&manifest)?;
    assert_eq!(reloaded.samples(), dataset.samples());
    println!("wrote {} and reloaded it unchanged", manifest.display());

    // smaller corpus with more users and no noise
    let custom = SynthSpec { users: 12, gestures: 4, samples_per_gesture_per_user: 3, noise_sigma: 0.0, ..spec };
    println!("{}", generate(&custom)?.meta());
    Ok(())
}
