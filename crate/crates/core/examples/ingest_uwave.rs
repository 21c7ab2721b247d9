//! Load a raw uWave-style tree (or any corpus described by an adapter TOML)
//! and convert it to the canonical manifest.
//!
//! ```text
//! cargo run --example ingest_uwave -- <uwave_root> [adapter.toml]
//! ```
//!
//! Without arguments a tiny demo tree is written to the temp directory first.

use std::fs;
use std::path::PathBuf;

use gesture_core::data::{load_tree, load_uwave_tree, write_manifest, AdapterConfig};

fn demo_tree() -> std::io::Result<PathBuf> {
    let root = std::env::temp_dir().join("gesture-uwave-demo");
    for (user, day) in [(1, 1), (2, 1)] {
        let dir = root.join(format!("U{user} ({day})"));
        fs::create_dir_all(&dir)?;
        for gesture in 1..=2 {
            for trial in 1..=3 {
                let rows: String = (0..10)
                    .map(|i| format!("{} {} {}\n", i * gesture, -(trial as i32), user + i))
                    .collect();
                fs::write(dir.join(format!("A_Template_Acceleration{gesture}-{trial}.txt")), rows)?;
            }
        }
    }
    Ok(root)
}

fn main() -> gesture_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let root = match args.next() {
        Some(p) => PathBuf::from(p),
        None => demo_tree().expect("temp dir is writable"),
    };
    let dataset = match args.next() {
        Some(cfg) => load_tree(&root, &AdapterConfig::load(cfg)?)?,
        None => load_uwave_tree(&root)?,
    };
    println!("{}", dataset.meta());

    let out = std::env::temp_dir().join("gesture-uwave-canonical");
    println!("manifest: {}", write_manifest(&dataset, &out)?.display());

    // the built-in adapter as an editable starting point
    println!("\n{}", AdapterConfig::uwave().to_toml());
    Ok(())
}
